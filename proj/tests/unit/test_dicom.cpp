#include <doctest.h>

#include <string>
#include <vector>

#include "radgate/dicom.hpp"
#include "radgate/dicom_writer.hpp"
#include "radgate/error.hpp"
#include "radgate/fixtures.hpp"
#include "radgate/rtstruct.hpp"
#include "radgate/slice_meta.hpp"

using namespace radgate;
using namespace radgate::dicom;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::IoFailure;
}

DataSet text_body(DicomTag tag, std::string_view vr, std::string_view value) {
  DataSet ds;
  ds.set(text_element(tag, vr, value));
  return ds;
}

DataSet pixel_body(std::vector<std::uint8_t> bytes, std::uint16_t representation) {
  DataSet ds;
  ds.set(us_element(tags::SamplesPerPixel, 1));
  ds.set(us_element(tags::Rows, 2));
  ds.set(us_element(tags::Columns, 2));
  ds.set(us_element(tags::BitsAllocated, 16));
  ds.set(us_element(tags::BitsStored, 16));
  ds.set(us_element(tags::HighBit, 15));
  ds.set(us_element(tags::PixelRepresentation, representation));
  ds.set(binary_element(tags::PixelData, "OW", std::move(bytes)));
  return ds;
}

DataSet contour_item(std::vector<double> data) {
  DataSet item;
  item.set(text_element(tags::ContourGeometricType, "CS", "CLOSED_PLANAR"));
  std::vector<long long> count{static_cast<long long>(data.size() / 3)};
  item.set(integer_string_element(tags::NumberOfContourPoints, count));
  item.set(decimal_string_element(tags::ContourData, data));
  return item;
}

DataSet rtstruct_body(const std::vector<std::pair<std::string, std::vector<std::vector<double>>>>& rois) {
  DataSet ds;
  ds.set(text_element(tags::Modality, "CS", "RTSTRUCT"));
  std::vector<DataSet> names, contours;
  long long number = 1;
  for (const auto& [name, polygons] : rois) {
    DataSet n;
    n.set(integer_string_element(tags::RoiNumber, std::vector<long long>{number}));
    n.set(text_element(tags::RoiName, "LO", name));
    names.push_back(n);
    DataSet c;
    std::vector<DataSet> items;
    for (const auto& p : polygons) items.push_back(contour_item(p));
    c.set(sequence_element(tags::ContourSequence, items));
    c.set(integer_string_element(tags::ReferencedRoiNumber, std::vector<long long>{number}));
    contours.push_back(c);
    ++number;
  }
  ds.set(sequence_element(tags::StructureSetRoiSequence, names));
  ds.set(sequence_element(tags::RoiContourSequence, contours));
  return ds;
}

const std::vector<double> kSquare = {0, 0, 0, 10, 0, 0, 10, 10, 0, 0, 10, 0};

}  // namespace

TEST_SUITE("dicom") {
  TEST_CASE("fixture CT slice parses with modality CT and its kernel") {
    fixtures::Rng rng(1);
    auto spec = fixtures::clean_series("P1", rng);
    spec.kernel = "STANDARD";
    auto files = fixtures::series_files(spec, rng, "s");
    REQUIRE(!files.empty());
    auto obj = parse_file(files.front().bytes);
    CHECK(std::get<std::string>(decode_value(obj, tags::Modality)) == "CT");
    auto meta = extract_slice_meta(obj);
    CHECK(meta.convolution_kernel == std::optional<std::string>("STANDARD"));
    REQUIRE(meta.orientation.has_value());
    CHECK(orientation_valid(*meta.orientation));
  }

  TEST_CASE("absent rescale tags stay absent") {
    fixtures::Rng rng(2);
    auto spec = fixtures::with_defect(fixtures::clean_series("P1", rng), fixtures::Defect::MissingRescale);
    auto files = fixtures::series_files(spec, rng, "s");
    auto meta = extract_slice_meta(parse_file(files.front().bytes));
    CHECK_FALSE(meta.rescale_slope.has_value());
    CHECK_FALSE(meta.rescale_intercept.has_value());
  }

  TEST_CASE("missing DICM magic is rejected") {
    auto bytes = write_part10(text_body(tags::Modality, "CS", "CT"));
    bytes[129] = 'X';
    CHECK(code_of([&] { parse_file(bytes); }) == ErrorCode::MissingMagic);
    std::vector<std::uint8_t> tiny(20, 0);
    CHECK(code_of([&] { parse_file(tiny); }) == ErrorCode::MissingMagic);
  }

  TEST_CASE("JPEG transfer syntax is unsupported") {
    WriteOptions options;
    options.transfer_syntax_uid = "1.2.840.10008.1.2.4.70";
    auto bytes = write_part10(text_body(tags::Modality, "CS", "CT"), options);
    CHECK(code_of([&] { parse_file(bytes); }) == ErrorCode::UnsupportedTransferSyntax);
  }

  TEST_CASE("DS decodes to decimals, CS padding is stripped, bad DS is malformed") {
    DataSet ds;
    ds.set(binary_element(tags::PixelSpacing, "DS", {'0', '.', '9', '7', '6', '5', '6', '2', '5', '\\', '0', '.', '9', '7',
                                                      '6', '5', '6', '2', '5', ' '}));
    ds.set(binary_element(tags::Modality, "CS", {'C', 'T', ' ', ' '}));
    ds.set(binary_element(tags::SliceThickness, "DS", {'1', '.', '0', '\\', 'x', ' '}));
    for (auto ts : {TransferSyntax::ExplicitVRLittleEndian, TransferSyntax::ImplicitVRLittleEndian}) {
      WriteOptions options;
      options.transfer_syntax = ts;
      auto obj = parse_file(write_part10(ds, options));
      CHECK(std::get<std::vector<double>>(decode_value(obj, tags::PixelSpacing)) ==
            std::vector<double>{0.9765625, 0.9765625});
      CHECK(std::get<std::string>(decode_value(obj, tags::Modality)) == "CT");
      CHECK(code_of([&] { decode_value(obj, tags::SliceThickness); }) == ErrorCode::MalformedNumeric);
    }
  }

  TEST_CASE("truncated element is reported") {
    auto bytes = write_part10(text_body(tags::Manufacturer, "LO", "A long manufacturer name"));
    bytes.resize(bytes.size() - 5);
    CHECK(code_of([&] { parse_file(bytes); }) == ErrorCode::TruncatedElement);
  }

  TEST_CASE("pixel bytes decode little endian row-major") {
    auto obj = parse_file(write_part10(pixel_body({0, 0, 1, 0, 2, 0, 3, 0}, 0)));
    auto grid = decode_pixels(obj);
    CHECK(grid.rows == 2);
    CHECK(grid.cols == 2);
    CHECK(grid.at(0, 0) == 0);
    CHECK(grid.at(0, 1) == 1);
    CHECK(grid.at(1, 0) == 2);
    CHECK(grid.at(1, 1) == 3);
  }

  TEST_CASE("signed pixel representation is two's complement") {
    auto signed_grid = decode_pixels(parse_file(write_part10(pixel_body({0xFF, 0xFF, 0, 0, 0, 0, 0, 0}, 1))));
    CHECK(signed_grid.at(0, 0) == -1);
    auto unsigned_grid = decode_pixels(parse_file(write_part10(pixel_body({0xFF, 0xFF, 0, 0, 0, 0, 0, 0}, 0))));
    CHECK(unsigned_grid.at(0, 0) == 65535);
  }

  TEST_CASE("pixel length mismatch") {
    auto obj = parse_file(write_part10(pixel_body({0, 0, 1, 0, 2, 0, 3, 0}, 0)));
    DataSet ds = obj.dataset;
    ds.set(Element{tags::PixelData, "OW", {0, 0, 1, 0, 2, 0, 3}, {}});
    DicomObject bad{obj.transfer_syntax, ds};
    CHECK(code_of([&] { decode_pixels(bad); }) == ErrorCode::PixelLengthMismatch);
  }

  TEST_CASE("square RTSTRUCT contour parses as one 4-point polygon") {
    for (bool undefined : {false, true}) {
      WriteOptions options;
      options.undefined_length_sequences = undefined;
      auto sets = parse_rtstruct(parse_file(write_part10(rtstruct_body({{"GTV", {kSquare}}}), options)));
      REQUIRE(sets.size() == 1);
      CHECK(sets[0].roi_name == "GTV");
      REQUIRE(sets[0].planar_contours.size() == 1);
      CHECK(sets[0].planar_contours[0].size() == 4);
      CHECK(sets[0].planar_contours[0][2] == Point3{10, 10, 0});
    }
  }

  TEST_CASE("contour data not divisible by three") {
    std::vector<double> ten(10, 1.0);
    auto obj = parse_file(write_part10(rtstruct_body({{"GTV", {ten}}})));
    CHECK(code_of([&] { parse_rtstruct(obj); }) == ErrorCode::OddContourData);
  }

  TEST_CASE("ROIs come back in sequence order") {
    auto sets = parse_rtstruct(parse_file(write_part10(rtstruct_body({{"GTV-1", {kSquare}}, {"Lung-L", {kSquare}}}))));
    REQUIRE(sets.size() == 2);
    CHECK(sets[0].roi_name == "GTV-1");
    CHECK(sets[1].roi_name == "Lung-L");
  }

  TEST_CASE("non-RTSTRUCT object is rejected") {
    auto obj = parse_file(write_part10(text_body(tags::Modality, "CS", "CT")));
    CHECK(code_of([&] { parse_rtstruct(obj); }) == ErrorCode::NotRtStruct);
  }

  TEST_CASE("tag formatting and ordering") {
    CHECK(DicomTag{0x7FE0, 0x0010}.str() == "(7FE0,0010)");
    CHECK(DicomTag{0x0008, 0x0060} < DicomTag{0x0010, 0x0010});
    CHECK(DicomTag{0x0028, 0x0010} < DicomTag{0x0028, 0x0011});
  }

  TEST_CASE("DS formatting fits sixteen characters and round-trips") {
    for (double v : {0.9765625, -1024.0, 1e-7, 123456789.123456, 2.5, -0.0001234567891}) {
      auto text = format_decimal_string(v);
      CHECK(text.size() <= 16);
      CHECK(std::stod(text) == doctest::Approx(v).epsilon(1e-9));
    }
  }

  TEST_CASE("random metadata round-trips through both transfer syntaxes") {
    fixtures::Rng rng(11);
    for (int n = 0; n < 20; ++n) {
      auto meta = fixtures::random_slice_meta(rng);
      std::vector<std::uint16_t> stored(meta.rows * meta.cols, 7);
      WriteOptions options;
      options.transfer_syntax = n % 2 ? TransferSyntax::ImplicitVRLittleEndian : TransferSyntax::ExplicitVRLittleEndian;
      options.undefined_length_sequences = n % 3 == 0;
      auto obj = parse_file(write_part10(fixtures::slice_dataset(meta, stored), options));
      CHECK(extract_slice_meta(obj) == meta);
    }
  }
}
