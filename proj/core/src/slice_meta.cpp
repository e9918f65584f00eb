#include "radgate/slice_meta.hpp"

#include <cmath>

#include "radgate/error.hpp"

namespace radgate::dicom {

std::array<double, 3> SliceMeta::normal() const {
  if (!orientation) return {0.0, 0.0, 1.0};
  const auto& o = *orientation;
  std::array<double, 3> n{o[1] * o[5] - o[2] * o[4], o[2] * o[3] - o[0] * o[5],
                          o[0] * o[4] - o[1] * o[3]};
  double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  if (len > 0)
    for (auto& v : n) v /= len;
  return n;
}

double SliceMeta::position_along_normal() const {
  if (!image_position) return 0.0;
  auto n = normal();
  const auto& p = *image_position;
  return p[0] * n[0] + p[1] * n[1] + p[2] * n[2];
}

bool orientation_valid(const std::array<double, 6>& c, double tolerance) {
  double row_norm = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
  double col_norm = std::sqrt(c[3] * c[3] + c[4] * c[4] + c[5] * c[5]);
  double dot = c[0] * c[3] + c[1] * c[4] + c[2] * c[5];
  return std::abs(row_norm - 1.0) <= tolerance && std::abs(col_norm - 1.0) <= tolerance &&
         std::abs(dot) <= tolerance;
}

namespace {

template <std::size_t N>
std::optional<std::array<double, N>> fixed_decimals(const DataSet& ds, DicomTag tag) {
  auto values = find_decimals(ds, tag);
  if (!values) return std::nullopt;
  if (values->size() != N)
    throw Error(ErrorCode::MalformedNumeric, tag.str() + " expects " + std::to_string(N) +
                                                 " values, got " + std::to_string(values->size()));
  std::array<double, N> out{};
  std::copy(values->begin(), values->end(), out.begin());
  return out;
}

std::optional<double> single_decimal(const DataSet& ds, DicomTag tag) {
  auto values = find_decimals(ds, tag);
  if (!values || values->empty()) return std::nullopt;
  return values->front();
}

}  // namespace

SliceMeta extract_slice_meta(const DicomObject& obj) {
  const DataSet& ds = obj.dataset;
  SliceMeta meta;
  meta.modality = get_text(ds, tags::Modality);
  meta.patient_id = find_text(ds, tags::PatientId).value_or("");
  meta.patient_name = find_text(ds, tags::PatientName);
  meta.sop_uid = find_text(ds, tags::SopInstanceUid).value_or("");
  meta.series_uid = find_text(ds, tags::SeriesInstanceUid).value_or("");
  meta.rows = static_cast<std::size_t>(find_integer(ds, tags::Rows).value_or(0));
  meta.cols = static_cast<std::size_t>(find_integer(ds, tags::Columns).value_or(0));
  meta.pixel_spacing = fixed_decimals<2>(ds, tags::PixelSpacing);
  meta.image_position = fixed_decimals<3>(ds, tags::ImagePositionPatient);
  meta.orientation = fixed_decimals<6>(ds, tags::ImageOrientationPatient);
  meta.slice_thickness = single_decimal(ds, tags::SliceThickness);
  meta.rescale_slope = single_decimal(ds, tags::RescaleSlope);
  meta.rescale_intercept = single_decimal(ds, tags::RescaleIntercept);
  meta.convolution_kernel = find_text(ds, tags::ConvolutionKernel);
  meta.kvp = single_decimal(ds, tags::Kvp);
  meta.exposure = find_integer(ds, tags::Exposure);
  meta.tube_current = find_integer(ds, tags::XRayTubeCurrent);
  meta.series_date = find_text(ds, tags::SeriesDate);
  meta.manufacturer = find_text(ds, tags::Manufacturer);

  bool image_bearing = meta.image_bearing() || ds.contains(tags::PixelData);
  if (image_bearing) {
    if (!meta.image_position || !meta.orientation)
      throw Error(ErrorCode::MissingGeometry, "image " + meta.sop_uid +
                                                  " lacks ImagePositionPatient/ImageOrientationPatient");
    if (!orientation_valid(*meta.orientation))
      throw Error(ErrorCode::MissingGeometry,
                  "image " + meta.sop_uid + " has non-orthonormal ImageOrientationPatient");
    if (!meta.pixel_spacing || (*meta.pixel_spacing)[0] <= 0 || (*meta.pixel_spacing)[1] <= 0)
      throw Error(ErrorCode::MissingGeometry, "image " + meta.sop_uid + " lacks a positive PixelSpacing");
  }
  return meta;
}

PixelGrid decode_pixels(const DicomObject& obj) {
  const DataSet& ds = obj.dataset;
  auto bits = find_integer(ds, tags::BitsAllocated);
  if (!bits || *bits != 16)
    throw Error(ErrorCode::UnsupportedBitsAllocated,
                "BitsAllocated " + (bits ? std::to_string(*bits) : std::string("absent")));
  auto samples = find_integer(ds, tags::SamplesPerPixel).value_or(1);
  if (samples != 1)
    throw Error(ErrorCode::UnsupportedBitsAllocated, "SamplesPerPixel " + std::to_string(samples));
  auto representation = find_integer(ds, tags::PixelRepresentation).value_or(0);
  if (representation != 0 && representation != 1)
    throw Error(ErrorCode::MalformedElement, "PixelRepresentation " + std::to_string(representation));
  auto rows = find_integer(ds, tags::Rows);
  auto cols = find_integer(ds, tags::Columns);
  if (!rows || !cols) throw Error(ErrorCode::TagAbsent, "Rows/Columns");
  const Element* pixel = ds.find(tags::PixelData);
  if (!pixel) throw Error(ErrorCode::TagAbsent, tags::PixelData.str());

  PixelGrid grid;
  grid.rows = static_cast<std::size_t>(*rows);
  grid.cols = static_cast<std::size_t>(*cols);
  std::size_t count = grid.rows * grid.cols;
  if (pixel->value.size() != count * 2)
    throw Error(ErrorCode::PixelLengthMismatch,
                "PixelData has " + std::to_string(pixel->value.size()) + " bytes, expected " +
                    std::to_string(count * 2));
  grid.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto raw = static_cast<std::uint16_t>(pixel->value[2 * i] | (pixel->value[2 * i + 1] << 8));
    grid.values[i] = representation == 1 ? static_cast<std::int32_t>(static_cast<std::int16_t>(raw))
                                         : static_cast<std::int32_t>(raw);
  }
  return grid;
}

}  // namespace radgate::dicom
