#include "radgate/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "radgate/csv.hpp"
#include "radgate/error.hpp"
#include "radgate/fsutil.hpp"
#include "radgate/numfmt.hpp"
#include "radgate/parallel.hpp"
#include "radgate/rtstruct.hpp"

namespace radgate::catalog {

namespace {

struct ParsedFile {
  fs::path relative;
  std::optional<dicom::SliceMeta> meta;
  std::string referenced_series;  // RTSTRUCT only
  std::optional<std::string> issue;
  bool is_dicom = false;
};

ParsedFile parse_one(const fs::path& root, const fs::path& relative) {
  ParsedFile out;
  out.relative = relative;
  try {
    auto bytes = read_binary_file(root / relative);
    auto obj = dicom::parse_file(bytes);
    out.is_dicom = true;
    out.meta = dicom::extract_slice_meta(obj);
    if (out.meta->modality == "RTSTRUCT") {
      try {
        auto sets = dicom::parse_rtstruct(obj);
        if (!sets.empty()) out.referenced_series = sets.front().referenced_series_uid;
      } catch (const Error&) {
        // Attached by patient only.
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MissingMagic) {
      out.is_dicom = e.code() != ErrorCode::IoFailure;
      out.issue = e.what();
    }
  }
  return out;
}

std::string join_decimals(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back('\\');
    out += format_shortest(values[i]);
  }
  return out;
}

template <typename T>
std::string cell(const std::optional<T>& value) {
  if (!value) return {};
  if constexpr (std::is_same_v<T, std::string>)
    return *value;
  else if constexpr (std::is_same_v<T, double>)
    return format_shortest(*value);
  else
    return std::to_string(*value);
}

std::string spacing_cell(const dicom::SliceMeta& m) {
  if (!m.pixel_spacing) return {};
  return join_decimals(*m.pixel_spacing);
}

}  // namespace

std::optional<std::string> series_geometry_violation(const SeriesRecord& record) {
  if (record.slices.empty()) return "series has no slices";
  const auto& ref = record.slices.front();
  for (const auto& s : record.slices) {
    if (s.series_uid != record.series_uid) return "slice " + s.sop_uid + " belongs to another series";
    if (s.rows != ref.rows || s.cols != ref.cols)
      return "slice " + s.sop_uid + " has a different matrix size";
    if (!s.orientation || !ref.orientation) return "slice " + s.sop_uid + " lacks orientation";
    for (int i = 0; i < 6; ++i)
      if (std::abs((*s.orientation)[i] - (*ref.orientation)[i]) > 1e-3)
        return "slice " + s.sop_uid + " has a different orientation";
    if (!s.pixel_spacing || !ref.pixel_spacing) return "slice " + s.sop_uid + " lacks pixel spacing";
    for (int i = 0; i < 2; ++i)
      if (std::abs((*s.pixel_spacing)[i] - (*ref.pixel_spacing)[i]) > 1e-6)
        return "slice " + s.sop_uid + " has a different pixel spacing";
  }
  return std::nullopt;
}

ScanResult scan_dataset(const DatasetLayout& layout, unsigned jobs) {
  std::error_code ec;
  if (!fs::is_directory(layout.root, ec))
    throw Error(ErrorCode::IoFailure, "dataset root " + layout.root.string() + " is not a directory");

  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(layout.root, ec);
       it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) throw Error(ErrorCode::IoFailure, "cannot walk " + layout.root.string());
    if (it->is_regular_file()) files.push_back(fs::relative(it->path(), layout.root));
  }
  std::sort(files.begin(), files.end());

  std::vector<ParsedFile> parsed(files.size());
  parallel_for(files.size(), jobs, [&](std::size_t i) { parsed[i] = parse_one(layout.root, files[i]); });

  ScanResult result;
  result.root = layout.root;

  // (patient, series) -> slice files; patient -> rtstructs
  std::map<std::pair<std::string, std::string>, std::vector<const ParsedFile*>> series;
  std::map<std::string, std::vector<const ParsedFile*>> rtstructs;
  bool any_dicom = false;
  for (const auto& p : parsed) {
    any_dicom = any_dicom || p.is_dicom;
    if (p.issue) {
      result.issues.push_back({p.relative, *p.issue});
      continue;
    }
    if (!p.meta) continue;
    if (p.meta->modality == "RTSTRUCT")
      rtstructs[p.meta->patient_id].push_back(&p);
    else if (p.meta->image_bearing())
      series[{p.meta->patient_id, p.meta->series_uid}].push_back(&p);
  }
  if (!any_dicom) throw Error(ErrorCode::EmptyDataset, "no DICOM files under " + layout.root.string());

  std::map<std::string, std::size_t> series_per_patient;
  for (const auto& [key, _] : series) ++series_per_patient[key.first];
  std::map<std::string, std::size_t> seen;

  for (auto& [key, slice_files] : series) {
    const auto& [patient, uid] = key;
    SeriesRecord record;
    record.source_patient_id = patient;
    record.series_uid = uid;
    std::size_t index = ++seen[patient];
    record.patient_id = series_per_patient[patient] > 1 ? patient + "_" + std::to_string(index) : patient;

    std::sort(slice_files.begin(), slice_files.end(), [](const ParsedFile* a, const ParsedFile* b) {
      double pa = a->meta->position_along_normal();
      double pb = b->meta->position_along_normal();
      if (pa != pb) return pa < pb;
      return std::tie(a->meta->sop_uid, a->relative) < std::tie(b->meta->sop_uid, b->relative);
    });
    for (const auto* f : slice_files) {
      record.slices.push_back(*f->meta);
      record.slice_paths.push_back(f->relative);
    }
    record.modality = record.slices.front().modality;

    if (auto it = rtstructs.find(patient); it != rtstructs.end()) {
      for (const auto* rt : it->second) {
        // Attach to the referenced series when one is named and exists.
        bool referenced_elsewhere =
            !rt->referenced_series.empty() && rt->referenced_series != uid &&
            series.count({patient, rt->referenced_series}) > 0;
        if (referenced_elsewhere) continue;
        record.rtstruct_paths.push_back(rt->relative);
        record.rtstructs.push_back(*rt->meta);
      }
    }

    if (auto violation = series_geometry_violation(record)) {
      result.rejected.push_back({record.patient_id, uid, "MixedSeriesGeometry: " + *violation});
      continue;
    }
    result.records.push_back(std::move(record));
  }

  std::sort(result.records.begin(), result.records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.patient_id, a.series_uid) < std::tie(b.patient_id, b.series_uid);
  });
  std::sort(result.rejected.begin(), result.rejected.end(), [](const auto& a, const auto& b) {
    return std::tie(a.patient_id, a.series_uid) < std::tie(b.patient_id, b.series_uid);
  });
  return result;
}

std::string MetadataTable::to_csv() const {
  CsvWriter w;
  w.row(header);
  for (const auto& r : rows) w.row(r);
  return w.str();
}

MetadataTable describe(std::span<const SeriesRecord> records, DescribeMode mode) {
  MetadataTable table;
  if (mode == DescribeMode::Default) {
    table.header = {"patient", "file", "modality", "slice_thickness", "pixel_spacing", "date", "manufacturer"};
    auto add = [&](const SeriesRecord& r, const fs::path& path, const dicom::SliceMeta& m) {
      table.rows.push_back({r.patient_id, path.generic_string(), m.modality, cell(m.slice_thickness),
                            spacing_cell(m), cell(m.series_date), cell(m.manufacturer)});
    };
    for (const auto& r : records) {
      for (std::size_t i = 0; i < r.slices.size(); ++i) add(r, r.slice_paths[i], r.slices[i]);
      for (std::size_t i = 0; i < r.rtstructs.size(); ++i) add(r, r.rtstruct_paths[i], r.rtstructs[i]);
    }
    return table;
  }
  table.header = {"patient",      "patient_name", "series_uid",   "modality",
                  "convolution_kernel", "slice_thickness", "pixel_spacing", "kvp",
                  "exposure",     "tube_current", "series_date"};
  for (const auto& r : records) {
    const auto& m = r.slices.front();
    table.rows.push_back({r.patient_id, cell(m.patient_name), r.series_uid, m.modality,
                          cell(m.convolution_kernel), cell(m.slice_thickness), spacing_cell(m),
                          cell(m.kvp), cell(m.exposure), cell(m.tube_current), cell(m.series_date)});
  }
  return table;
}

std::vector<NrrdCase> scan_nrrd_dataset(const DatasetLayout& layout) {
  std::error_code ec;
  if (!fs::is_directory(layout.root, ec))
    throw Error(ErrorCode::IoFailure, "dataset root " + layout.root.string() + " is not a directory");

  auto matches = [](const std::string& name, const std::vector<std::string>& patterns) {
    return std::any_of(patterns.begin(), patterns.end(),
                       [&](const std::string& p) { return name.find(p) != std::string::npos; });
  };

  std::vector<fs::path> patients;
  for (const auto& entry : fs::directory_iterator(layout.root))
    if (entry.is_directory()) patients.push_back(entry.path());
  std::sort(patients.begin(), patients.end());

  std::vector<NrrdCase> cases;
  for (const auto& dir : patients) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".nrrd") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    NrrdCase c;
    c.patient_id = dir.filename().string();
    for (const auto& f : files) {
      std::string name = f.filename().string();
      if (layout.mask_available && matches(name, layout.mask_name_patterns)) {
        if (!c.mask) c.mask = f;
      } else if (matches(name, layout.image_name_patterns)) {
        if (c.image.empty()) c.image = f;
      }
    }
    if (!c.image.empty()) cases.push_back(std::move(c));
  }
  if (cases.empty()) throw Error(ErrorCode::EmptyDataset, "no NRRD images under " + layout.root.string());
  return cases;
}

}  // namespace radgate::catalog
