#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radgate/slice_meta.hpp"

namespace radgate::catalog {

namespace fs = std::filesystem;

enum class DataFormat { Dicom, Nrrd };

struct DatasetLayout {
  fs::path root;
  DataFormat data_format = DataFormat::Dicom;
  bool mask_available = true;
  std::vector<std::string> mask_name_patterns{"mask"};
  std::vector<std::string> image_name_patterns{"image"};
};

/// One image series of one patient. File paths are relative to the dataset
/// root so catalogs are independent of where the dataset lives.
struct SeriesRecord {
  std::string patient_id;         // report id, suffixed when a patient has several series
  std::string source_patient_id;  // PatientID as stored
  std::string series_uid;
  std::string modality;
  std::vector<dicom::SliceMeta> slices;  // sorted along the slice normal
  std::vector<fs::path> slice_paths;     // parallel to slices
  std::vector<fs::path> rtstruct_paths;
  std::vector<dicom::SliceMeta> rtstructs;  // parallel to rtstruct_paths
};

struct RejectedSeries {
  std::string patient_id;
  std::string series_uid;
  std::string reason;
};

struct FileIssue {
  fs::path path;
  std::string reason;
};

struct ScanResult {
  fs::path root;
  std::vector<SeriesRecord> records;  // sorted by patient id, then series uid
  std::vector<RejectedSeries> rejected;
  std::vector<FileIssue> issues;
};

/// Walks the root recursively and groups DICOM files into series records.
/// Throws EmptyDataset when no DICOM object is found. Series violating the
/// record geometry invariants are moved to `rejected`.
ScanResult scan_dataset(const DatasetLayout& layout, unsigned jobs = 1);

/// Checks the SeriesRecord invariants; returns a reason when violated.
std::optional<std::string> series_geometry_violation(const SeriesRecord& record);

enum class DescribeMode { Default, Ct };

struct MetadataTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

MetadataTable describe(std::span<const SeriesRecord> records, DescribeMode mode);

/// A converted (image, mask) pair found in an NRRD dataset tree.
struct NrrdCase {
  std::string patient_id;
  fs::path image;
  std::optional<fs::path> mask;
};

/// Expects root/<patient>/<files>.nrrd; picks the first file (by name)
/// matching an image pattern and one matching a mask pattern. Patterns are
/// filename substrings; mask patterns are tested first.
std::vector<NrrdCase> scan_nrrd_dataset(const DatasetLayout& layout);

}  // namespace radgate::catalog
