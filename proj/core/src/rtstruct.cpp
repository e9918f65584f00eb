#include "radgate/rtstruct.hpp"

#include <map>

#include "radgate/error.hpp"

namespace radgate::dicom {

namespace {

std::string referenced_series(const DataSet& ds) {
  const Element* frames = ds.find(tags::ReferencedFrameOfReferenceSequence);
  if (!frames) return {};
  for (const auto& frame : frames->items) {
    const Element* studies = frame.find(tags::RtReferencedStudySequence);
    if (!studies) continue;
    for (const auto& study : studies->items) {
      const Element* series = study.find(tags::RtReferencedSeriesSequence);
      if (!series) continue;
      for (const auto& s : series->items)
        if (auto uid = find_text(s, tags::SeriesInstanceUid)) return *uid;
    }
  }
  return {};
}

}  // namespace

std::vector<ContourSet> parse_rtstruct(const DicomObject& obj) {
  const DataSet& ds = obj.dataset;
  if (get_text(ds, tags::Modality) != "RTSTRUCT")
    throw Error(ErrorCode::NotRtStruct, "modality is " + get_text(ds, tags::Modality));

  std::map<long long, std::string> names;
  if (const Element* rois = ds.find(tags::StructureSetRoiSequence)) {
    for (const auto& roi : rois->items) {
      auto number = find_integer(roi, tags::RoiNumber);
      if (number) names[*number] = find_text(roi, tags::RoiName).value_or("");
    }
  }

  const Element* contours = ds.find(tags::RoiContourSequence);
  if (!contours || contours->items.empty())
    throw Error(ErrorCode::NoContours, "ROIContourSequence absent or empty");

  std::string series = referenced_series(ds);
  std::vector<ContourSet> out;
  for (const auto& roi : contours->items) {
    ContourSet set;
    set.referenced_series_uid = series;
    auto number = find_integer(roi, tags::ReferencedRoiNumber);
    if (number) {
      auto it = names.find(*number);
      set.roi_name = it != names.end() ? it->second : "ROI-" + std::to_string(*number);
    }
    if (const Element* seq = roi.find(tags::ContourSequence)) {
      for (const auto& contour : seq->items) {
        auto data = find_decimals(contour, tags::ContourData);
        if (!data) continue;
        if (data->size() % 3 != 0)
          throw Error(ErrorCode::OddContourData, "ContourData of ROI '" + set.roi_name + "' has " +
                                                     std::to_string(data->size()) + " values");
        Polygon polygon;
        for (std::size_t i = 0; i + 2 < data->size(); i += 3)
          polygon.push_back({(*data)[i], (*data)[i + 1], (*data)[i + 2]});
        if (polygon.size() >= 3) set.planar_contours.push_back(std::move(polygon));
      }
    }
    out.push_back(std::move(set));
  }
  return out;
}

}  // namespace radgate::dicom
