#include <algorithm>
#include <array>

#include "radgate/dicom.hpp"

namespace radgate::dicom {

namespace {

struct DictEntry {
  std::uint32_t key;
  std::string_view vr;
};

// Sorted by key. Only the attributes this toolkit reads.
constexpr std::array<DictEntry, 60> kDictionary{{
    {0x00020001, "OB"}, {0x00020002, "UI"}, {0x00020003, "UI"}, {0x00020010, "UI"},
    {0x00020012, "UI"}, {0x00020013, "SH"}, {0x00080005, "CS"}, {0x00080008, "CS"},
    {0x00080016, "UI"}, {0x00080018, "UI"}, {0x00080020, "DA"}, {0x00080021, "DA"},
    {0x00080030, "TM"}, {0x00080060, "CS"}, {0x00080070, "LO"}, {0x0008103E, "LO"},
    {0x00081150, "UI"}, {0x00081155, "UI"}, {0x00100010, "PN"}, {0x00100020, "LO"},
    {0x00180050, "DS"}, {0x00180060, "DS"}, {0x00181150, "IS"}, {0x00181151, "IS"},
    {0x00181152, "IS"}, {0x00181210, "SH"}, {0x0020000D, "UI"}, {0x0020000E, "UI"},
    {0x00200011, "IS"}, {0x00200013, "IS"}, {0x00200032, "DS"}, {0x00200037, "DS"},
    {0x00200052, "UI"}, {0x00201041, "DS"}, {0x00280002, "US"}, {0x00280004, "CS"},
    {0x00280010, "US"}, {0x00280011, "US"}, {0x00280030, "DS"}, {0x00280100, "US"},
    {0x00280101, "US"}, {0x00280102, "US"}, {0x00280103, "US"}, {0x00281052, "DS"},
    {0x00281053, "DS"}, {0x30060002, "SH"}, {0x30060010, "SQ"}, {0x30060012, "SQ"},
    {0x30060014, "SQ"}, {0x30060016, "SQ"}, {0x30060020, "SQ"}, {0x30060022, "IS"},
    {0x30060024, "UI"}, {0x30060026, "LO"}, {0x30060039, "SQ"}, {0x30060040, "SQ"},
    {0x30060042, "CS"}, {0x30060046, "IS"}, {0x30060050, "DS"}, {0x30060084, "IS"},
}};

constexpr bool dictionary_sorted() {
  for (std::size_t i = 1; i < kDictionary.size(); ++i)
    if (kDictionary[i - 1].key >= kDictionary[i].key) return false;
  return true;
}

}  // namespace

std::optional<std::string_view> dictionary_vr(DicomTag tag) {
  static_assert(dictionary_sorted());
  if (tag.element == 0x0000) return "UL";  // group length
  if (tag == tags::PixelData) return "OW";
  auto it = std::lower_bound(kDictionary.begin(), kDictionary.end(), tag.key(),
                             [](const DictEntry& e, std::uint32_t k) { return e.key < k; });
  if (it == kDictionary.end() || it->key != tag.key()) return std::nullopt;
  return it->vr;
}

}  // namespace radgate::dicom
