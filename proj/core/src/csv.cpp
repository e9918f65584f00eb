#include "radgate/csv.hpp"

#include <algorithm>

namespace radgate {

long CsvDocument::column(std::string_view name) const {
  auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<long>(it - header.begin());
}

CsvDocument parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string cell;
  bool in_quotes = false;
  bool row_has_content = false;

  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF)
    text.remove_prefix(3);

  auto end_record = [&] {
    record.push_back(std::move(cell));
    cell.clear();
    if (row_has_content || record.size() > 1 || !record.front().empty())
      records.push_back(std::move(record));
    record.clear();
    row_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cell.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_content = true;
        break;
      case ',':
        record.push_back(std::move(cell));
        cell.clear();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        cell.push_back(c);
        row_has_content = true;
    }
  }
  if (row_has_content || !cell.empty()) end_record();

  CsvDocument doc;
  if (records.empty()) return doc;
  doc.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& row = records[r];
    if (row.size() < doc.header.size()) row.resize(doc.header.size());
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_.push_back(',');
    const auto& c = cells[i];
    if (c.find_first_of(",\"\n\r") == std::string::npos) {
      out_ += c;
      continue;
    }
    out_.push_back('"');
    for (char ch : c) {
      if (ch == '"') out_.push_back('"');
      out_.push_back(ch);
    }
    out_.push_back('"');
  }
  out_.push_back('\n');
}

}  // namespace radgate
