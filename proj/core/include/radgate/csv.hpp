#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace radgate {

/// A parsed CSV document: header row plus data rows. Rows shorter than the
/// header are padded with empty cells.
struct CsvDocument {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by header name, or -1.
  long column(std::string_view name) const;
};

CsvDocument parse_csv(std::string_view text);

/// Writes comma-separated rows with LF endings; cells containing a comma,
/// quote or newline are quoted.
class CsvWriter {
 public:
  void row(const std::vector<std::string>& cells);
  const std::string& str() const noexcept { return out_; }

 private:
  std::string out_;
};

}  // namespace radgate
