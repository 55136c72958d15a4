#pragma once

#include <string>
#include <vector>

namespace mdlinfer {

// Splits one CSV record. Double-quoted fields may contain commas and doubled
// quotes; fields never span lines. Surrounding whitespace of unquoted fields
// is trimmed (data files written by hand tend to pad after commas).
std::vector<std::string> split_csv_line(const std::string& line);

// Renders a field, quoting it when it contains a comma, quote, or newline.
std::string csv_field(const std::string& raw);

}  // namespace mdlinfer
