#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tracecf::detail {

/// RFC-4180-style CSV: quoted fields may contain commas, quotes ("" escape)
/// and newlines. Lines starting with '#' outside any record are comments.
std::vector<std::vector<std::string>> parse_csv_text(std::string_view text);

std::string csv_quote(std::string_view field);
std::string csv_join(const std::vector<std::string>& fields);

}  // namespace tracecf::detail
