#pragma once

#include "lapmap/interval_map.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace lapmap {

// Text map format:
//
//   # comment
//   interval <a> <b>
//   breakpoints: <d_0>, <d_1>, ...
//   values: <v_0>, <v_1>, ...
//
// Scalars are `p/q` rationals or decimal literals (read exactly).

RationalMap parse_map(std::string_view text);
std::string format_map(const RationalMap& f, std::string_view comment = {});

RationalMap read_map_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace lapmap
