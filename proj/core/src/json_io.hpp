#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

namespace hsc::detail {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// FNV-1a 64-bit, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

json parse_json(std::string_view text, const std::string& source_name);

template <typename T>
T get_field(const json& object, const char* key, const std::string& source_name);

}  // namespace hsc::detail

#include "json_io_inl.hpp"
