#pragma once

#include "hsc/error.hpp"

namespace hsc::detail {

template <typename T>
T get_field(const json& object, const char* key, const std::string& source_name) {
  auto it = object.find(key);
  if (it == object.end()) throw ParseError(source_name + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ParseError(source_name + ": field '" + key + "': " + e.what());
  }
}

}  // namespace hsc::detail
