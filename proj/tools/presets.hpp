#pragma once

// Built-in experiment presets compiled from presets/*.json.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blochwalk_presets_data.hpp"

namespace blochwalk::presets {

inline std::optional<std::string_view> find(std::string_view name) {
  for (const auto& [key, text] : data::entries)
    if (key == name) return text;
  return std::nullopt;
}

inline std::vector<std::string> names() {
  std::vector<std::string> out;
  for (const auto& entry : data::entries) out.emplace_back(entry.first);
  return out;
}

}  // namespace blochwalk::presets
