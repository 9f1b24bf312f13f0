#pragma once

#include <span>
#include <string_view>

namespace dispersive::detail {

struct PresetEntry {
    std::string_view name;
    std::string_view text;
};

// Generated at build time from presets/*.json.
std::span<const PresetEntry> bundled_presets();

} // namespace dispersive::detail
