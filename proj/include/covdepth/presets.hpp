#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "covdepth/channel.hpp"

namespace covdepth {

// Fitted channel parameters from sequencing runs at 10/30/60 amplification
// cycles. "-sample" rows are the direct dataset fits, "-pop" rows the MLE
// population estimates. Both are shipped because downstream numbers
// reproduce differently under each; pick explicitly.
struct ChannelPreset {
    std::string_view name;
    LogNormalParams params;
};

inline constexpr std::array<ChannelPreset, 6> kChannelPresets{{
    {"pcr10-sample", {-9.71, 0.86}},
    {"pcr10-pop", {-9.72, 0.74}},
    {"pcr30-sample", {-9.91, 0.98}},
    {"pcr30-pop", {-9.86, 0.96}},
    {"pcr60-sample", {-10.38, 1.11}},
    {"pcr60-pop", {-10.25, 1.38}},
}};

inline std::optional<LogNormalParams> preset_params(std::string_view name) {
    for (const auto& preset : kChannelPresets)
        if (preset.name == name) return preset.params;
    return std::nullopt;
}

inline std::string preset_names_joined() {
    std::string out;
    for (const auto& preset : kChannelPresets) {
        if (!out.empty()) out += ", ";
        out += preset.name;
    }
    return out;
}

}  // namespace covdepth
