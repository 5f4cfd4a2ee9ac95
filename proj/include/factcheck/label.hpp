#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace factcheck {

/// Veracity classes. The numeric order is also the logit order and the
/// argmax tie-break order.
enum class Label : std::size_t { supports = 0, refutes = 1, nei = 2 };

inline constexpr std::size_t label_count = 3;
inline constexpr std::array<Label, label_count> all_labels{Label::supports, Label::refutes,
                                                           Label::nei};

[[nodiscard]] std::string_view to_string(Label label);
[[nodiscard]] Label parse_label(std::string_view text);

[[nodiscard]] constexpr std::size_t index_of(Label label) noexcept
{
    return static_cast<std::size_t>(label);
}

}  // namespace factcheck
