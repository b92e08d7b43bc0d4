#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace ppmf {

inline constexpr std::size_t kNumDynamic = 36;
inline constexpr std::size_t kNumStatic = 4;
inline constexpr std::size_t kNumVariables = kNumDynamic + kNumStatic;

// Canonical variable order: the 36 time-series variables (table order, read
// column by column), then Age, Gender, Height, Weight. Every per-variable
// vector in the library (weights, scaling stats, filter scores) uses it.
extern const std::array<std::string_view, kNumVariables> kVariableNames;

inline constexpr std::size_t kAgeIndex = kNumDynamic + 0;
inline constexpr std::size_t kGenderIndex = kNumDynamic + 1;
inline constexpr std::size_t kHeightIndex = kNumDynamic + 2;
inline constexpr std::size_t kWeightIndex = kNumDynamic + 3;

std::optional<std::size_t> variable_index(std::string_view name) noexcept;

inline constexpr bool is_static(std::size_t variable) noexcept { return variable >= kNumDynamic; }

}  // namespace ppmf
