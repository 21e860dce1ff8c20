#pragma once

#include <array>
#include <cstddef>

namespace nile {

inline constexpr int kMonthsPerYear = 12;

using MonthlyValues = std::array<double, kMonthsPerYear>;

/// Seconds in calendar month `month` (1..12) of a non-leap year.
double seconds_in_month(int month);

/// Calendar month (1..12) reached `t` months after `start_month`.
int month_at(int start_month, std::size_t t);

}  // namespace nile
