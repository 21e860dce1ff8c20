#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nile/calendar.hpp"

namespace nile {

enum class InflowMode { DeterministicTrace, StochasticLognormal };

struct InflowModel {
    std::string name;
    MonthlyValues monthly_mean{};  // m^3/s
    MonthlyValues monthly_cv{};
    InflowMode mode = InflowMode::StochasticLognormal;
    std::vector<double> trace;  // m^3/s, one value per month from the episode start

    void validate() const;
};

/// Monthly inflow volumes (m^3/month) for `horizon` months starting at
/// `start_month`.
///
/// Trace mode converts the stored trace to volumes. Lognormal mode draws
/// independent monthly flows whose mean and coefficient of variation match the
/// calendar month; `sample_noise = false` returns the monthly means instead.
/// The sequence is a pure function of (model, horizon, start_month, seed).
std::vector<double> generate_inflows(const InflowModel& model, std::size_t horizon,
                                     std::uint64_t seed, int start_month = 1,
                                     bool sample_noise = true);

/// Reads a trace CSV with header `month_index,flow_m3s`. Rows must be ordered by
/// month_index starting at 0.
std::vector<double> read_inflow_trace(const std::string& path);

}  // namespace nile
