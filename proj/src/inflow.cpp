#include "nile/inflow.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "nile/error.hpp"

namespace nile {

void InflowModel::validate() const {
    for (double m : monthly_mean) {
        if (!(m > 0.0)) throw ConfigError(fmt::format("inflow '{}': monthly means must be positive", name));
    }
    for (double cv : monthly_cv) {
        if (!(cv >= 0.0)) throw ConfigError(fmt::format("inflow '{}': coefficients of variation must be >= 0", name));
    }
    if (mode == InflowMode::DeterministicTrace) {
        if (trace.empty()) throw ConfigError(fmt::format("inflow '{}': trace mode requires a trace", name));
        for (double q : trace) {
            if (!(q >= 0.0)) throw ConfigError(fmt::format("inflow '{}': trace flows must be >= 0", name));
        }
    }
}

std::vector<double> generate_inflows(const InflowModel& model, std::size_t horizon,
                                     std::uint64_t seed, int start_month, bool sample_noise) {
    if (horizon < 1) throw UsageError("generate_inflows: horizon must be >= 1");

    std::vector<double> out(horizon);
    if (model.mode == InflowMode::DeterministicTrace) {
        if (model.trace.size() < horizon) {
            throw ConfigError(fmt::format("inflow '{}': trace has {} months, episode needs {}", model.name,
                                          model.trace.size(), horizon));
        }
        for (std::size_t t = 0; t < horizon; ++t) {
            out[t] = model.trace[t] * seconds_in_month(month_at(start_month, t));
        }
        return out;
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t t = 0; t < horizon; ++t) {
        const int month = month_at(start_month, t);
        const auto m = static_cast<std::size_t>(month - 1);
        const double mean = model.monthly_mean[m];
        const double cv = model.monthly_cv[m];
        double flow = mean;
        // Draw unconditionally so the stream position does not depend on the cv values.
        const double z = normal(rng);
        if (sample_noise && cv > 0.0) {
            const double sigma2 = std::log1p(cv * cv);
            flow = std::exp(std::log(mean) - 0.5 * sigma2 + std::sqrt(sigma2) * z);
        }
        out[t] = flow * seconds_in_month(month);
    }
    return out;
}

std::vector<double> read_inflow_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open inflow trace '{}'", path));
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(fmt::format("inflow trace '{}' is empty", path));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "month_index,flow_m3s") {
        throw ConfigError(fmt::format("inflow trace '{}': expected header 'month_index,flow_m3s'", path));
    }
    std::vector<double> trace;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string idx, flow;
        if (!std::getline(fields, idx, ',') || !std::getline(fields, flow)) {
            throw ConfigError(fmt::format("inflow trace '{}': malformed row {}", path, row + 1));
        }
        try {
            if (std::stoul(idx) != row) {
                throw ConfigError(fmt::format("inflow trace '{}': month_index {} out of order", path, idx));
            }
            trace.push_back(std::stod(flow));
        } catch (const std::logic_error&) {
            throw ConfigError(fmt::format("inflow trace '{}': malformed row {}", path, row + 1));
        }
        ++row;
    }
    return trace;
}

}  // namespace nile
