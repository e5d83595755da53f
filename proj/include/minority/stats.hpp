#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "minority/engine.hpp"

namespace minority {

/// (4/N) * mean_t (r_t - N/2)^2 with r_t = attendance at A, over days [burn_in, end).
double inefficiency_eta(const Trajectory& traj, std::int64_t burn_in = 0);

/// Normalized frequency of each signed delta over days [burn_in, end).
std::map<std::int64_t, double> delta_histogram(const Trajectory& traj, std::int64_t burn_in = 0);

/// <S(t) S(t + tau)> for tau = 0..tau_max, time-averaged.
std::vector<double> s_autocorrelation(const Trajectory& traj, std::int64_t tau_max,
                                      std::int64_t burn_in = 0);

/// Decay rate K of |acf(tau)| ~ exp(-K tau) from a least-squares line through
/// log|acf| at tau = first..last.
double fit_decay_rate(const std::vector<double>& acf, std::int64_t first = 1, std::int64_t last = 3);

/// C(tau) = (1/N) sum_i <A_i(t) A_i(t + tau)> with A_i = +1 at restaurant A.
/// Throws UsageError when the trajectory has no choice record.
std::vector<double> c_autocorrelation(const Trajectory& traj, std::int64_t tau_max,
                                      std::int64_t burn_in = 0);

struct ConvergenceStats {
    /// For each completed reset episode, days from the triggering marginal day
    /// until the excess is zero again.
    std::vector<std::int64_t> episodes;
    /// |delta| on the first day after each reset.
    std::vector<std::int64_t> post_reset_abs_delta;
    double mean = 0.0;
    double median = 0.0;
    std::int64_t max = 0;
};

/// Throws UsageError when the trajectory contains no reset.
ConvergenceStats convergence_time(const Trajectory& traj);

/// Excess e for a signed delta: delta for delta >= 0, |delta| - 1 otherwise.
constexpr std::int64_t excess_of(std::int64_t delta) noexcept {
    return delta >= 0 ? delta : -delta - 1;
}

double median_of(std::vector<double> values);

struct StatsSummary {
    double eta = 0.0;
    std::map<std::int64_t, double> delta_hist;
    std::vector<double> s_autocorr;
    std::vector<double> c_autocorr;  // empty without a choice record
    std::vector<std::int64_t> convergence_days;
    std::int64_t steps_used = 0;
    std::int64_t burn_in = 0;
};

StatsSummary summarize(const Trajectory& traj, std::int64_t tau_max, std::int64_t burn_in = 0);

}  // namespace minority
