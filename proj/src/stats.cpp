#include "minority/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "minority/errors.hpp"

namespace minority {

namespace {

std::int64_t checked_start(const Trajectory& traj, std::int64_t burn_in) {
    if (burn_in < 0) throw UsageError("burn_in must be >= 0");
    if (traj.length() <= burn_in) throw UsageError("trajectory is empty after burn-in");
    return burn_in;
}

}  // namespace

double inefficiency_eta(const Trajectory& traj, std::int64_t burn_in) {
    const std::int64_t start = checked_start(traj, burn_in);
    // r - N/2 = (M - delta) - (M + 1/2) = -(delta + 1/2)
    double acc = 0.0;
    for (std::int64_t t = start; t < traj.length(); ++t) {
        const double d = static_cast<double>(traj.deltas[static_cast<std::size_t>(t)]) + 0.5;
        acc += d * d;
    }
    const auto n = static_cast<double>(traj.length() - start);
    return 4.0 / static_cast<double>(traj.population) * acc / n;
}

std::map<std::int64_t, double> delta_histogram(const Trajectory& traj, std::int64_t burn_in) {
    const std::int64_t start = checked_start(traj, burn_in);
    std::map<std::int64_t, std::int64_t> counts;
    for (std::int64_t t = start; t < traj.length(); ++t) ++counts[traj.deltas[static_cast<std::size_t>(t)]];
    const auto n = static_cast<double>(traj.length() - start);
    std::map<std::int64_t, double> hist;
    for (const auto& [d, c] : counts) hist.emplace(d, static_cast<double>(c) / n);
    return hist;
}

std::vector<double> s_autocorrelation(const Trajectory& traj, std::int64_t tau_max,
                                      std::int64_t burn_in) {
    const std::int64_t start = checked_start(traj, burn_in);
    if (tau_max < 0 || traj.length() - start <= tau_max)
        throw UsageError("s_autocorrelation: trajectory must be longer than tau_max");
    std::vector<double> acf(static_cast<std::size_t>(tau_max + 1));
    const auto& s = traj.minority_side;
    for (std::int64_t tau = 0; tau <= tau_max; ++tau) {
        std::int64_t acc = 0;
        for (std::int64_t t = start; t + tau < traj.length(); ++t)
            acc += s[static_cast<std::size_t>(t)] * s[static_cast<std::size_t>(t + tau)];
        acf[static_cast<std::size_t>(tau)] =
            static_cast<double>(acc) / static_cast<double>(traj.length() - start - tau);
    }
    return acf;
}

double fit_decay_rate(const std::vector<double>& acf, std::int64_t first, std::int64_t last) {
    if (first < 0 || last <= first || last >= static_cast<std::int64_t>(acf.size()))
        throw UsageError("fit_decay_rate: need 0 <= first < last < acf.size()");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(last - first + 1);
    for (std::int64_t tau = first; tau <= last; ++tau) {
        const double y = std::log(std::fabs(acf[static_cast<std::size_t>(tau)]));
        if (!std::isfinite(y)) throw NumericError("fit_decay_rate: zero autocorrelation at tau = " +
                                                  std::to_string(tau));
        const auto x = static_cast<double>(tau);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -slope;
}

std::vector<double> c_autocorrelation(const Trajectory& traj, std::int64_t tau_max,
                                      std::int64_t burn_in) {
    if (!traj.choices) throw UsageError("c_autocorrelation: trajectory has no choice record");
    const std::int64_t start = checked_start(traj, burn_in);
    const ChoiceRecord& rec = *traj.choices;
    if (tau_max < 0 || rec.days() - start <= tau_max)
        throw UsageError("c_autocorrelation: trajectory must be longer than tau_max");

    // A_i(t) A_i(t + tau) = +1 when the bits agree, so the population sum
    // is N - 2 * popcount(row_t xor row_{t+tau}).
    const auto n = static_cast<double>(rec.agents());
    std::vector<double> out(static_cast<std::size_t>(tau_max + 1));
    for (std::int64_t tau = 0; tau <= tau_max; ++tau) {
        std::int64_t differing = 0;
        for (std::int64_t t = start; t + tau < rec.days(); ++t) {
            const auto a = rec.row(t);
            const auto b = rec.row(t + tau);
            for (std::size_t w = 0; w < a.size(); ++w) differing += std::popcount(a[w] ^ b[w]);
        }
        const auto pairs = static_cast<double>(rec.days() - start - tau);
        out[static_cast<std::size_t>(tau)] = 1.0 - 2.0 * static_cast<double>(differing) / (n * pairs);
    }
    return out;
}

double median_of(std::vector<double> values) {
    if (values.empty()) throw UsageError("median_of: empty input");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

ConvergenceStats convergence_time(const Trajectory& traj) {
    if (traj.reset_days.empty()) throw UsageError("convergence_time: trajectory contains no reset");
    ConvergenceStats out;
    for (std::int64_t day : traj.reset_days) {
        if (day + 1 < traj.length())
            out.post_reset_abs_delta.push_back(std::abs(traj.deltas[static_cast<std::size_t>(day + 1)]));
        for (std::int64_t t = day + 1; t < traj.length(); ++t) {
            if (excess_of(traj.deltas[static_cast<std::size_t>(t)]) == 0) {
                out.episodes.push_back(t - day);
                break;
            }
        }
    }
    if (out.episodes.empty()) return out;
    double sum = 0.0;
    std::vector<double> values;
    values.reserve(out.episodes.size());
    for (std::int64_t e : out.episodes) {
        sum += static_cast<double>(e);
        values.push_back(static_cast<double>(e));
        out.max = std::max(out.max, e);
    }
    out.mean = sum / static_cast<double>(out.episodes.size());
    out.median = median_of(std::move(values));
    return out;
}

StatsSummary summarize(const Trajectory& traj, std::int64_t tau_max, std::int64_t burn_in) {
    StatsSummary s;
    s.burn_in = burn_in;
    s.steps_used = traj.length() - burn_in;
    s.eta = inefficiency_eta(traj, burn_in);
    s.delta_hist = delta_histogram(traj, burn_in);
    s.s_autocorr = s_autocorrelation(traj, tau_max, burn_in);
    if (traj.choices) s.c_autocorr = c_autocorrelation(traj, tau_max, burn_in);
    if (!traj.reset_days.empty()) s.convergence_days = convergence_time(traj).episodes;
    return s;
}

}  // namespace minority
