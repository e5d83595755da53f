#include "minority/solver.hpp"

#include <cmath>
#include <string>

#include "minority/dist.hpp"
#include "minority/errors.hpp"

namespace minority {

namespace {

constexpr int kMaxBisections = 4000;

// Bisection for a decreasing (sign = -1) or increasing (sign = +1) function
// with a verified sign change on [lo, hi].
template <class F>
double bisect(F&& f, double lo, double hi, double tolerance, int sign, const char* what) {
    for (int it = 0; it < kMaxBisections; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double value = f(mid);
        if (std::fabs(value) < tolerance) return mid;
        if (mid <= lo || mid >= hi) {
            throw NumericError(std::string(what) + ": bracket collapsed before residual reached " +
                               std::to_string(tolerance));
        }
        if ((value > 0.0) == (sign < 0)) lo = mid;
        else hi = mid;
    }
    throw NumericError(std::string(what) + ": bisection did not converge");
}

}  // namespace

double indifference_residual(double lambda, std::int64_t delta) {
    if (delta <= 0) throw DomainError("indifference_residual: delta must be >= 1");
    if (!(lambda > 0.0)) throw DomainError("indifference_residual: lambda must be > 0");
    return 2.0 * poisson_cdf(delta - 1, lambda) - 1.0 + poisson_pmf(delta, lambda);
}

double solve_lambda(std::int64_t delta, double tolerance) {
    if (delta <= 0) throw DomainError("solve_lambda: delta must be >= 1");
    if (!(tolerance > 0.0)) throw DomainError("solve_lambda: tolerance must be > 0");

    const auto d = static_cast<double>(delta);
    auto f = [delta](double lambda) { return indifference_residual(lambda, delta); };

    double lo = d;
    double hi = d + 1.0;
    if (!(f(lo) > 0.0 && f(hi) < 0.0)) {
        lo = 0.5 * d;
        hi = d + 2.0;
        if (!(f(lo) > 0.0 && f(hi) < 0.0))
            throw NumericError("solve_lambda: no sign change for delta = " + std::to_string(delta));
    }
    return bisect(f, lo, hi, tolerance, -1, "solve_lambda");
}

double lambda_gap(std::int64_t delta, double tolerance) {
    return solve_lambda(delta, tolerance) - static_cast<double>(delta);
}

double finite_residual(double p, std::int64_t delta, std::int64_t half_size) {
    if (delta <= 0) throw DomainError("finite_residual: delta must be >= 1");
    if (half_size < 1 || delta > half_size)
        throw DomainError("finite_residual: need 1 <= delta <= M");
    const std::int64_t trials = half_size + delta;
    return binomial_sf(delta, trials, p) - binomial_cdf(delta - 1, trials, p);
}

double solve_p_finite(std::int64_t delta, std::int64_t half_size, double tolerance) {
    if (delta <= 0) throw DomainError("solve_p_finite: delta must be >= 1");
    if (half_size < 1 || delta > half_size)
        throw DomainError("solve_p_finite: need 1 <= delta <= M");
    if (!(tolerance > 0.0)) throw DomainError("solve_p_finite: tolerance must be > 0");

    auto g = [delta, half_size](double p) { return finite_residual(p, delta, half_size); };
    // g(0) = -1 and g(1) = +1 since M + delta > delta.
    return bisect(g, 0.0, 1.0, tolerance, +1, "solve_p_finite");
}

std::int64_t default_delta_max(std::int64_t population) {
    return static_cast<std::int64_t>(std::ceil(3.0 * std::sqrt(static_cast<double>(population)))) + 10;
}

LambdaTable LambdaTable::build(std::int64_t delta_max, double tolerance) {
    if (delta_max < 1) throw DomainError("LambdaTable: delta_max must be >= 1");
    std::vector<double> entries;
    entries.reserve(static_cast<std::size_t>(delta_max));
    for (std::int64_t d = 1; d <= delta_max; ++d) entries.push_back(solve_lambda(d, tolerance));
    return LambdaTable(std::move(entries), tolerance);
}

double LambdaTable::lambda(std::int64_t delta) const {
    if (delta <= 0) throw DomainError("LambdaTable: delta must be >= 1");
    if (delta <= delta_max()) return entries_[static_cast<std::size_t>(delta - 1)];
    return static_cast<double>(delta) + kAsymptoteGap;
}

}  // namespace minority
