#pragma once

#include <cstdint>
#include <vector>

namespace minority {

inline constexpr double kDefaultSolverTolerance = 1e-10;
/// Large-excess limit of lambda(delta) - delta.
inline constexpr double kAsymptoteGap = 1.0 / 6.0;

/// Cheat-proofness residual in the Poisson limit:
///   f(lambda) = 2 P(r <= delta - 1) - 1 + P(r = delta),  r ~ Poisson(lambda).
/// Strictly decreasing in lambda; its zero is the switch rate that leaves a
/// majority agent indifferent between staying and switching.
double indifference_residual(double lambda, std::int64_t delta);

/// Root of indifference_residual(., delta) by bisection, |residual| < tolerance.
double solve_lambda(std::int64_t delta, double tolerance = kDefaultSolverTolerance);

/// solve_lambda(delta) - delta. Approaches 1/6 from below.
double lambda_gap(std::int64_t delta, double tolerance = kDefaultSolverTolerance);

/// Finite-population residual for per-agent switch probability p:
///   P(r > delta) - P(r < delta),  r ~ Bin(M + delta, p).
/// Increasing in p.
double finite_residual(double p, std::int64_t delta, std::int64_t half_size);

/// Root in (0, 1) of finite_residual(., delta, half_size); half_size is M = (N - 1) / 2.
double solve_p_finite(std::int64_t delta, std::int64_t half_size,
                      double tolerance = kDefaultSolverTolerance);

/// ceil(3 sqrt(N)) + 10: beyond this excess the asymptote delta + 1/6 is used.
std::int64_t default_delta_max(std::int64_t population);

/// Solved lambda(delta) for delta = 1..delta_max, read-only once built.
class LambdaTable {
public:
    static LambdaTable build(std::int64_t delta_max, double tolerance = kDefaultSolverTolerance);

    /// Tabulated root for delta <= delta_max, delta + 1/6 beyond. delta must be >= 1.
    double lambda(std::int64_t delta) const;

    std::int64_t delta_max() const noexcept { return static_cast<std::int64_t>(entries_.size()); }
    double tolerance() const noexcept { return tolerance_; }
    double asymptote_gap() const noexcept { return kAsymptoteGap; }
    /// entries()[d - 1] is lambda(d).
    const std::vector<double>& entries() const noexcept { return entries_; }

private:
    LambdaTable(std::vector<double> entries, double tolerance)
        : entries_(std::move(entries)), tolerance_(tolerance) {}

    std::vector<double> entries_;
    double tolerance_;
};

}  // namespace minority
