#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace minority {

/// Next-day expected payoffs when every other agent follows the strategy,
/// in the large-population (Poisson) limit, for an agent who sat in today's
/// minority and one who sat in the majority of size M + delta + 1.
struct PayoffQuadruple {
    double minority_stay = 0.0;
    double minority_switch = 0.0;
    double majority_stay = 0.0;
    double majority_switch = 0.0;
};

PayoffQuadruple expected_payoffs(std::int64_t delta, double lambda);

struct NoCheatReport {
    bool holds = false;
    /// majority_stay - majority_switch; zero at the cheat-proof lambda.
    double majority_margin = 0.0;
    /// minority_stay - minority_switch; must not be negative.
    double minority_margin = 0.0;
};

NoCheatReport verify_no_cheat(std::int64_t delta, double lambda, double tol);

/// The four event probabilities entering the marginal-state (delta = 0) conditions,
/// for independent r' ~ Poisson(lambda_a) leaving A and r'' ~ Poisson(lambda_b) leaving B.
struct CrossProbabilities {
    double a_below_b_minus2 = 0.0;  // P(r' < r'' - 2)
    double a_at_least_b = 0.0;      // P(r' >= r'')
    double a_below_b_minus1 = 0.0;  // P(r' < r'' - 1)
    double a_above_b = 0.0;         // P(r' >= r'' + 1)

    /// Minority-side condition: P(r' < r'' - 2) - P(r' >= r'').
    double minority_residual() const { return a_below_b_minus2 - a_at_least_b; }
    /// Majority-side condition: P(r' < r'' - 1) - P(r' >= r'' + 1).
    double majority_residual() const { return a_below_b_minus1 - a_above_b; }
};

CrossProbabilities delta0_cross_probs(double lambda_a, double lambda_b);

struct InfeasibilityReport {
    std::size_t points = 0;
    /// min over the grid of max(|minority_residual|, |majority_residual|).
    double min_joint_residual = 0.0;
    std::pair<double, double> argmin{0.0, 0.0};
    /// Grid points where both residuals fall below tol.
    std::size_t joint_roots = 0;
    /// Every point satisfied P(r'<r''-2) < P(r'<r''-1) and P(r'>=r'') > P(r'>=r''+1).
    bool orderings_hold = true;

    bool feasible_found() const { return joint_roots > 0; }
};

InfeasibilityReport infeasibility_scan(const std::vector<std::pair<double, double>>& grid, double tol);

/// n x n grid; each axis holds n log-spaced points on (lo, hi], lo itself excluded.
std::vector<std::pair<double, double>> log_grid(double lo, double hi, std::size_t n);

struct PayoffRow {
    std::int64_t delta = 0;
    double lambda = 0.0;
    PayoffQuadruple payoffs;
};

/// One row per delta in 1..delta_max at the solved cheat-proof lambda.
std::vector<PayoffRow> payoff_curve(std::int64_t delta_max);

}  // namespace minority
