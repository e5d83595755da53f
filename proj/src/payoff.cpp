#include "minority/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "minority/dist.hpp"
#include "minority/errors.hpp"
#include "minority/solver.hpp"

namespace minority {

PayoffQuadruple expected_payoffs(std::int64_t delta, double lambda) {
    if (delta <= 0) throw DomainError("expected_payoffs: delta must be >= 1");
    if (!(lambda > 0.0)) throw DomainError("expected_payoffs: lambda must be > 0");

    PayoffQuadruple out;
    // The minority agent wins by staying iff at most delta majority agents come over,
    // and by switching iff at least delta + 2 do.
    out.minority_stay = poisson_cdf(delta, lambda);
    out.minority_switch = poisson_sf(delta + 1, lambda);
    // The majority agent wins by staying iff more than delta of the others leave,
    // and by switching iff fewer than delta do.
    // Complement of minority_stay so the two sides partition the outcomes exactly.
    out.majority_stay = 1.0 - out.minority_stay;
    out.majority_switch = poisson_cdf(delta - 1, lambda);
    return out;
}

NoCheatReport verify_no_cheat(std::int64_t delta, double lambda, double tol) {
    const PayoffQuadruple q = expected_payoffs(delta, lambda);
    NoCheatReport report;
    report.majority_margin = q.majority_stay - q.majority_switch;
    report.minority_margin = q.minority_stay - q.minority_switch;
    report.holds = std::fabs(report.majority_margin) < tol && report.minority_margin >= -tol;
    return report;
}

CrossProbabilities delta0_cross_probs(double lambda_a, double lambda_b) {
    if (!(lambda_a > 0.0) || !(lambda_b > 0.0))
        throw DomainError("delta0_cross_probs: both means must be > 0");

    // Outer sum over r'' on its truncated support, inner r' sums as Poisson cdfs.
    CrossProbabilities out;
    const std::int64_t last = poisson_truncation(lambda_b);
    for (std::int64_t rb = 0; rb <= last; ++rb) {
        const double w = poisson_pmf(rb, lambda_b);
        if (w == 0.0) continue;
        if (rb >= 3) out.a_below_b_minus2 += w * poisson_cdf(rb - 3, lambda_a);
        if (rb >= 2) out.a_below_b_minus1 += w * poisson_cdf(rb - 2, lambda_a);
        out.a_at_least_b += w * (rb == 0 ? 1.0 : poisson_sf(rb - 1, lambda_a));
        out.a_above_b += w * poisson_sf(rb, lambda_a);
    }
    return out;
}

InfeasibilityReport infeasibility_scan(const std::vector<std::pair<double, double>>& grid, double tol) {
    if (grid.empty()) throw DomainError("infeasibility_scan: empty grid");
    InfeasibilityReport report;
    report.min_joint_residual = std::numeric_limits<double>::infinity();
    for (const auto& [la, lb] : grid) {
        if (!(la > 0.0 && la <= 20.0 && lb > 0.0 && lb <= 20.0))
            throw DomainError("infeasibility_scan: grid means must lie in (0, 20]");
        const CrossProbabilities c = delta0_cross_probs(la, lb);
        const double r14 = std::fabs(c.minority_residual());
        const double r15 = std::fabs(c.majority_residual());
        const double joint = std::max(r14, r15);
        if (joint < report.min_joint_residual) {
            report.min_joint_residual = joint;
            report.argmin = {la, lb};
        }
        if (r14 < tol && r15 < tol) ++report.joint_roots;
        if (!(c.a_below_b_minus2 < c.a_below_b_minus1) || !(c.a_at_least_b > c.a_above_b))
            report.orderings_hold = false;
        ++report.points;
    }
    return report;
}

std::vector<std::pair<double, double>> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 1) throw DomainError("log_grid: need 0 < lo < hi, n >= 1");
    std::vector<double> axis(n);
    const double step = std::log(hi / lo) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) axis[i] = lo * std::exp(step * static_cast<double>(i + 1));
    axis.back() = hi;
    std::vector<std::pair<double, double>> grid;
    grid.reserve(n * n);
    for (double a : axis)
        for (double b : axis) grid.emplace_back(a, b);
    return grid;
}

std::vector<PayoffRow> payoff_curve(std::int64_t delta_max) {
    if (delta_max < 1) throw DomainError("payoff_curve: delta_max must be >= 1");
    std::vector<PayoffRow> rows;
    rows.reserve(static_cast<std::size_t>(delta_max));
    for (std::int64_t d = 1; d <= delta_max; ++d) {
        const double lambda = solve_lambda(d);
        rows.push_back({d, lambda, expected_payoffs(d, lambda)});
    }
    return rows;
}

}  // namespace minority
