#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "minority/dist.hpp"
#include "minority/errors.hpp"
#include "minority/payoff.hpp"
#include "minority/solver.hpp"

using namespace minority;

TEST_CASE("expected_payoffs at the delta = 1 root") {
    const PayoffQuadruple q = expected_payoffs(1, 1.14619);
    CHECK(std::fabs(q.minority_stay - 0.6821) < 5e-4);
    CHECK(std::fabs(q.minority_switch - 0.1091) < 5e-4);
    CHECK(std::fabs(q.majority_stay - 0.3179) < 5e-4);
    CHECK(std::fabs(q.majority_switch - 0.3178) < 5e-4);
    // 40-digit closed-form references.
    CHECK(std::fabs(q.minority_stay - 0.6821567404088056) < 1e-12);
    CHECK(std::fabs(q.minority_switch - 0.1090582843723409) < 1e-12);
    CHECK(std::fabs(q.majority_stay - 0.3178432595911944) < 1e-12);
    CHECK(std::fabs(q.majority_switch - 0.3178454565573437) < 1e-12);
}

TEST_CASE("expected_payoffs with vanishing switch rate") {
    const PayoffQuadruple q = expected_payoffs(3, 1e-9);
    CHECK(q.minority_stay == doctest::Approx(1.0));
    CHECK(q.majority_switch == doctest::Approx(1.0));
    CHECK(q.minority_switch < 1e-30);
    CHECK(q.majority_stay < 1e-25);
}

TEST_CASE("expected_payoffs approach one half for large delta") {
    const PayoffQuadruple q = expected_payoffs(50, 50.16623);
    for (double v : {q.minority_stay, q.minority_switch, q.majority_stay, q.majority_switch}) CHECK(std::fabs(v - 0.5) < 0.1);
    CHECK(std::fabs(q.minority_stay - 0.5) < 0.05);
    CHECK(std::fabs(q.majority_stay - 0.5) < 0.05);
    CHECK_THROWS_AS(expected_payoffs(0, 1.0), DomainError);
}

TEST_CASE("verify_no_cheat") {
    CHECK(verify_no_cheat(1, 1.14619, 1e-4).holds);
    CHECK(verify_no_cheat(3, 3.15942, 1e-4).holds);

    const NoCheatReport off = verify_no_cheat(1, 2.0, 1e-4);
    CHECK_FALSE(off.holds);
    CHECK(off.majority_margin > 0.0);
}

TEST_CASE("solved lambda makes the majority indifferent and the minority loyal") {
    for (std::int64_t d = 1; d <= 100; ++d) {
        const double lambda = solve_lambda(d);
        const PayoffQuadruple q = expected_payoffs(d, lambda);
        const NoCheatReport r = verify_no_cheat(d, lambda, 1e-8);
        CAPTURE(d);
        CHECK(r.holds);
        CHECK(std::fabs(r.majority_margin) < 1e-8);
        CHECK(r.minority_margin > 0.0);
        CHECK(q.minority_stay + q.majority_stay == 1.0);
        for (double v : {q.minority_stay, q.minority_switch, q.majority_stay, q.majority_switch}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("delta0_cross_probs symmetry for identical means") {
    const CrossProbabilities c = delta0_cross_probs(1.0, 1.0);
    double tie = 0.0;
    for (std::int64_t k = 0; k <= poisson_truncation(1.0); ++k) tie += std::pow(poisson_pmf(k, 1.0), 2);
    CHECK(std::fabs(c.a_at_least_b - 0.5 * (1.0 + tie)) < 1e-10);
}

TEST_CASE("delta0_cross_probs orderings and ranges") {
    Rng rng = make_stream(5);
    std::uniform_real_distribution<double> mean(0.05, 20.0);
    for (int i = 0; i < 200; ++i) {
        const double la = mean(rng), lb = mean(rng);
        const CrossProbabilities c = delta0_cross_probs(la, lb);
        CAPTURE(la);
        CAPTURE(lb);
        CHECK(c.a_below_b_minus2 < c.a_below_b_minus1);
        CHECK(c.a_above_b < c.a_at_least_b);
        for (double v : {c.a_below_b_minus2, c.a_at_least_b, c.a_below_b_minus1, c.a_above_b}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        // Differences of nested events are point masses of r'' - r'.
        double tie = 0.0, gap2 = 0.0;
        for (std::int64_t k = 0; k <= poisson_truncation(std::max(la, lb)); ++k) {
            tie += poisson_pmf(k, la) * poisson_pmf(k, lb);
            gap2 += poisson_pmf(k, la) * poisson_pmf(k + 2, lb);
        }
        CHECK(std::fabs((c.a_at_least_b - c.a_above_b) - tie) < 1e-12);
        CHECK(std::fabs((c.a_below_b_minus1 - c.a_below_b_minus2) - gap2) < 1e-12);
        CHECK(std::fabs((c.majority_residual() - c.minority_residual()) - (tie + gap2)) < 1e-12);
    }
}

TEST_CASE("delta0_cross_probs against Monte Carlo") {
    // Independent sampler from the standard library.
    std::mt19937_64 gen(12345);
    std::poisson_distribution<int> draw(1.0);
    const int samples = 10000000;
    int hits = 0;
    for (int i = 0; i < samples; ++i) {
        const int a = draw(gen);
        const int b = draw(gen);
        hits += a < b - 1;
    }
    const double p_hat = static_cast<double>(hits) / samples;
    const double p = delta0_cross_probs(1.0, 1.0).a_below_b_minus1;
    CHECK(std::fabs(p - p_hat) < 4.0 * std::sqrt(p * (1 - p) / samples));
}

TEST_CASE("infeasibility_scan finds no joint root") {
    const auto grid = log_grid(0.05, 20.0, 50);
    REQUIRE(grid.size() == 2500);
    for (const auto& [a, b] : grid) {
        CHECK(a > 0.05);
        CHECK(b <= 20.0);
    }
    const InfeasibilityReport r = infeasibility_scan(grid, 1e-4);
    CHECK(r.points == 2500);
    CHECK_FALSE(r.feasible_found());
    CHECK(r.orderings_hold);
    CHECK(r.min_joint_residual > 1e-4);

    const CrossProbabilities one = delta0_cross_probs(1.0, 1.0);
    CHECK((one.minority_residual() != 0.0 || one.majority_residual() != 0.0));
    CHECK_THROWS_AS(infeasibility_scan({}, 1e-4), DomainError);
    CHECK_THROWS_AS(infeasibility_scan({{25.0, 1.0}}, 1e-4), DomainError);
}

TEST_CASE("minority residual is negative along the majority-residual zero curve") {
    for (double la : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        // Majority residual increases in lambda_b: bisect for its zero.
        double lo = 1e-6, hi = 60.0;
        REQUIRE(delta0_cross_probs(la, lo).majority_residual() < 0.0);
        REQUIRE(delta0_cross_probs(la, hi).majority_residual() > 0.0);
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            (delta0_cross_probs(la, mid).majority_residual() < 0.0 ? lo : hi) = mid;
        }
        const CrossProbabilities c = delta0_cross_probs(la, 0.5 * (lo + hi));
        CAPTURE(la);
        CHECK(std::fabs(c.majority_residual()) < 1e-10);
        CHECK(c.minority_residual() < 0.0);
        CHECK(c.minority_residual() < -1e-4);
    }
}

TEST_CASE("payoff_curve") {
    const auto rows = payoff_curve(50);
    REQUIRE(rows.size() == 50);
    CHECK(std::fabs(rows[0].payoffs.minority_stay - 0.6821) < 5e-4);
    CHECK(std::fabs(rows[0].payoffs.majority_stay - 0.3179) < 5e-4);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].payoffs.minority_stay < rows[i - 1].payoffs.minority_stay);
        CHECK(rows[i].payoffs.majority_stay > rows[i - 1].payoffs.majority_stay);
        CHECK(rows[i].payoffs.minority_stay > 0.5);
        CHECK(rows[i].payoffs.majority_stay < 0.5);
    }
    CHECK(std::fabs(rows.back().payoffs.minority_stay - 0.5) < 0.05);
    CHECK(std::fabs(rows.back().payoffs.majority_stay - 0.5) < 0.05);
    CHECK_THROWS_AS(payoff_curve(0), DomainError);
}
