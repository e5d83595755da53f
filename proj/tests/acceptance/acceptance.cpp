// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "minority/cli.hpp"
#include "minority/engine.hpp"
#include "minority/kpr.hpp"
#include "minority/payoff.hpp"
#include "minority/solver.hpp"
#include "minority/stats.hpp"

using namespace minority;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
    return buf;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    double lo() const { return mean - 3.0 * se; }
    double hi() const { return mean + 3.0 * se; }
};

MeanSe mean_se(const std::vector<double>& x) {
    MeanSe r;
    for (double v : x) r.mean += v / static_cast<double>(x.size());
    double sq = 0.0;
    for (double v : x) sq += (v - r.mean) * (v - r.mean);
    r.se = std::sqrt(sq / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
    return r;
}

MeanSe eta_over_seeds(StrategyConfig c, int seeds, std::int64_t steps) {
    std::vector<double> eta;
    for (int s = 0; s < seeds; ++s) {
        c.seed = static_cast<std::uint64_t>(1000 + s);
        eta.push_back(inefficiency_eta(run(c, steps)));
    }
    return mean_se(eta);
}

// ---------------------------------------------------------------------------

Outcome table_reproduction() {
    const std::pair<int, double> table[] = {
        {1, 1.14619},  {2, 2.15592},  {3, 3.15942},  {4, 4.16121},   {5, 5.16229},
        {6, 6.16302},  {7, 7.16354},  {8, 8.16393},  {9, 9.16423},   {10, 10.16448},
        {20, 20.16557}, {30, 30.16594}, {40, 40.16612}, {50, 50.16623}};
    double worst = 0.0;
    int matched = 0;
    for (const auto& [d, published] : table) {
        const double lambda = solve_lambda(d);
        worst = std::max(worst, std::fabs(lambda - published));
        matched += std::fabs(std::round(lambda * 1e5) / 1e5 - published) < 1e-9 ? 1 : 0;
    }
    return {matched == 14, fmt("%g/14 rows equal after rounding to 5 decimals, max |lambda - published| = %.2e",
                               matched, worst)};
}

Outcome asymptote() {
    bool increasing = true;
    double previous = lambda_gap(1);
    for (int d = 2; d <= 100; ++d) {
        const double g = lambda_gap(d);
        increasing = increasing && g > previous;
        previous = g;
    }
    const double err = std::fabs(lambda_gap(500) - 1.0 / 6.0);
    return {increasing && err < 2e-4,
            std::string(increasing ? "gap increasing on [1,100]" : "gap NOT increasing") +
                fmt(", |gap(500) - 1/6| = %.3e (limit 2e-4)", err)};
}

Outcome cheat_proof() {
    double worst_majority = 0.0, min_minority = 1.0;
    for (int d = 1; d <= 100; ++d) {
        const NoCheatReport r = verify_no_cheat(d, solve_lambda(d), 1e-8);
        worst_majority = std::max(worst_majority, std::fabs(r.majority_margin));
        min_minority = std::min(min_minority, r.minority_margin);
    }
    return {worst_majority < 1e-8 && min_minority > 0.0,
            fmt("max |majority stay - switch| = %.2e (limit 1e-8), min minority margin = %.4f", worst_majority, min_minority)};
}

Outcome payoff_trend() {
    const auto rows = payoff_curve(50);
    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        monotone = monotone && rows[i].payoffs.minority_stay < rows[i - 1].payoffs.minority_stay &&
                   rows[i].payoffs.majority_stay > rows[i - 1].payoffs.majority_stay;
    bool sides = true;
    for (const auto& r : rows) sides = sides && r.payoffs.minority_stay > 0.5 && r.payoffs.majority_stay < 0.5;
    const auto& last = rows.back().payoffs;
    const bool close = std::fabs(last.minority_stay - 0.5) < 0.05 && std::fabs(last.majority_stay - 0.5) < 0.05;
    return {monotone && sides && close,
            fmt("minority_stay(50) = %.4f, majority_stay(50) = %.4f, monotone toward 1/2: ", last.minority_stay, last.majority_stay) +
                (monotone && sides ? "yes" : "no")};
}

Outcome marginal_infeasible() {
    const InfeasibilityReport r = infeasibility_scan(log_grid(0.05, 20.0, 50), 1e-4);
    return {r.points == 2500 && !r.feasible_found() && r.orderings_hold,
            fmt("%g points, joint roots = %g, min max-residual = %.4f, orderings ", static_cast<double>(r.points),
                static_cast<double>(r.joint_roots), r.min_joint_residual) +
                (r.orderings_hold ? "hold" : "VIOLATED")};
}

Outcome baseline_calibration() {
    StrategyConfig c;
    c.mode = Mode::random_baseline;
    c.seed = 6;
    const double eta = inefficiency_eta(run(c, 100000));
    return {std::fabs(eta - 1.0) <= 0.05, fmt("N=2001, 1e5 steps: eta = %.4f (target 1 +/- 0.05)", eta)};
}

Outcome efficiency() {
    StrategyConfig c;
    std::vector<MeanSe> at;
    bool below = true;
    double worst = 0.0;
    for (double eps : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}) {
        c.epsilon = eps;
        const MeanSe m = eta_over_seeds(c, 20, 10000);
        below = below && m.mean < 0.1;
        worst = std::max(worst, m.mean);
        if (eps == 0.3 || eps == 0.5 || eps == 0.7) at.push_back(m);
    }
    const bool ordered = at[0].hi() < at[1].lo() && at[1].hi() < at[2].lo();
    return {below && ordered,
            fmt("eta(0.3) = %.5f, eta(0.5) = %.5f, eta(0.7) = %.5f, max over eps<=0.7 = %.5f; 3-sigma bands ",
                at[0].mean, at[1].mean, at[2].mean, worst) +
                (ordered ? "disjoint" : "OVERLAP")};
}

Outcome fast_convergence() {
    StrategyConfig c;
    c.epsilon = 0.5;
    std::vector<double> medians, means;
    double median_2001 = 0.0, post_2001 = 0.0;
    for (std::int64_t n : {201, 2001, 20001}) {
        c.population = n;
        std::vector<double> episodes, post;
        for (int s = 0; s < 10; ++s) {
            c.seed = static_cast<std::uint64_t>(50 + s);
            const ConvergenceStats cs = convergence_time(run(c, 20000));
            for (auto e : cs.episodes) episodes.push_back(static_cast<double>(e));
            for (auto d : cs.post_reset_abs_delta) post.push_back(static_cast<double>(d));
        }
        medians.push_back(median_of(episodes));
        means.push_back(mean_se(episodes).mean);
        if (n == 2001) {
            median_2001 = medians.back();
            post_2001 = median_of(post);
        }
    }
    const double scale = std::pow(1000.0, 0.25);
    const bool order = post_2001 >= scale / 3.0 && post_2001 <= scale * 3.0;
    const bool quick = median_2001 <= 8.0;
    const bool monotone = medians[0] <= medians[1] && medians[1] <= medians[2] && means[0] < means[1] &&
                          means[1] < means[2];
    // Sub-logarithmic: the mean return time per unit ln N falls as N grows.
    const double l[] = {std::log(201.0), std::log(2001.0), std::log(20001.0)};
    const bool sublog = means[0] / l[0] > means[1] / l[1] && means[1] / l[1] > means[2] / l[2];
    return {order && quick && monotone && sublog,
            fmt("N=2001: post-reset median |delta| = %g vs M^(eps/2) = %.2f, median return = %g days; ", post_2001,
                scale, median_2001) +
                fmt("mean return over N = %.2f, %.2f, %.2f", means[0], means[1], means[2]) +
                (monotone ? " increasing" : " NOT increasing") + (sublog ? ", sub-log" : ", NOT sub-log")};
}

Outcome correlations() {
    StrategyConfig c;
    c.epsilon = 0.5;
    c.seed = 9;
    const auto acf = s_autocorrelation(run(c, 200000), 10);
    const double k = fit_decay_rate(acf, 1, 3);
    std::vector<double> c100;
    for (double eps : {0.3, 0.5, 0.7}) {
        c.epsilon = eps;
        c.seed = 10;
        c100.push_back(c_autocorrelation(run(c, 10000, true), 100).back());
    }
    const bool ordered = c100[0] > c100[1] && c100[1] > c100[2];
    const bool pass = std::fabs(acf[3]) < 0.05 && k >= 1.0 && k <= 4.0 && ordered;
    return {pass, fmt("|S acf(3)| = %.4f, K = %.3f; C(100) at eps 0.3/0.5/0.7 = %.3f/%.3f/", std::fabs(acf[3]), k,
                      c100[0], c100[1]) +
                      fmt("%.3f", c100[2]) + (ordered ? " (decreasing)" : " (NOT decreasing)")};
}

Outcome t_wait() {
    StrategyConfig c;
    c.epsilon = 0.5;
    const MeanSe t0 = eta_over_seeds(c, 20, 10000);
    c.wait_t = 10;
    const MeanSe t10 = eta_over_seeds(c, 20, 10000);
    const bool pass = t10.hi() < t0.lo();
    return {pass, fmt("eta(T=10) = %.5f +/- %.5f, eta(T=0) = %.5f +/- %.5f (3-sigma)", t10.mean, 3 * t10.se, t0.mean,
                      3 * t0.se)};
}

// Every agent dines at every rank exactly once in each N-day window.
bool fair_windows(KprState s, Rng& rng, std::int64_t windows) {
    const std::int64_t n = s.n;
    std::vector<std::vector<std::int64_t>> history;
    for (std::int64_t d = 0; d < (windows + 1) * n; ++d) {
        if (s.utilization() != 1.0) return false;
        history.push_back(s.served_rank);
        s = kpr_step(s, rng);
    }
    for (std::size_t start = 0; start + static_cast<std::size_t>(n) <= history.size(); ++start)
        for (std::int64_t a = 0; a < n; ++a) {
            std::vector<bool> seen(static_cast<std::size_t>(n), false);
            for (std::size_t d = start; d < start + static_cast<std::size_t>(n); ++d) {
                const auto r = history[d][static_cast<std::size_t>(a)];
                if (r < 1 || seen[static_cast<std::size_t>(r - 1)]) return false;
                seen[static_cast<std::size_t>(r - 1)] = true;
            }
        }
    return true;
}

Outcome kpr() {
    // N = 2: four equally likely first-day choices, two of them a permutation.
    // From any collision the served agent steps down onto the empty rank's
    // neighbor and the loser lands on the other rank, so day 1 always converges.
    int perms = 0;
    for (int a = 1; a <= 2; ++a)
        for (int b = 1; b <= 2; ++b) perms += a != b ? 1 : 0;
    const double exact0 = perms / 4.0;
    bool support = true;
    int day0 = 0;
    const int runs2 = 100000;
    Rng rng2 = make_stream(2, 11);
    for (int r = 0; r < runs2; ++r) {
        const KprRun out = kpr_run(2, 50, rng2);
        support = support && out.convergence_day && *out.convergence_day <= 1;
        day0 += out.convergence_day == 0 ? 1 : 0;
    }
    const double freq0 = static_cast<double>(day0) / runs2;
    const bool n2 = exact0 == 0.5 && support && std::fabs(freq0 - exact0) < 4.0 * std::sqrt(0.25 / runs2);

    bool fair = true, converged = true;
    std::vector<double> ns, means;
    for (std::int64_t n : {8, 16, 32, 64, 128, 256}) {
        double total = 0.0;
        for (int s = 0; s < 200; ++s) {
            Rng rng = make_stream(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(s));
            const KprRun out = kpr_run(n, 10000, rng);
            if (!out.convergence_day) {
                converged = false;
                continue;
            }
            total += static_cast<double>(*out.convergence_day);
            if (s < 5) fair = fair && fair_windows(out.final_state, rng, 3);
        }
        ns.push_back(std::log(static_cast<double>(n)));
        means.push_back(total / 200.0);
    }
    bool increasing = true, sublinear = true;
    for (std::size_t i = 1; i < means.size(); ++i) {
        increasing = increasing && means[i] > means[i - 1];
        sublinear = sublinear && means[i] < 2.0 * means[i - 1];
    }
    // Least-squares fit of mean convergence day against ln N.
    const MeanSe mx = mean_se(ns), my = mean_se(means);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        sxy += (ns[i] - mx.mean) * (means[i] - my.mean);
        sxx += (ns[i] - mx.mean) * (ns[i] - mx.mean);
        syy += (means[i] - my.mean) * (means[i] - my.mean);
    }
    const double r2 = sxy * sxy / (sxx * syy);
    const bool growth = converged && increasing && sublinear && r2 > 0.95;
    std::string list;
    for (double m : means) list += fmt("%.2f ", m);
    return {n2 && fair && growth,
            fmt("N=2 exact P(day 0) = %.2f, observed %.4f; ", exact0, freq0) + (fair ? "fair windows ok; " : "UNFAIR; ") +
                "mean day N=8..256: " + list + fmt("(R^2 vs ln N = %.4f)", r2)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / ("minority_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const std::vector<std::vector<std::string>> commands = {
        {"solve-lambda"},
        {"payoff-table"},
        {"simulate", "--seed", "7", "--stats"},
        {"simulate", "--seed", "7", "--mode", "baseline", "--steps", "2000"},
        {"sweep", "--seeds", "3", "--steps", "2000", "--epsilons", "0.3,0.7"},
        {"kpr", "--seeds", "20"}};
    std::size_t compared = 0;
    bool same = true;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        fs::path dirs[2];
        for (int k = 0; k < 2; ++k) {
            dirs[k] = root / (std::to_string(i) + (k == 0 ? "a" : "b"));
            auto args = commands[i];
            args.push_back("--out-dir");
            args.push_back(dirs[k].string());
            std::ostringstream out, err;
            if (cli::run(args, out, err) != cli::kExitOk) same = false;
        }
        for (const auto& entry : fs::directory_iterator(dirs[0])) {
            const fs::path twin = dirs[1] / entry.path().filename();
            same = same && fs::exists(twin) && slurp(entry.path()) == slurp(twin);
            ++compared;
        }
    }
    fs::remove_all(root);
    return {same && compared > 0, fmt("%g files across 6 invocations compared, ", static_cast<double>(compared)) +
                                      (same ? "all byte-identical" : "MISMATCH")};
}

}  // namespace

int main() {
    struct Criterion {
        std::string name;
        std::function<Outcome()> check;
        double time_limit;  // seconds, 0 for none
    };
    const std::vector<Criterion> criteria = {
        {"lambda table reproduction", table_reproduction, 1.0},
        {"lambda gap asymptote", asymptote, 5.0},
        {"cheat-proof payoffs", cheat_proof, 0.0},
        {"payoff curve trend", payoff_trend, 0.0},
        {"marginal-state infeasibility", marginal_infeasible, 0.0},
        {"random baseline calibration", baseline_calibration, 0.0},
        {"efficiency versus epsilon", efficiency, 60.0},
        {"fast convergence after reset", fast_convergence, 0.0},
        {"correlations", correlations, 0.0},
        {"waiting period", t_wait, 0.0},
        {"kolkata paise restaurant", kpr, 0.0},
        {"determinism", determinism, 0.0}};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criteria[i].time_limit > 0.0 && secs >= criteria[i].time_limit) {
            o.pass = false;
            o.detail += fmt(" (over the %.0fs limit)", criteria[i].time_limit);
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %2zu %s: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
