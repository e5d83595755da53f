#include "minority/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "minority/errors.hpp"

namespace minority {

namespace {

// Geometric-tail stopping rule for monotone term sequences: the remaining mass
// is bounded by t * q / (1 - q) when successive terms shrink by at most q.
constexpr double kRelStop = 1e-17;

bool tail_negligible(double term, double ratio, double sum) {
    if (ratio >= 1.0) return false;
    return term * ratio / (1.0 - ratio) <= kRelStop * sum;
}

// Saddle-point pmf kernels (Loader, "Fast and accurate computation of
// binomial probabilities", 2000). log pmf = -stirlerr - bd0 terms - log sqrt(2 pi x),
// which keeps ~1e-15 relative accuracy where lgamma differences lose digits.
constexpr double kLnSqrt2Pi = 0.918938533204672741780329736406;

// lgamma(n + 1) - (n + 1/2) log n + n - log sqrt(2 pi)
double stirlerr(double n) {
    constexpr double s0 = 1.0 / 12.0;
    constexpr double s1 = 1.0 / 360.0;
    constexpr double s2 = 1.0 / 1260.0;
    constexpr double s3 = 1.0 / 1680.0;
    constexpr double s4 = 1.0 / 1188.0;
    if (n <= 15.0) return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - kLnSqrt2Pi;
    const double nn = n * n;
    if (n > 500) return (s0 - s1 / nn) / n;
    if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
    if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// x log(x / np) + np - x, without cancellation when x is close to np.
double bd0(double x, double np) {
    if (std::fabs(x - np) < 0.1 * (x + np)) {
        const double v = (x - np) / (x + np);
        double s = (x - np) * v;
        double ej = 2.0 * x * v;
        const double v2 = v * v;
        for (int j = 1; j < 1000; ++j) {
            ej *= v2;
            const double s1 = s + ej / (2 * j + 1);
            if (s1 == s) return s1;
            s = s1;
        }
        return s;
    }
    return x * std::log(x / np) + np - x;
}

void check_poisson(std::int64_t r, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw DomainError("poisson: lambda must be finite and >= 0");
    if (r < 0) throw DomainError("poisson: r must be >= 0");
}

void check_binomial(std::int64_t n, double p) {
    if (n < 0) throw DomainError("binomial: n must be >= 0");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial: p must lie in [0, 1]");
}

// Sum of pmf(k) for k = r down to 0, assuming r <= lambda so the terms decrease.
double poisson_sum_down(std::int64_t r, double lambda) {
    double term = poisson_pmf(r, lambda);
    double sum = term;
    for (std::int64_t k = r; k > 0; --k) {
        const double ratio = static_cast<double>(k) / lambda;
        term *= ratio;
        sum += term;
        if (tail_negligible(term, static_cast<double>(k - 1) / lambda, sum)) break;
    }
    return sum;
}

// Sum of pmf(k) for k >= s, assuming s > lambda so the terms decrease.
double poisson_sum_up(std::int64_t s, double lambda) {
    double term = poisson_pmf(s, lambda);
    double sum = term;
    if (term == 0.0) return 0.0;
    for (std::int64_t k = s;; ++k) {
        const double ratio = lambda / static_cast<double>(k + 1);
        term *= ratio;
        sum += term;
        if (tail_negligible(term, lambda / static_cast<double>(k + 2), sum)) break;
    }
    return sum;
}

double binomial_sum_down(std::int64_t r, std::int64_t n, double p) {
    const double odds = (1.0 - p) / p;
    double term = binomial_pmf(r, n, p);
    double sum = term;
    for (std::int64_t k = r; k > 0; --k) {
        term *= static_cast<double>(k) / static_cast<double>(n - k + 1) * odds;
        sum += term;
        const double next = static_cast<double>(k - 1) / static_cast<double>(n - k + 2) * odds;
        if (tail_negligible(term, next, sum)) break;
    }
    return sum;
}

double binomial_sum_up(std::int64_t s, std::int64_t n, double p) {
    const double odds = p / (1.0 - p);
    double term = binomial_pmf(s, n, p);
    double sum = term;
    for (std::int64_t k = s; k < n; ++k) {
        term *= static_cast<double>(n - k) / static_cast<double>(k + 1) * odds;
        sum += term;
        const double next = static_cast<double>(n - k - 1) / static_cast<double>(k + 2) * odds;
        if (tail_negligible(term, next, sum)) break;
    }
    return sum;
}

}  // namespace

Rng make_stream(std::uint64_t master_seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

void CountDistributionSpec::validate() const {
    switch (kind) {
    case CountKind::poisson:
        check_poisson(0, lambda);
        break;
    case CountKind::binomial:
        check_binomial(n, p);
        break;
    }
}

double CountDistributionSpec::pmf(std::int64_t r) const {
    validate();
    if (kind == CountKind::poisson) return poisson_pmf(r, lambda);
    if (r < 0 || r > n) return 0.0;
    return binomial_pmf(r, n, p);
}

double CountDistributionSpec::cdf(std::int64_t r) const {
    validate();
    if (kind == CountKind::poisson) return poisson_cdf(r, lambda);
    if (r < 0) return 0.0;
    return binomial_cdf(std::min(r, n), n, p);
}

std::int64_t poisson_truncation(double mean) {
    return static_cast<std::int64_t>(std::ceil(mean + 12.0 * std::sqrt(mean) + 20.0));
}

double log_poisson_pmf(std::int64_t r, double lambda) {
    check_poisson(r, lambda);
    if (lambda == 0.0) return r == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (r == 0) return -lambda;
    const auto x = static_cast<double>(r);
    return -stirlerr(x) - bd0(x, lambda) - kLnSqrt2Pi - 0.5 * std::log(x);
}

double poisson_pmf(std::int64_t r, double lambda) {
    return std::exp(log_poisson_pmf(r, lambda));
}

double poisson_cdf(std::int64_t r, double lambda) {
    check_poisson(r, lambda);
    if (lambda == 0.0) return 1.0;
    if (static_cast<double>(r) <= lambda) return std::min(1.0, poisson_sum_down(r, lambda));
    return std::clamp(1.0 - poisson_sum_up(r + 1, lambda), 0.0, 1.0);
}

double poisson_sf(std::int64_t r, double lambda) {
    check_poisson(r, lambda);
    if (lambda == 0.0) return 0.0;
    if (static_cast<double>(r + 1) > lambda) return std::min(1.0, poisson_sum_up(r + 1, lambda));
    return std::clamp(1.0 - poisson_sum_down(r, lambda), 0.0, 1.0);
}

double binomial_pmf(std::int64_t r, std::int64_t n, double p) {
    check_binomial(n, p);
    if (r < 0 || r > n) throw DomainError("binomial_pmf: need 0 <= r <= n");
    if (p == 0.0) return r == 0 ? 1.0 : 0.0;
    if (p == 1.0) return r == n ? 1.0 : 0.0;
    const auto nd = static_cast<double>(n);
    const auto x = static_cast<double>(r);
    const double q = 1.0 - p;
    if (r == 0) return std::exp(nd * std::log1p(-p));
    if (r == n) return std::exp(nd * std::log(p));
    const double lc = stirlerr(nd) - stirlerr(x) - stirlerr(nd - x) - bd0(x, nd * p) - bd0(nd - x, nd * q);
    return std::exp(lc - kLnSqrt2Pi - 0.5 * std::log(x * (nd - x) / nd));
}

double binomial_cdf(std::int64_t r, std::int64_t n, double p) {
    check_binomial(n, p);
    if (r < 0) return 0.0;
    if (r >= n) return 1.0;
    if (p == 0.0) return 1.0;
    if (p == 1.0) return 0.0;
    if (static_cast<double>(r) <= static_cast<double>(n) * p)
        return std::min(1.0, binomial_sum_down(r, n, p));
    return std::clamp(1.0 - binomial_sum_up(r + 1, n, p), 0.0, 1.0);
}

double binomial_sf(std::int64_t r, std::int64_t n, double p) {
    check_binomial(n, p);
    if (r < 0) return 1.0;
    if (r >= n) return 0.0;
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    if (static_cast<double>(r + 1) > static_cast<double>(n) * p)
        return std::min(1.0, binomial_sum_up(r + 1, n, p));
    return std::clamp(1.0 - binomial_sum_down(r, n, p), 0.0, 1.0);
}

std::int64_t sample_binomial(std::int64_t n, double p, Rng& rng) {
    check_binomial(n, p);
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    std::binomial_distribution<std::int64_t> draw(n, p);
    return draw(rng);
}

}  // namespace minority
