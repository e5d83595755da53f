#pragma once

#include <cstdint>
#include <random>

namespace minority {

/// Random stream type used throughout. Every run owns its own instance.
using Rng = std::mt19937_64;

/// Independent stream for run `index` under `master_seed`.
Rng make_stream(std::uint64_t master_seed, std::uint64_t index = 0);

enum class CountKind { poisson, binomial };

struct CountDistributionSpec {
    CountKind kind = CountKind::poisson;
    double lambda = 0.0;
    std::int64_t n = 0;
    double p = 0.0;

    /// Throws DomainError when the parameters are outside their ranges.
    void validate() const;
    double pmf(std::int64_t r) const;
    double cdf(std::int64_t r) const;
};

/// Last index kept when a Poisson sum over r is truncated: ceil(mean + 12 sqrt(mean) + 20).
/// The discarded mass is below 1e-12.
std::int64_t poisson_truncation(double mean);

/// Saddle-point (Stirling error + deviance) log-space evaluation; finite for lambda up to 1e6 and beyond.
double log_poisson_pmf(std::int64_t r, double lambda);
double poisson_pmf(std::int64_t r, double lambda);
/// P(X <= r).
double poisson_cdf(std::int64_t r, double lambda);
/// P(X > r), evaluated directly in the upper tail rather than as 1 - cdf.
double poisson_sf(std::int64_t r, double lambda);

double binomial_pmf(std::int64_t r, std::int64_t n, double p);
/// P(X <= r) for X ~ Bin(n, p).
double binomial_cdf(std::int64_t r, std::int64_t n, double p);
/// P(X > r) for X ~ Bin(n, p).
double binomial_sf(std::int64_t r, std::int64_t n, double p);

std::int64_t sample_binomial(std::int64_t n, double p, Rng& rng);

}  // namespace minority
