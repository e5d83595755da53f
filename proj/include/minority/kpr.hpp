#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "minority/dist.hpp"

namespace minority {

/// Kolkata Paise Restaurant: N agents, N single-serving restaurants ranked 1..N.
/// Ranks are 1-based; rank 0 in served_rank means "not served".
struct KprState {
    std::int64_t n = 0;
    std::int64_t day = 0;
    std::vector<std::int64_t> position;     // rank visited today, per agent
    std::vector<std::int64_t> served_rank;  // rank served at today, 0 if unserved
    std::vector<std::int64_t> served_by;    // agent served, per restaurant (index rank - 1), -1 if none

    bool is_permutation() const;
    std::int64_t served_count() const;
    double utilization() const { return static_cast<double>(served_count()) / static_cast<double>(n); }
};

/// Resolves today's service for the given arrivals. At each restaurant an
/// arrival served yesterday at the next-higher rank (k + 1, wrapping N + 1 to 1)
/// takes priority; otherwise one arrival is chosen uniformly.
KprState kpr_resolve(std::vector<std::int64_t> position,
                     const std::vector<std::int64_t>& yesterday_served_rank, Rng& rng,
                     std::int64_t day = 0);

/// Uniform independent restaurant choices on day 0, no priorities.
KprState kpr_init(std::int64_t n, Rng& rng);

/// Served agents step from rank k to k - 1 (1 wraps to N); unserved agents pick
/// a restaurant that had no customer today, rank k', and step to k' - 1.
KprState kpr_step(const KprState& state, Rng& rng);

struct KprRun {
    std::optional<std::int64_t> convergence_day;
    std::vector<double> utilization;  // one entry per simulated day, day 0 included
    KprState final_state;
};

/// Steps from kpr_init until positions form a permutation or max_steps days pass.
KprRun kpr_run(std::int64_t n, std::int64_t max_steps, Rng& rng);

}  // namespace minority
