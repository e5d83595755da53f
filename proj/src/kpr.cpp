#include "minority/kpr.hpp"

#include <stdexcept>

#include "minority/errors.hpp"

namespace minority {

namespace {

std::int64_t pick(std::int64_t size, Rng& rng) {
    std::uniform_int_distribution<std::int64_t> d(0, size - 1);
    return d(rng);
}

std::int64_t rank_below(std::int64_t rank, std::int64_t n) {
    return rank == 1 ? n : rank - 1;
}

std::int64_t rank_above(std::int64_t rank, std::int64_t n) {
    return rank == n ? 1 : rank + 1;
}

}  // namespace

bool KprState::is_permutation() const {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (std::int64_t r : position) {
        auto&& slot = seen[static_cast<std::size_t>(r - 1)];
        if (slot) return false;
        slot = true;
    }
    return true;
}

std::int64_t KprState::served_count() const {
    std::int64_t c = 0;
    for (std::int64_t a : served_by) c += a >= 0 ? 1 : 0;
    return c;
}

KprState kpr_resolve(std::vector<std::int64_t> position,
                     const std::vector<std::int64_t>& yesterday_served_rank, Rng& rng,
                     std::int64_t day) {
    const auto n = static_cast<std::int64_t>(position.size());
    if (n < 1) throw DomainError("kpr: need at least one agent");
    if (!yesterday_served_rank.empty() && static_cast<std::int64_t>(yesterday_served_rank.size()) != n)
        throw DomainError("kpr: yesterday_served_rank must be empty or have one entry per agent");

    std::vector<std::vector<std::int64_t>> arrivals(static_cast<std::size_t>(n));
    for (std::int64_t a = 0; a < n; ++a) {
        const std::int64_t r = position[static_cast<std::size_t>(a)];
        if (r < 1 || r > n) throw DomainError("kpr: rank out of range");
        arrivals[static_cast<std::size_t>(r - 1)].push_back(a);
    }

    KprState s;
    s.n = n;
    s.day = day;
    s.position = std::move(position);
    s.served_rank.assign(static_cast<std::size_t>(n), 0);
    s.served_by.assign(static_cast<std::size_t>(n), -1);

    for (std::int64_t rank = 1; rank <= n; ++rank) {
        const auto& here = arrivals[static_cast<std::size_t>(rank - 1)];
        if (here.empty()) continue;

        std::int64_t chosen = -1;
        if (!yesterday_served_rank.empty()) {
            const std::int64_t priority_rank = rank_above(rank, n);
            for (std::int64_t a : here) {
                if (yesterday_served_rank[static_cast<std::size_t>(a)] != priority_rank) continue;
                // One restaurant served one agent yesterday, so at most one can claim priority.
                if (chosen >= 0) throw std::logic_error("kpr: two arrivals claim the same priority");
                chosen = a;
            }
        }
        if (chosen < 0) {
            chosen = here.size() == 1 ? here.front()
                                      : here[static_cast<std::size_t>(pick(static_cast<std::int64_t>(here.size()), rng))];
        }
        s.served_by[static_cast<std::size_t>(rank - 1)] = chosen;
        s.served_rank[static_cast<std::size_t>(chosen)] = rank;
    }
    return s;
}

KprState kpr_init(std::int64_t n, Rng& rng) {
    if (n < 1) throw DomainError("kpr: need at least one agent");
    std::vector<std::int64_t> position(static_cast<std::size_t>(n));
    for (auto& r : position) r = pick(n, rng) + 1;
    return kpr_resolve(std::move(position), {}, rng, 0);
}

KprState kpr_step(const KprState& state, Rng& rng) {
    const std::int64_t n = state.n;

    std::vector<std::int64_t> empty;
    std::vector<bool> occupied(static_cast<std::size_t>(n), false);
    for (std::int64_t r : state.position) occupied[static_cast<std::size_t>(r - 1)] = true;
    for (std::int64_t rank = 1; rank <= n; ++rank)
        if (!occupied[static_cast<std::size_t>(rank - 1)]) empty.push_back(rank);

    std::vector<std::int64_t> next(static_cast<std::size_t>(n));
    for (std::int64_t a = 0; a < n; ++a) {
        const std::int64_t served = state.served_rank[static_cast<std::size_t>(a)];
        if (served > 0) {
            next[static_cast<std::size_t>(a)] = rank_below(served, n);
            continue;
        }
        // An unserved agent implies an empty restaurant (N agents, N restaurants).
        if (empty.empty()) throw std::logic_error("kpr: unserved agent but no empty restaurant");
        const std::int64_t target = empty[static_cast<std::size_t>(pick(static_cast<std::int64_t>(empty.size()), rng))];
        next[static_cast<std::size_t>(a)] = rank_below(target, n);
    }
    return kpr_resolve(std::move(next), state.served_rank, rng, state.day + 1);
}

KprRun kpr_run(std::int64_t n, std::int64_t max_steps, Rng& rng) {
    if (max_steps < 0) throw DomainError("kpr_run: max_steps must be >= 0");
    KprRun out;
    out.final_state = kpr_init(n, rng);
    out.utilization.push_back(out.final_state.utilization());
    for (std::int64_t t = 0;; ++t) {
        if (out.final_state.is_permutation()) {
            out.convergence_day = out.final_state.day;
            break;
        }
        if (t >= max_steps) break;
        out.final_state = kpr_step(out.final_state, rng);
        out.utilization.push_back(out.final_state.utilization());
    }
    return out;
}

}  // namespace minority
