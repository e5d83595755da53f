#include "minority/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_set>

#include "minority/errors.hpp"
#include "minority/solver.hpp"

namespace minority {

namespace {

// k distinct indices from [0, pool), uniformly (Floyd's algorithm).
std::vector<std::int64_t> sample_indices(std::int64_t pool, std::int64_t k, Rng& rng) {
    std::vector<std::int64_t> picked;
    picked.reserve(static_cast<std::size_t>(k));
    std::unordered_set<std::int64_t> seen;
    seen.reserve(static_cast<std::size_t>(k) * 2);
    for (std::int64_t j = pool - k; j < pool; ++j) {
        std::uniform_int_distribution<std::int64_t> pick(0, j);
        std::int64_t t = pick(rng);
        if (!seen.insert(t).second) {
            t = j;
            seen.insert(t);
        }
        picked.push_back(t);
    }
    return picked;
}

std::vector<Side> coin_flips(std::int64_t n, Rng& rng) {
    std::vector<Side> out(static_cast<std::size_t>(n));
    std::uint64_t word = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        if (i % 64 == 0) word = rng();
        out[static_cast<std::size_t>(i)] = (word & 1u) ? Side::A : Side::B;
        word >>= 1;
    }
    return out;
}

}  // namespace

std::string to_string(Mode m) {
    return m == Mode::strategy ? "strategy" : "baseline";
}

std::string to_string(LambdaSource s) {
    return s == LambdaSource::poisson_limit ? "poisson" : "finite-m";
}

Mode parse_mode(const std::string& text) {
    if (text == "strategy") return Mode::strategy;
    if (text == "baseline" || text == "random-baseline") return Mode::random_baseline;
    throw ConfigError("mode", "expected 'strategy' or 'baseline', got '" + text + "'");
}

LambdaSource parse_lambda_source(const std::string& text) {
    if (text == "poisson") return LambdaSource::poisson_limit;
    if (text == "finite-m") return LambdaSource::finite_m;
    throw ConfigError("lambda_source", "expected 'poisson' or 'finite-m', got '" + text + "'");
}

void StrategyConfig::validate() const {
    if (population < 1 || population % 2 == 0)
        throw ConfigError("n", "population must be a positive odd integer, got " +
                                   std::to_string(population));
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw ConfigError("epsilon", "must lie in [0, 1], got " + std::to_string(epsilon));
    if (wait_t < 0) throw ConfigError("wait_t", "must be >= 0");
    if (!(reset_prefactor > 0.0) || !std::isfinite(reset_prefactor))
        throw ConfigError("reset_prefactor", "must be a positive finite number");
    if (delta_max < 0) throw ConfigError("delta_max", "must be >= 0 (0 selects the default)");
    if (half_size() >= 1 &&
        reset_prefactor * std::pow(static_cast<double>(half_size()), epsilon - 1.0) > 1.0)
        throw ConfigError("reset_prefactor", "reset probability prefactor * M^(epsilon-1) exceeds 1");
}

std::int64_t StrategyConfig::resolved_delta_max() const {
    return delta_max > 0 ? delta_max : default_delta_max(population);
}

double StrategyConfig::reset_probability() const {
    const std::int64_t m = half_size();
    if (m == 0) return 1.0;
    return reset_prefactor * std::pow(static_cast<double>(m), epsilon - 1.0);
}

PopulationState::PopulationState(std::vector<Side> choices) {
    assign(std::move(choices));
}

void PopulationState::assign(std::vector<Side> choices) {
    if (choices.empty() || choices.size() % 2 == 0)
        throw ConfigError("n", "population must be a positive odd integer");
    choices_ = std::move(choices);
    rebuild();
}

void PopulationState::rebuild() {
    members_[0].clear();
    members_[1].clear();
    slot_.resize(choices_.size());
    for (std::size_t i = 0; i < choices_.size(); ++i) {
        auto& list = members_[static_cast<int>(choices_[i])];
        slot_[i] = static_cast<std::int32_t>(list.size());
        list.push_back(static_cast<std::int32_t>(i));
    }
}

void PopulationState::flip(std::int64_t agent) {
    const auto i = static_cast<std::size_t>(agent);
    const Side from = choices_[i];
    auto& src = members_[static_cast<int>(from)];
    auto& dst = members_[static_cast<int>(other(from))];

    const auto pos = static_cast<std::size_t>(slot_[i]);
    const std::int32_t moved = src.back();
    src[pos] = moved;
    slot_[static_cast<std::size_t>(moved)] = static_cast<std::int32_t>(pos);
    src.pop_back();

    slot_[i] = static_cast<std::int32_t>(dst.size());
    dst.push_back(static_cast<std::int32_t>(agent));
    choices_[i] = other(from);
}

Classification classify(const PopulationState& state) {
    Classification c;
    c.delta = state.delta();
    const std::int64_t m = state.half_size();
    if (c.delta >= 0) {
        c.majority = Side::B;
        c.majority_count = m + c.delta + 1;
        c.excess = c.delta;
    } else {
        c.majority = Side::A;
        c.majority_count = m - c.delta;
        c.excess = -c.delta - 1;
    }
    return c;
}

PopulationState init_population(const StrategyConfig& config, Rng& rng) {
    if (config.population < 1 || config.population % 2 == 0)
        throw ConfigError("n", "population must be a positive odd integer, got " +
                                   std::to_string(config.population));
    return PopulationState(coin_flips(config.population, rng));
}

Dynamics::Dynamics(StrategyConfig config) : config_(config) {
    config_.validate();
    if (config_.mode != Mode::strategy) return;

    const std::int64_t m = config_.half_size();
    const std::int64_t limit = std::min(config_.resolved_delta_max(), m);
    probability_.reserve(static_cast<std::size_t>(std::max<std::int64_t>(limit, 0)));
    if (config_.lambda_source == LambdaSource::poisson_limit) {
        const LambdaTable table = LambdaTable::build(std::max<std::int64_t>(limit, 1));
        for (std::int64_t e = 1; e <= limit; ++e)
            probability_.push_back(table.lambda(e) / static_cast<double>(m + e + 1));
    } else {
        for (std::int64_t e = 1; e <= limit; ++e) probability_.push_back(solve_p_finite(e, m));
    }
}

double Dynamics::switch_probability(std::int64_t excess) const {
    if (excess < 1) throw DomainError("switch_probability: excess must be >= 1");
    if (excess <= static_cast<std::int64_t>(probability_.size()))
        return probability_[static_cast<std::size_t>(excess - 1)];
    const std::int64_t m = config_.half_size();
    const double lambda = static_cast<double>(excess) + kAsymptoteGap;
    return std::min(1.0, lambda / static_cast<double>(m + excess + 1));
}

double Dynamics::switch_mean(std::int64_t excess) const {
    const std::int64_t m = config_.half_size();
    return switch_probability(excess) * static_cast<double>(m + excess + 1);
}

StepKind Dynamics::step(PopulationState& state, Rng& rng) const {
    ++state.day;

    if (config_.mode == Mode::random_baseline) {
        state.assign(coin_flips(state.size(), rng));
        state.wait_counter = 0;
        return StepKind::baseline;
    }

    const Classification c = classify(state);
    if (c.excess >= 1) {
        // Minority stays; majority agents flip independently with p(e).
        state.wait_counter = 0;
        const std::int64_t k = sample_binomial(c.majority_count, switch_probability(c.excess), rng);
        const auto pool = state.members(c.majority);
        std::vector<std::int64_t> agents;
        agents.reserve(static_cast<std::size_t>(k));
        for (std::int64_t idx : sample_indices(c.majority_count, k, rng))
            agents.push_back(pool[static_cast<std::size_t>(idx)]);
        for (std::int64_t a : agents) state.flip(a);
        return StepKind::shift;
    }

    if (state.wait_counter < config_.wait_t) {
        ++state.wait_counter;
        return StepKind::frozen;
    }

    // Reset: every agent flips independently with the reset probability.
    const double q = config_.reset_probability();
    std::vector<std::int64_t> agents;
    for (Side s : {Side::A, Side::B}) {
        const auto pool = state.members(s);
        const auto size = static_cast<std::int64_t>(pool.size());
        const std::int64_t k = sample_binomial(size, q, rng);
        for (std::int64_t idx : sample_indices(size, k, rng))
            agents.push_back(pool[static_cast<std::size_t>(idx)]);
    }
    for (std::int64_t a : agents) state.flip(a);
    state.wait_counter = 0;
    return StepKind::reset;
}

ChoiceRecord::ChoiceRecord(std::int64_t agents) : agents_(agents), words_((agents + 63) / 64) {}

void ChoiceRecord::append(const PopulationState& state) {
    if (state.size() != agents_) throw UsageError("ChoiceRecord: population size mismatch");
    const std::size_t base = bits_.size();
    bits_.resize(base + static_cast<std::size_t>(words_), 0);
    for (std::int32_t a : state.members(Side::A))
        bits_[base + static_cast<std::size_t>(a / 64)] |= std::uint64_t{1} << (a % 64);
    ++days_;
}

bool ChoiceRecord::at_a(std::int64_t day, std::int64_t agent) const {
    const auto r = row(day);
    return (r[static_cast<std::size_t>(agent / 64)] >> (agent % 64)) & 1u;
}

std::span<const std::uint64_t> ChoiceRecord::row(std::int64_t day) const {
    if (day < 0 || day >= days_) throw UsageError("ChoiceRecord: day out of range");
    return {bits_.data() + day * words_, static_cast<std::size_t>(words_)};
}

Trajectory run_from(PopulationState state, const Dynamics& dynamics, std::int64_t steps,
                    bool record_choices, Rng& rng) {
    if (steps < 1) throw ConfigError("steps", "must be >= 1");
    Trajectory traj;
    traj.population = state.size();
    traj.deltas.reserve(static_cast<std::size_t>(steps));
    traj.minority_side.reserve(static_cast<std::size_t>(steps));
    if (record_choices) traj.choices.emplace(state.size());

    const std::int64_t m = state.half_size();
    for (std::int64_t t = 0; t < steps; ++t) {
        traj.deltas.push_back(state.delta());
        traj.minority_side.push_back(state.attendance(Side::A) <= m ? 1 : -1);
        if (traj.choices) traj.choices->append(state);
        if (t + 1 == steps) break;
        if (dynamics.step(state, rng) == StepKind::reset) traj.reset_days.push_back(t);
    }
    return traj;
}

Trajectory run(const StrategyConfig& config, std::int64_t steps, bool record_choices) {
    const Dynamics dynamics(config);
    Rng rng = make_stream(config.seed);
    PopulationState state = init_population(config, rng);
    return run_from(std::move(state), dynamics, steps, record_choices, rng);
}

}  // namespace minority
