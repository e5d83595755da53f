#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minority/dist.hpp"

namespace minority {

enum class Side : std::uint8_t { A = 0, B = 1 };

constexpr Side other(Side s) noexcept { return s == Side::A ? Side::B : Side::A; }

enum class Mode { strategy, random_baseline };
enum class LambdaSource { poisson_limit, finite_m };

std::string to_string(Mode m);
std::string to_string(LambdaSource s);
Mode parse_mode(const std::string& text);
LambdaSource parse_lambda_source(const std::string& text);

struct StrategyConfig {
    std::int64_t population = 2001;  // N, odd
    double epsilon = 0.5;
    std::int64_t wait_t = 0;
    double reset_prefactor = 0.5;
    LambdaSource lambda_source = LambdaSource::poisson_limit;
    std::int64_t delta_max = 0;  // 0 selects default_delta_max(population)
    std::uint64_t seed = 0;
    Mode mode = Mode::strategy;

    /// Throws ConfigError naming the first offending field.
    void validate() const;

    std::int64_t half_size() const noexcept { return (population - 1) / 2; }
    std::int64_t resolved_delta_max() const;
    /// reset_prefactor * M^(epsilon - 1); 1 for the single-agent population (M = 0).
    double reset_probability() const;
};

/// Choices of all agents on one day, with per-side membership lists so that
/// flipping k agents costs O(k).
class PopulationState {
public:
    PopulationState() = default;
    /// N must be odd.
    explicit PopulationState(std::vector<Side> choices);

    std::int64_t size() const noexcept { return static_cast<std::int64_t>(choices_.size()); }
    std::int64_t half_size() const noexcept { return (size() - 1) / 2; }
    std::int64_t attendance(Side s) const noexcept {
        return static_cast<std::int64_t>(members_[static_cast<int>(s)].size());
    }
    /// Signed offset: attendance(A) = M - delta.
    std::int64_t delta() const noexcept { return half_size() - attendance(Side::A); }

    Side choice(std::int64_t agent) const { return choices_[static_cast<std::size_t>(agent)]; }
    const std::vector<Side>& choices() const noexcept { return choices_; }
    std::span<const std::int32_t> members(Side s) const noexcept {
        return members_[static_cast<int>(s)];
    }

    void flip(std::int64_t agent);
    void assign(std::vector<Side> choices);

    std::int64_t day = 0;
    std::int64_t wait_counter = 0;

private:
    void rebuild();

    std::vector<Side> choices_;
    std::vector<std::int32_t> members_[2];
    std::vector<std::int32_t> slot_;
};

struct Classification {
    Side majority = Side::B;
    std::int64_t majority_count = 0;
    std::int64_t excess = 0;  // majority_count - (M + 1)
    std::int64_t delta = 0;

    Side minority() const noexcept { return other(majority); }
};

Classification classify(const PopulationState& state);

/// i.i.d. fair-coin choices; day and wait counter zero. Throws ConfigError for even N.
PopulationState init_population(const StrategyConfig& config, Rng& rng);

enum class StepKind { shift, frozen, reset, baseline };

/// Per-excess switch probabilities and reset rule for one configuration.
class Dynamics {
public:
    explicit Dynamics(StrategyConfig config);

    const StrategyConfig& config() const noexcept { return config_; }
    /// Probability that one majority agent flips when the excess is e >= 1.
    double switch_probability(std::int64_t excess) const;
    /// lambda(e): expected number of majority switchers at excess e.
    double switch_mean(std::int64_t excess) const;

    /// Advances `state` by one day in place.
    StepKind step(PopulationState& state, Rng& rng) const;

private:
    StrategyConfig config_;
    std::vector<double> probability_;  // index e - 1
};

/// Day-by-day agent choices packed one bit per agent (1 = restaurant A).
class ChoiceRecord {
public:
    explicit ChoiceRecord(std::int64_t agents = 0);

    void append(const PopulationState& state);
    std::int64_t agents() const noexcept { return agents_; }
    std::int64_t days() const noexcept { return days_; }
    bool at_a(std::int64_t day, std::int64_t agent) const;
    std::span<const std::uint64_t> row(std::int64_t day) const;

private:
    std::int64_t agents_;
    std::int64_t words_;
    std::int64_t days_ = 0;
    std::vector<std::uint64_t> bits_;
};

struct Trajectory {
    std::int64_t population = 0;
    std::vector<std::int64_t> deltas;
    std::vector<std::int8_t> minority_side;  // +1: A is the minority
    /// Days whose marginal state triggered a reset; the reset outcome is the following day.
    std::vector<std::int64_t> reset_days;
    std::optional<ChoiceRecord> choices;

    std::int64_t length() const noexcept { return static_cast<std::int64_t>(deltas.size()); }
    std::int64_t half_size() const noexcept { return (population - 1) / 2; }
};

/// Records `steps` days starting from `state` (the starting day included).
Trajectory run_from(PopulationState state, const Dynamics& dynamics, std::int64_t steps,
                    bool record_choices, Rng& rng);

/// Fresh population from config.seed, `steps` recorded days.
Trajectory run(const StrategyConfig& config, std::int64_t steps, bool record_choices = false);

}  // namespace minority
