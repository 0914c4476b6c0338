#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "planner/error.hpp"
#include "planner/instance.hpp"

namespace planner {

/// One realization of the random data: spot capacities per (train, hub) stop,
/// demand per train and the scenario's probability.
struct Scenario {
    /// capacity[train id][hub id]
    std::map<std::string, std::map<std::string, long>> capacity;
    /// demand[train id]
    std::map<std::string, long> demand;
    double probability = 1.0;

    long capacity_at(const std::string& train, const std::string& hub) const;
    long demand_of(const std::string& train) const;

    bool operator==(const Scenario&) const = default;
};

struct ScenarioSet {
    std::vector<Scenario> scenarios;
    std::optional<std::uint64_t> seed;

    std::size_t size() const { return scenarios.size(); }

    bool operator==(const ScenarioSet&) const = default;
};

/// Integer-valued distribution: uniform on [low, high] or a discrete pmf.
struct IntDistribution {
    enum class Kind { Uniform, Pmf };
    Kind kind = Kind::Uniform;
    long low = 0;
    long high = 0;
    std::vector<long> values;
    std::vector<double> weights;

    static IntDistribution uniform(long low, long high);
    static IntDistribution pmf(std::vector<long> values, std::vector<double> weights);
    static IntDistribution constant(long v) { return uniform(v, v); }

    long min_value() const;
    long max_value() const;

    bool operator==(const IntDistribution&) const = default;
};

struct SamplerConfig {
    std::size_t scenario_count = 1;
    /// demand[train id]
    std::map<std::string, IntDistribution> demand;
    /// capacity[train id][hub id]
    std::map<std::string, std::map<std::string, IntDistribution>> capacity;
    double extreme_fraction = 0.0;
    /// Optional per-scenario weights (normalized on use); empty means uniform.
    std::vector<double> scenario_weights;

    bool operator==(const SamplerConfig&) const = default;
};

/// Checks SamplerConfig invariants; throws PlannerError(InvalidConfig).
void check_sampler_config(const SamplerConfig& cfg);

/// Seeded draw of a scenario set. The first round(extreme_fraction * count)
/// scenarios are extreme: even positions take every distribution's minimum,
/// odd positions its maximum. The rest are sampled independently.
ScenarioSet sample_scenarios(const SamplerConfig& cfg, std::uint64_t seed);

/// Probability-weighted mean scenario with p = 1; counts rounded half-up.
Scenario mean_value_scenario(const ScenarioSet& set);

/// Codes: EMPTY_SET, PROB_SUM, PROB_RANGE, NEGATIVE_DEMAND, NEGATIVE_CAPACITY,
/// CAPACITY_OFF_ROUTE, MISSING_CAPACITY, UNKNOWN_TRAIN, PENALTY_COUNT.
ValidationReport validate_scenarios(const ScenarioSet& set, const Instance& inst);

/// Tolerance on the probability sum.
inline constexpr double kProbabilityTolerance = 1e-9;

}  // namespace planner
