#include "planner/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace planner {

long Scenario::capacity_at(const std::string& train, const std::string& hub) const {
    auto it = capacity.find(train);
    if (it == capacity.end())
        return 0;
    auto jt = it->second.find(hub);
    return jt == it->second.end() ? 0 : jt->second;
}

long Scenario::demand_of(const std::string& train) const {
    auto it = demand.find(train);
    return it == demand.end() ? 0 : it->second;
}

IntDistribution IntDistribution::uniform(long low, long high) {
    IntDistribution d;
    d.kind = Kind::Uniform;
    d.low = low;
    d.high = high;
    return d;
}

IntDistribution IntDistribution::pmf(std::vector<long> values, std::vector<double> weights) {
    IntDistribution d;
    d.kind = Kind::Pmf;
    d.values = std::move(values);
    d.weights = std::move(weights);
    return d;
}

long IntDistribution::min_value() const {
    if (kind == Kind::Uniform)
        return low;
    return *std::min_element(values.begin(), values.end());
}

long IntDistribution::max_value() const {
    if (kind == Kind::Uniform)
        return high;
    return *std::max_element(values.begin(), values.end());
}

namespace {

void check_distribution(const IntDistribution& d, const std::string& where) {
    auto fail = [&](const std::string& what) {
        throw PlannerError(ErrorCode::InvalidConfig, "sampler " + where + ": " + what);
    };
    if (d.kind == IntDistribution::Kind::Uniform) {
        if (d.low < 0)
            fail("lower bound must be non-negative");
        if (d.high < d.low)
            fail("high < low");
        return;
    }
    if (d.values.empty() || d.values.size() != d.weights.size())
        fail("pmf needs matching non-empty values and weights");
    double total = 0.0;
    for (std::size_t k = 0; k < d.values.size(); ++k) {
        if (d.values[k] < 0)
            fail("pmf values must be non-negative");
        if (!(d.weights[k] >= 0.0))
            fail("pmf weights must be non-negative");
        total += d.weights[k];
    }
    if (!(total > 0.0))
        fail("pmf weights sum to zero");
}

// std:: distributions are implementation-defined; these mappings keep draws
// identical across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t range) {
    if (range == 0)
        return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % range;
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

long draw(const IntDistribution& d, std::mt19937_64& rng) {
    if (d.kind == IntDistribution::Kind::Uniform) {
        const auto span = static_cast<std::uint64_t>(d.high - d.low) + 1;
        return d.low + static_cast<long>(bounded(rng, span));
    }
    const double total = std::accumulate(d.weights.begin(), d.weights.end(), 0.0);
    const double u = unit(rng) * total;
    double acc = 0.0;
    for (std::size_t k = 0; k < d.values.size(); ++k) {
        acc += d.weights[k];
        if (u < acc)
            return d.values[k];
    }
    return d.values.back();
}

}  // namespace

void check_sampler_config(const SamplerConfig& cfg) {
    if (cfg.scenario_count < 1)
        throw PlannerError(ErrorCode::InvalidConfig, "sampler: scenario_count must be >= 1");
    if (!(cfg.extreme_fraction >= 0.0 && cfg.extreme_fraction <= 1.0))
        throw PlannerError(ErrorCode::InvalidConfig, "sampler: extreme_fraction must lie in [0, 1]");
    if (!cfg.scenario_weights.empty()) {
        if (cfg.scenario_weights.size() != cfg.scenario_count)
            throw PlannerError(ErrorCode::InvalidConfig, "sampler: scenario_weights must have scenario_count entries");
        double total = 0.0;
        for (double w : cfg.scenario_weights) {
            if (!(w >= 0.0))
                throw PlannerError(ErrorCode::InvalidConfig, "sampler: scenario_weights must be non-negative");
            total += w;
        }
        if (!(total > 0.0))
            throw PlannerError(ErrorCode::InvalidConfig, "sampler: scenario_weights sum to zero");
    }
    for (const auto& [train, d] : cfg.demand)
        check_distribution(d, "demand of " + train);
    for (const auto& [train, hubs] : cfg.capacity)
        for (const auto& [hub, d] : hubs)
            check_distribution(d, "capacity of " + train + "@" + hub);
}

ScenarioSet sample_scenarios(const SamplerConfig& cfg, std::uint64_t seed) {
    check_sampler_config(cfg);
    std::mt19937_64 rng(seed);
    ScenarioSet out;
    out.seed = seed;
    out.scenarios.resize(cfg.scenario_count);

    const auto extremes = static_cast<std::size_t>(
        std::llround(cfg.extreme_fraction * static_cast<double>(cfg.scenario_count)));

    double weight_total = 0.0;
    for (double w : cfg.scenario_weights)
        weight_total += w;

    for (std::size_t w = 0; w < cfg.scenario_count; ++w) {
        Scenario& s = out.scenarios[w];
        const bool extreme = w < extremes;
        const bool high = (w % 2) == 1;
        auto value = [&](const IntDistribution& d) {
            if (extreme)
                return high ? d.max_value() : d.min_value();
            return draw(d, rng);
        };
        for (const auto& [train, d] : cfg.demand)
            s.demand[train] = value(d);
        for (const auto& [train, hubs] : cfg.capacity)
            for (const auto& [hub, d] : hubs)
                s.capacity[train][hub] = value(d);
        s.probability = cfg.scenario_weights.empty()
                            ? 1.0 / static_cast<double>(cfg.scenario_count)
                            : cfg.scenario_weights[w] / weight_total;
    }
    return out;
}

Scenario mean_value_scenario(const ScenarioSet& set) {
    if (set.scenarios.empty())
        throw PlannerError(ErrorCode::InvalidArgument, "mean_value_scenario: empty scenario set");
    if (set.scenarios.size() == 1) {
        Scenario s = set.scenarios.front();
        s.probability = 1.0;
        return s;
    }
    // Half-up rounding; the small offset absorbs representation error in
    // means such as 10.5 accumulated from binary fractions.
    auto round_half_up = [](double v) { return static_cast<long>(std::floor(v + 0.5 + 1e-9)); };

    std::map<std::string, double> demand;
    std::map<std::string, std::map<std::string, double>> capacity;
    for (const auto& s : set.scenarios) {
        for (const auto& [train, d] : s.demand)
            demand[train] += s.probability * static_cast<double>(d);
        for (const auto& [train, hubs] : s.capacity)
            for (const auto& [hub, k] : hubs)
                capacity[train][hub] += s.probability * static_cast<double>(k);
    }
    Scenario mean;
    mean.probability = 1.0;
    for (const auto& [train, d] : demand)
        mean.demand[train] = round_half_up(d);
    for (const auto& [train, hubs] : capacity)
        for (const auto& [hub, k] : hubs)
            mean.capacity[train][hub] = round_half_up(k);
    return mean;
}

ValidationReport validate_scenarios(const ScenarioSet& set, const Instance& inst) {
    ValidationReport out;
    if (set.scenarios.empty()) {
        out.push_back({"EMPTY_SET", "at least one scenario is required", "/scenarios"});
        return out;
    }
    double total = 0.0;
    for (std::size_t w = 0; w < set.scenarios.size(); ++w) {
        const auto& s = set.scenarios[w];
        const std::string base = "/scenarios/" + std::to_string(w);
        if (!(s.probability >= 0.0 && s.probability <= 1.0))
            out.push_back({"PROB_RANGE", "probability must lie in [0, 1]", base + "/probability"});
        total += s.probability;

        for (const auto& [train, d] : s.demand) {
            if (!inst.train_index(train))
                out.push_back({"UNKNOWN_TRAIN", "demand for undeclared train '" + train + "'",
                               base + "/demand/" + train});
            if (d < 0)
                out.push_back({"NEGATIVE_DEMAND", "demand must be >= 0", base + "/demand/" + train});
        }
        for (const auto& [train, hubs] : s.capacity) {
            auto n = inst.train_index(train);
            if (!n) {
                out.push_back({"UNKNOWN_TRAIN", "capacity for undeclared train '" + train + "'",
                               base + "/capacity/" + train});
                continue;
            }
            for (const auto& [hub, k] : hubs) {
                const std::string kpath = base + "/capacity/" + train + "/" + hub;
                auto j = inst.hub_index(hub);
                if (!j || !inst.stop_position(*n, *j))
                    out.push_back({"CAPACITY_OFF_ROUTE",
                                   "train '" + train + "' does not stop at hub '" + hub + "'", kpath});
                if (k < 0)
                    out.push_back({"NEGATIVE_CAPACITY", "capacity must be >= 0", kpath});
            }
        }
        for (const auto& tr : inst.trains)
            for (const auto& stop : tr.stops) {
                auto it = s.capacity.find(tr.id);
                if (it == s.capacity.end() || !it->second.count(stop.hub))
                    out.push_back({"MISSING_CAPACITY",
                                   "no capacity for train '" + tr.id + "' at hub '" + stop.hub + "'",
                                   base + "/capacity/" + tr.id});
            }
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance)
        out.push_back({"PROB_SUM", "probabilities sum to " + std::to_string(total) + ", expected 1",
                       "/scenarios"});
    const auto penalties = inst.cost.unmet_penalty.size();
    if (penalties != 1 && penalties != set.scenarios.size())
        out.push_back({"PENALTY_COUNT", "unmet_penalty must be a scalar or have one entry per scenario",
                       "/cost/unmet_penalty"});
    return out;
}

}  // namespace planner
