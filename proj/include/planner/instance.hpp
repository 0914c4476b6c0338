#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "planner/error.hpp"

namespace planner {

/// Road leg from an origin to a hub. Times are whole periods.
struct Arc {
    int travel_time = 0;
    double cost = 0.0;
    int transfer_time = 0;
    double transfer_cost = 0.0;

    bool operator==(const Arc&) const = default;
};

struct Origin {
    std::string id;
    double prep_cost = 0.0;
    long max_prepare = 0;
    /// keyed by hub id
    std::map<std::string, Arc> arcs;

    bool operator==(const Origin&) const = default;
};

struct Hub {
    std::string id;

    bool operator==(const Hub&) const = default;
};

struct Stop {
    std::string hub;
    int departure = 0;

    bool operator==(const Stop&) const = default;
};

/// A scheduled train. Stops are in route order; the first is where loading
/// starts and the last is the final station.
struct Train {
    std::string id;
    std::vector<Stop> stops;

    bool operator==(const Train&) const = default;
};

struct CostParams {
    /// One entry means the penalty is scenario-uniform; otherwise one per scenario.
    std::vector<double> unmet_penalty{0.0};
    double emissions_penalty = 0.0;

    double unmet_penalty_for(std::size_t scenario) const {
        return unmet_penalty.size() == 1 ? unmet_penalty.front() : unmet_penalty.at(scenario);
    }

    bool operator==(const CostParams&) const = default;
};

struct EmissionParams {
    double cap = 0.0;
    /// Per-container, per-period emission rate indexed by dispatch period.
    std::vector<double> rate;

    bool operator==(const EmissionParams&) const = default;
};

struct Instance {
    std::vector<Origin> origins;
    std::vector<Hub> hubs;
    std::vector<Train> trains;
    int periods = 1;
    CostParams cost;
    EmissionParams emissions;

    std::optional<std::size_t> hub_index(const std::string& id) const;
    std::optional<std::size_t> origin_index(const std::string& id) const;
    std::optional<std::size_t> train_index(const std::string& id) const;

    /// Position of hub `hub` in train `train`'s route, if it stops there.
    std::optional<std::size_t> stop_position(std::size_t train, std::size_t hub) const;

    /// Total number of (train, stop) pairs.
    std::size_t total_stops() const;

    double emission_rate(int period) const;

    bool operator==(const Instance&) const = default;
};

/// Returns every invariant violation; an empty report means the instance is valid.
/// Codes: EMPTY_ORIGINS, EMPTY_HUBS, EMPTY_TRAINS, BAD_PERIODS, DUPLICATE_ID,
/// NEGATIVE_COST, NEGATIVE_CAPACITY, NEGATIVE_TIME, DANGLING_HUB_REF, EMPTY_ROUTE,
/// NONMONOTONE_SCHEDULE, REPEATED_STOP, NEGATIVE_PENALTY, NEGATIVE_EMISSIONS,
/// RATE_LENGTH.
ValidationReport validate_instance(const Instance& inst);

/// True iff a container dispatched from `origin` at period `t` reaches `hub`
/// before train `train` departs it: t + travel (+ transfer) <= departure.
/// Throws IndexOutOfRange for undeclared entities or when there is no such arc
/// or stop.
bool time_feasible(const Instance& inst, std::size_t origin, std::size_t hub, std::size_t train,
                   int t, bool use_transfer);

}  // namespace planner
