#include "planner/instance.hpp"

#include <set>
#include <sstream>

namespace planner {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
        case ErrorCode::IndexOutOfRange: return "INDEX_OUT_OF_RANGE";
        case ErrorCode::InvalidConfig: return "INVALID_CONFIG";
        case ErrorCode::RejectAlpha: return "REJECT_ALPHA";
        case ErrorCode::DecodeInconsistent: return "DECODE_INCONSISTENT";
        case ErrorCode::NumericalBreakdown: return "NUMERICAL_BREAKDOWN";
        case ErrorCode::ParseError: return "PARSE_ERROR";
        case ErrorCode::SchemaViolation: return "SCHEMA_VIOLATION";
        case ErrorCode::ValidationFailed: return "VALIDATION_FAILED";
        case ErrorCode::Io: return "IO_ERROR";
    }
    return "UNKNOWN";
}

namespace {

template <class T>
std::optional<std::size_t> find_id(const std::vector<T>& items, const std::string& id) {
    for (std::size_t k = 0; k < items.size(); ++k)
        if (items[k].id == id)
            return k;
    return std::nullopt;
}

template <class T>
void check_unique(const std::vector<T>& items, const std::string& what, ValidationReport& out) {
    std::set<std::string> seen;
    for (std::size_t k = 0; k < items.size(); ++k) {
        if (!seen.insert(items[k].id).second)
            out.push_back({"DUPLICATE_ID", what + " id '" + items[k].id + "' declared twice",
                           "/" + what + "s/" + std::to_string(k) + "/id"});
    }
}

}  // namespace

std::optional<std::size_t> Instance::hub_index(const std::string& id) const { return find_id(hubs, id); }
std::optional<std::size_t> Instance::origin_index(const std::string& id) const {
    return find_id(origins, id);
}
std::optional<std::size_t> Instance::train_index(const std::string& id) const {
    return find_id(trains, id);
}

std::optional<std::size_t> Instance::stop_position(std::size_t train, std::size_t hub) const {
    const auto& stops = trains.at(train).stops;
    const auto& hub_id = hubs.at(hub).id;
    for (std::size_t k = 0; k < stops.size(); ++k)
        if (stops[k].hub == hub_id)
            return k;
    return std::nullopt;
}

std::size_t Instance::total_stops() const {
    std::size_t r = 0;
    for (const auto& t : trains)
        r += t.stops.size();
    return r;
}

double Instance::emission_rate(int period) const {
    if (emissions.rate.empty())
        return 0.0;
    if (emissions.rate.size() == 1)
        return emissions.rate.front();
    return emissions.rate.at(static_cast<std::size_t>(period));
}

ValidationReport validate_instance(const Instance& inst) {
    ValidationReport out;
    auto add = [&out](std::string code, std::string msg, std::string path) {
        out.push_back({std::move(code), std::move(msg), std::move(path)});
    };

    if (inst.origins.empty())
        add("EMPTY_ORIGINS", "at least one origin is required", "/origins");
    if (inst.hubs.empty())
        add("EMPTY_HUBS", "at least one hub is required", "/hubs");
    if (inst.trains.empty())
        add("EMPTY_TRAINS", "at least one train is required", "/trains");
    if (inst.periods < 1)
        add("BAD_PERIODS", "periods must be >= 1", "/periods");

    check_unique(inst.origins, "origin", out);
    check_unique(inst.hubs, "hub", out);
    check_unique(inst.trains, "train", out);

    for (std::size_t i = 0; i < inst.origins.size(); ++i) {
        const auto& o = inst.origins[i];
        const std::string base = "/origins/" + std::to_string(i);
        if (o.prep_cost < 0)
            add("NEGATIVE_COST", "origin '" + o.id + "' has negative prep_cost", base + "/prep_cost");
        if (o.max_prepare < 0)
            add("NEGATIVE_CAPACITY", "origin '" + o.id + "' has negative kappa", base + "/kappa");
        for (const auto& [hub, arc] : o.arcs) {
            const std::string apath = base + "/arcs/" + hub;
            if (!inst.hub_index(hub))
                add("DANGLING_HUB_REF", "origin '" + o.id + "' has an arc to undeclared hub '" + hub + "'",
                    apath);
            if (arc.travel_time < 0 || arc.transfer_time < 0)
                add("NEGATIVE_TIME", "arc " + o.id + "->" + hub + " has a negative time", apath);
            if (arc.cost < 0 || arc.transfer_cost < 0)
                add("NEGATIVE_COST", "arc " + o.id + "->" + hub + " has a negative cost", apath);
        }
    }

    for (std::size_t n = 0; n < inst.trains.size(); ++n) {
        const auto& tr = inst.trains[n];
        const std::string base = "/trains/" + std::to_string(n);
        if (tr.stops.empty())
            add("EMPTY_ROUTE", "train '" + tr.id + "' has no stops", base + "/stops");
        std::set<std::string> visited;
        for (std::size_t k = 0; k < tr.stops.size(); ++k) {
            const auto& s = tr.stops[k];
            const std::string spath = base + "/stops/" + std::to_string(k);
            if (!inst.hub_index(s.hub))
                add("DANGLING_HUB_REF", "train '" + tr.id + "' stops at undeclared hub '" + s.hub + "'",
                    spath + "/hub");
            if (!visited.insert(s.hub).second)
                add("REPEATED_STOP", "train '" + tr.id + "' visits hub '" + s.hub + "' more than once",
                    spath + "/hub");
            if (s.departure < 0)
                add("NEGATIVE_TIME", "train '" + tr.id + "' has a negative departure", spath + "/departure");
            if (k > 0 && s.departure <= tr.stops[k - 1].departure)
                add("NONMONOTONE_SCHEDULE",
                    "train '" + tr.id + "' departures must strictly increase along the route",
                    spath + "/departure");
        }
    }

    for (std::size_t w = 0; w < inst.cost.unmet_penalty.size(); ++w)
        if (inst.cost.unmet_penalty[w] < 0)
            add("NEGATIVE_PENALTY", "unmet-demand penalty must be >= 0",
                "/cost/unmet_penalty" + (inst.cost.unmet_penalty.size() > 1 ? "/" + std::to_string(w) : ""));
    if (inst.cost.unmet_penalty.empty())
        add("NEGATIVE_PENALTY", "unmet-demand penalty is missing", "/cost/unmet_penalty");
    if (inst.cost.emissions_penalty < 0)
        add("NEGATIVE_PENALTY", "emissions penalty must be >= 0", "/cost/emissions_penalty");

    if (inst.emissions.cap < 0)
        add("NEGATIVE_EMISSIONS", "emissions cap must be >= 0", "/emissions/cap");
    for (std::size_t t = 0; t < inst.emissions.rate.size(); ++t)
        if (inst.emissions.rate[t] < 0)
            add("NEGATIVE_EMISSIONS", "emission rate must be >= 0", "/emissions/rate/" + std::to_string(t));
    if (inst.emissions.rate.size() > 1 && inst.periods >= 1 &&
        inst.emissions.rate.size() != static_cast<std::size_t>(inst.periods))
        add("RATE_LENGTH", "emission rate must be a scalar or have one entry per period", "/emissions/rate");

    return out;
}

bool time_feasible(const Instance& inst, std::size_t origin, std::size_t hub, std::size_t train, int t,
                   bool use_transfer) {
    if (origin >= inst.origins.size() || hub >= inst.hubs.size() || train >= inst.trains.size())
        throw PlannerError(ErrorCode::IndexOutOfRange, "time_feasible: entity index out of range");
    if (t < 0 || t >= inst.periods)
        throw PlannerError(ErrorCode::IndexOutOfRange,
                           "time_feasible: period " + std::to_string(t) + " outside 0.." +
                               std::to_string(inst.periods - 1));
    const auto& arcs = inst.origins[origin].arcs;
    auto it = arcs.find(inst.hubs[hub].id);
    if (it == arcs.end())
        throw PlannerError(ErrorCode::IndexOutOfRange, "time_feasible: origin '" + inst.origins[origin].id +
                                                           "' has no arc to hub '" + inst.hubs[hub].id + "'");
    auto pos = inst.stop_position(train, hub);
    if (!pos)
        throw PlannerError(ErrorCode::IndexOutOfRange, "time_feasible: train '" + inst.trains[train].id +
                                                           "' does not stop at hub '" + inst.hubs[hub].id + "'");
    const int departure = inst.trains[train].stops[*pos].departure;
    int arrival = t + it->second.travel_time;
    if (use_transfer)
        arrival += it->second.transfer_time;
    return arrival <= departure;
}

}  // namespace planner
