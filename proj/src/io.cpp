#include "planner/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace planner {

using nlohmann::json;

namespace {

std::string escape_token(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~')
            out += "~0";
        else if (c == '/')
            out += "~1";
        else
            out += c;
    }
    return out;
}

std::string child(const std::string& path, const std::string& key) { return path + "/" + escape_token(key); }
std::string child(const std::string& path, std::size_t k) { return path + "/" + std::to_string(k); }

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
    throw InputError(ErrorCode::SchemaViolation, "schema violation at " + (path.empty() ? "/" : path) + ": " + what,
                     path.empty() ? "/" : path);
}

const char* type_name(const json& v) { return v.type_name(); }

void require_object(const json& v, const std::string& path, std::initializer_list<const char*> allowed,
                    std::initializer_list<const char*> required) {
    if (!v.is_object())
        schema_error(path, std::string("expected object, got ") + type_name(v));
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = v.begin(); it != v.end(); ++it)
        if (!ok.count(it.key()))
            schema_error(child(path, it.key()), "unknown key '" + it.key() + "'");
    for (const char* r : required)
        if (!v.contains(r))
            schema_error(child(path, r), "missing required key");
}

double number(const json& v, const std::string& path, double min = -std::numeric_limits<double>::infinity()) {
    if (!v.is_number())
        schema_error(path, std::string("expected number, got ") + type_name(v));
    const double d = v.get<double>();
    if (!std::isfinite(d))
        schema_error(path, "must be finite");
    if (d < min)
        schema_error(path, "must be >= " + json(min).dump());
    return d;
}

long integer(const json& v, const std::string& path, long min = std::numeric_limits<long>::min()) {
    if (!v.is_number())
        schema_error(path, std::string("expected integer, got ") + type_name(v));
    long out = 0;
    if (v.is_number_integer()) {
        out = v.get<long>();
    } else {
        const double d = v.get<double>();
        if (d != std::floor(d) || std::abs(d) > 9e15)
            schema_error(path, "expected integer");
        out = static_cast<long>(d);
    }
    if (out < min)
        schema_error(path, "must be >= " + std::to_string(min));
    return out;
}

/// Time fields: non-negative, rounded up to whole periods.
int period_count(const json& v, const std::string& path) {
    const double d = number(v, path, 0.0);
    const double up = std::ceil(d - 1e-9);
    if (up > std::numeric_limits<int>::max())
        schema_error(path, "too large");
    return static_cast<int>(std::max(0.0, up));
}

std::string text(const json& v, const std::string& path) {
    if (!v.is_string())
        schema_error(path, std::string("expected string, got ") + type_name(v));
    auto s = v.get<std::string>();
    if (s.empty())
        schema_error(path, "must be non-empty");
    return s;
}

const json& array(const json& v, const std::string& path) {
    if (!v.is_array())
        schema_error(path, std::string("expected array, got ") + type_name(v));
    return v;
}

/// Scalar or array of numbers.
std::vector<double> numbers(const json& v, const std::string& path, double min) {
    if (v.is_array()) {
        std::vector<double> out;
        for (std::size_t k = 0; k < v.size(); ++k)
            out.push_back(number(v[k], child(path, k), min));
        if (out.empty())
            schema_error(path, "must not be empty");
        return out;
    }
    return {number(v, path, min)};
}

Origin parse_origin(const json& v, const std::string& path) {
    require_object(v, path, {"id", "prep_cost", "kappa", "arcs"}, {"id", "prep_cost", "kappa", "arcs"});
    Origin o;
    o.id = text(v["id"], child(path, "id"));
    o.prep_cost = number(v["prep_cost"], child(path, "prep_cost"), 0.0);
    o.max_prepare = integer(v["kappa"], child(path, "kappa"), 0);
    const auto apath = child(path, "arcs");
    const auto& arcs = v["arcs"];
    if (!arcs.is_object())
        schema_error(apath, "expected object keyed by hub id");
    for (auto it = arcs.begin(); it != arcs.end(); ++it) {
        const auto p = child(apath, it.key());
        require_object(*it, p, {"travel_time", "cost", "transfer_time", "transfer_cost"}, {"travel_time", "cost"});
        Arc a;
        a.travel_time = period_count((*it)["travel_time"], child(p, "travel_time"));
        a.cost = number((*it)["cost"], child(p, "cost"), 0.0);
        if (it->contains("transfer_time"))
            a.transfer_time = period_count((*it)["transfer_time"], child(p, "transfer_time"));
        if (it->contains("transfer_cost"))
            a.transfer_cost = number((*it)["transfer_cost"], child(p, "transfer_cost"), 0.0);
        o.arcs[it.key()] = a;
    }
    return o;
}

Train parse_train(const json& v, const std::string& path) {
    require_object(v, path, {"id", "stops"}, {"id", "stops"});
    Train t;
    t.id = text(v["id"], child(path, "id"));
    const auto spath = child(path, "stops");
    const auto& stops = array(v["stops"], spath);
    for (std::size_t k = 0; k < stops.size(); ++k) {
        const auto p = child(spath, k);
        require_object(stops[k], p, {"hub", "departure"}, {"hub", "departure"});
        t.stops.push_back({text(stops[k]["hub"], child(p, "hub")), period_count(stops[k]["departure"], child(p, "departure"))});
    }
    return t;
}

Instance parse_instance(const json& doc) {
    Instance inst;
    inst.periods = static_cast<int>(integer(doc["periods"], "/periods", 1));
    const auto& origins = array(doc["origins"], "/origins");
    for (std::size_t k = 0; k < origins.size(); ++k)
        inst.origins.push_back(parse_origin(origins[k], child("/origins", k)));
    const auto& hubs = array(doc["hubs"], "/hubs");
    for (std::size_t k = 0; k < hubs.size(); ++k) {
        const auto p = child("/hubs", k);
        require_object(hubs[k], p, {"id"}, {"id"});
        inst.hubs.push_back({text(hubs[k]["id"], child(p, "id"))});
    }
    const auto& trains = array(doc["trains"], "/trains");
    for (std::size_t k = 0; k < trains.size(); ++k)
        inst.trains.push_back(parse_train(trains[k], child("/trains", k)));

    const auto& cost = doc["cost"];
    require_object(cost, "/cost", {"unmet_penalty", "emissions_penalty"}, {"unmet_penalty"});
    inst.cost.unmet_penalty = numbers(cost["unmet_penalty"], "/cost/unmet_penalty", 0.0);
    if (cost.contains("emissions_penalty"))
        inst.cost.emissions_penalty = number(cost["emissions_penalty"], "/cost/emissions_penalty", 0.0);

    if (doc.contains("emissions")) {
        const auto& em = doc["emissions"];
        require_object(em, "/emissions", {"cap", "rate"}, {"cap", "rate"});
        inst.emissions.cap = number(em["cap"], "/emissions/cap", 0.0);
        inst.emissions.rate = numbers(em["rate"], "/emissions/rate", 0.0);
    } else {
        inst.emissions.cap = 0.0;
        inst.emissions.rate = {0.0};
    }
    return inst;
}

std::map<std::string, long> parse_counts(const json& v, const std::string& path) {
    if (!v.is_object())
        schema_error(path, "expected object keyed by id");
    std::map<std::string, long> out;
    for (auto it = v.begin(); it != v.end(); ++it)
        out[it.key()] = integer(*it, child(path, it.key()), 0);
    return out;
}

ScenarioSet parse_scenarios(const json& v) {
    ScenarioSet set;
    const auto& list = array(v, "/scenarios");
    for (std::size_t w = 0; w < list.size(); ++w) {
        const auto p = child("/scenarios", w);
        require_object(list[w], p, {"probability", "demand", "capacity"}, {"probability", "demand", "capacity"});
        Scenario s;
        s.probability = number(list[w]["probability"], child(p, "probability"), 0.0);
        if (s.probability > 1.0)
            schema_error(child(p, "probability"), "must be <= 1");
        s.demand = parse_counts(list[w]["demand"], child(p, "demand"));
        const auto cpath = child(p, "capacity");
        const auto& cap = list[w]["capacity"];
        if (!cap.is_object())
            schema_error(cpath, "expected object keyed by train id");
        for (auto it = cap.begin(); it != cap.end(); ++it)
            s.capacity[it.key()] = parse_counts(*it, child(cpath, it.key()));
        set.scenarios.push_back(std::move(s));
    }
    return set;
}

IntDistribution parse_distribution(const json& v, const std::string& path) {
    require_object(v, path, {"uniform", "pmf"}, {});
    if (v.size() != 1)
        schema_error(path, "expected exactly one of 'uniform' or 'pmf'");
    if (v.contains("uniform")) {
        const auto p = child(path, "uniform");
        const auto& u = array(v["uniform"], p);
        if (u.size() != 2)
            schema_error(p, "expected [low, high]");
        const long lo = integer(u[0], child(p, 0), 0);
        const long hi = integer(u[1], child(p, 1), 0);
        if (hi < lo)
            schema_error(p, "high must be >= low");
        return IntDistribution::uniform(lo, hi);
    }
    const auto p = child(path, "pmf");
    require_object(v["pmf"], p, {"values", "weights"}, {"values", "weights"});
    const auto& vals = array(v["pmf"]["values"], child(p, "values"));
    const auto& wts = array(v["pmf"]["weights"], child(p, "weights"));
    if (vals.empty() || vals.size() != wts.size())
        schema_error(p, "values and weights must be non-empty and of equal length");
    std::vector<long> values;
    std::vector<double> weights;
    for (std::size_t k = 0; k < vals.size(); ++k) {
        values.push_back(integer(vals[k], child(child(p, "values"), k), 0));
        weights.push_back(number(wts[k], child(child(p, "weights"), k), 0.0));
    }
    return IntDistribution::pmf(std::move(values), std::move(weights));
}

SamplerConfig parse_sampler(const json& v) {
    const std::string path = "/sampler";
    require_object(v, path, {"scenario_count", "extreme_fraction", "weights", "demand", "capacity"},
                   {"scenario_count", "demand", "capacity"});
    SamplerConfig cfg;
    cfg.scenario_count = static_cast<std::size_t>(integer(v["scenario_count"], path + "/scenario_count", 1));
    if (v.contains("extreme_fraction")) {
        cfg.extreme_fraction = number(v["extreme_fraction"], path + "/extreme_fraction", 0.0);
        if (cfg.extreme_fraction > 1.0)
            schema_error(path + "/extreme_fraction", "must be <= 1");
    }
    if (v.contains("weights")) {
        const auto& w = array(v["weights"], path + "/weights");
        for (std::size_t k = 0; k < w.size(); ++k)
            cfg.scenario_weights.push_back(number(w[k], child(path + "/weights", k), 0.0));
    }
    const auto& demand = v["demand"];
    if (!demand.is_object())
        schema_error(path + "/demand", "expected object keyed by train id");
    for (auto it = demand.begin(); it != demand.end(); ++it)
        cfg.demand[it.key()] = parse_distribution(*it, child(path + "/demand", it.key()));
    const auto& cap = v["capacity"];
    if (!cap.is_object())
        schema_error(path + "/capacity", "expected object keyed by train id");
    for (auto it = cap.begin(); it != cap.end(); ++it) {
        const auto tp = child(path + "/capacity", it.key());
        if (!it->is_object())
            schema_error(tp, "expected object keyed by hub id");
        for (auto jt = it->begin(); jt != it->end(); ++jt)
            cfg.capacity[it.key()][jt.key()] = parse_distribution(*jt, child(tp, jt.key()));
    }
    try {
        check_sampler_config(cfg);
    } catch (const PlannerError& e) {
        schema_error(path, e.what());
    }
    return cfg;
}

Problem parse_unvalidated(const json& doc) {
    require_object(doc, "", {"periods", "origins", "hubs", "trains", "cost", "emissions", "scenarios", "sampler", "seed"},
                   {"periods", "origins", "hubs", "trains", "cost"});
    Problem p;
    p.instance = parse_instance(doc);
    std::optional<std::uint64_t> seed;
    if (doc.contains("seed")) {
        const auto& s = doc["seed"];
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
            schema_error("/seed", "expected non-negative integer");
        seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("sampler"))
        p.sampler = parse_sampler(doc["sampler"]);
    if (doc.contains("scenarios")) {
        p.scenarios = parse_scenarios(doc["scenarios"]);
        p.scenarios.seed = seed;
    } else if (p.sampler) {
        p.scenarios = sample_scenarios(*p.sampler, seed.value_or(0));
    } else {
        schema_error("/scenarios", "either 'scenarios' or 'sampler' is required");
    }
    return p;
}

ValidationReport full_report(const Problem& p) {
    auto report = validate_instance(p.instance);
    auto more = validate_scenarios(p.scenarios, p.instance);
    report.insert(report.end(), more.begin(), more.end());
    return report;
}

void throw_if_invalid(const ValidationReport& report) {
    if (report.empty())
        return;
    std::ostringstream msg;
    msg << "validation failed:";
    for (const auto& v : report)
        msg << "\n  " << v.code << " at " << (v.path.empty() ? "/" : v.path) << ": " << v.message;
    throw InputError(ErrorCode::ValidationFailed, msg.str(), report.front().path, report);
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what());
    }
}

json distribution_json(const IntDistribution& d) {
    if (d.kind == IntDistribution::Kind::Uniform)
        return {{"uniform", {d.low, d.high}}};
    return {{"pmf", {{"values", d.values}, {"weights", d.weights}}}};
}

json scalar_or_list(const std::vector<double>& v) { return v.size() == 1 ? json(v.front()) : json(v); }

}  // namespace

Problem parse_problem(const json& doc) {
    auto p = parse_unvalidated(doc);
    throw_if_invalid(full_report(p));
    return p;
}

Problem parse_problem_text(const std::string& text) { return parse_problem(parse_json(text)); }

Problem load_problem(const std::filesystem::path& path) { return parse_problem_text(read_file(path)); }

std::pair<Problem, ValidationReport> load_unvalidated(const std::filesystem::path& path) {
    auto p = parse_unvalidated(parse_json(read_file(path)));
    auto report = full_report(p);
    return {std::move(p), std::move(report)};
}

json to_json(const ScenarioSet& set) {
    json list = json::array();
    for (const auto& s : set.scenarios)
        list.push_back({{"probability", s.probability}, {"demand", s.demand}, {"capacity", s.capacity}});
    return list;
}

json to_json(const SamplerConfig& cfg) {
    json j;
    j["scenario_count"] = cfg.scenario_count;
    j["extreme_fraction"] = cfg.extreme_fraction;
    if (!cfg.scenario_weights.empty())
        j["weights"] = cfg.scenario_weights;
    j["demand"] = json::object();
    for (const auto& [train, d] : cfg.demand)
        j["demand"][train] = distribution_json(d);
    j["capacity"] = json::object();
    for (const auto& [train, hubs] : cfg.capacity)
        for (const auto& [hub, d] : hubs)
            j["capacity"][train][hub] = distribution_json(d);
    return j;
}

json to_json(const Problem& problem) {
    const auto& inst = problem.instance;
    json doc;
    doc["periods"] = inst.periods;
    doc["origins"] = json::array();
    for (const auto& o : inst.origins) {
        json arcs = json::object();
        for (const auto& [hub, a] : o.arcs)
            arcs[hub] = {{"travel_time", a.travel_time},
                         {"cost", a.cost},
                         {"transfer_time", a.transfer_time},
                         {"transfer_cost", a.transfer_cost}};
        doc["origins"].push_back({{"id", o.id}, {"prep_cost", o.prep_cost}, {"kappa", o.max_prepare}, {"arcs", arcs}});
    }
    doc["hubs"] = json::array();
    for (const auto& h : inst.hubs)
        doc["hubs"].push_back({{"id", h.id}});
    doc["trains"] = json::array();
    for (const auto& t : inst.trains) {
        json stops = json::array();
        for (const auto& s : t.stops)
            stops.push_back({{"hub", s.hub}, {"departure", s.departure}});
        doc["trains"].push_back({{"id", t.id}, {"stops", stops}});
    }
    doc["cost"] = {{"unmet_penalty", scalar_or_list(inst.cost.unmet_penalty)},
                   {"emissions_penalty", inst.cost.emissions_penalty}};
    doc["emissions"] = {{"cap", inst.emissions.cap}, {"rate", scalar_or_list(inst.emissions.rate)}};
    doc["scenarios"] = to_json(problem.scenarios);
    if (problem.scenarios.seed)
        doc["seed"] = *problem.scenarios.seed;
    if (problem.sampler)
        doc["sampler"] = to_json(*problem.sampler);
    return doc;
}

void save_problem(const Problem& problem, const std::filesystem::path& path) {
    write_file(path, to_json(problem).dump(2) + "\n");
}

json plan_to_json(const Plan& plan, const Instance& inst) {
    json j;
    j["objective"] = plan.objective;
    j["risk"] = {{"lambda", plan.risk.lambda}, {"alpha", plan.risk.alpha}};
    j["prepare"] = json::object();
    for (std::size_t i = 0; i < plan.prepare.size(); ++i)
        j["prepare"][inst.origins[i].id] = plan.prepare[i];
    j["var"] = plan.var;
    j["cvar"] = plan.cvar;
    const auto& b = plan.breakdown;
    j["breakdown"] = {{"first_stage", b.first_stage},
                      {"transport", b.transport},
                      {"unmet_penalty", b.unmet},
                      {"emissions_penalty", b.emissions},
                      {"cvar", b.cvar}};
    j["scenarios"] = json::array();
    for (std::size_t w = 0; w < plan.scenarios.size(); ++w) {
        const auto& s = plan.scenarios[w];
        json flows = json::array();
        for (const auto& f : s.flows)
            flows.push_back({{"origin", inst.origins[f.origin].id},
                             {"hub", inst.hubs[f.hub].id},
                             {"train", inst.trains[f.train].id},
                             {"period", f.period},
                             {"quantity", f.quantity}});
        json unmet = json::object(), inventory = json::object();
        std::size_t r = 0;
        for (std::size_t n = 0; n < inst.trains.size(); ++n) {
            unmet[inst.trains[n].id] = s.unmet[n];
            for (const auto& st : inst.trains[n].stops)
                inventory[inst.trains[n].id][st.hub] = s.inventory[r++];
        }
        j["scenarios"].push_back({{"probability", plan.probabilities[w]},
                                  {"flows", flows},
                                  {"unmet", unmet},
                                  {"inventory", inventory},
                                  {"emissions", s.emissions},
                                  {"excess_emissions", s.excess_emissions},
                                  {"shortfall", s.shortfall},
                                  {"transport_cost", s.transport_cost},
                                  {"unmet_cost", s.unmet_cost},
                                  {"emissions_penalty", s.emissions_penalty},
                                  {"second_stage_cost", s.second_stage_cost()}});
    }
    return j;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError(ErrorCode::Io, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw PlannerError(ErrorCode::Io, "cannot write '" + path.string() + "'");
    out << content;
    if (!out)
        throw PlannerError(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

}  // namespace planner
