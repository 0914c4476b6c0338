#pragma once

// Exhaustive-enumeration oracle for small instances. Works from the instance
// data directly: it never looks at the built MILP.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "planner/instance.hpp"
#include "planner/scenario.hpp"

namespace planner::testing {

struct OracleCell {
    std::size_t origin, train;
    std::string hub;
    int period;
    double unit_cost;
    double unit_emission;
};

inline std::vector<OracleCell> oracle_cells(const Instance& inst, bool transfer) {
    std::vector<OracleCell> out;
    for (std::size_t i = 0; i < inst.origins.size(); ++i)
        for (const auto& [hub, arc] : inst.origins[i].arcs)
            for (std::size_t n = 0; n < inst.trains.size(); ++n)
                for (const auto& st : inst.trains[n].stops) {
                    if (st.hub != hub)
                        continue;
                    const int lead = arc.travel_time + (transfer ? arc.transfer_time : 0);
                    for (int t = 0; t < inst.periods; ++t)
                        if (t + lead <= st.departure) {
                            const double rate =
                                inst.emissions.rate.size() == 1 ? inst.emissions.rate[0] : inst.emissions.rate[t];
                            out.push_back({i, n, hub, t, arc.cost + (transfer ? arc.transfer_cost : 0.0),
                                           rate * arc.travel_time});
                        }
                }
    return out;
}

/// Worst-(1 - alpha) tail average: sort descending and fill the tail mass.
inline double tail_average(std::vector<double> costs, std::vector<double> probs, double alpha) {
    std::vector<std::size_t> idx(costs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return costs[a] > costs[b]; });
    double mass = 1.0 - alpha, acc = 0.0;
    for (auto k : idx) {
        const double q = std::min(probs[k], mass);
        acc += q * costs[k];
        mass -= q;
        if (mass <= 0)
            break;
    }
    return acc / (1.0 - alpha);
}

struct OracleOptions {
    double lambda = 0.0;
    double alpha = 0.0;
    std::optional<double> epsilon;
    bool transfer = false;
    /// fixed first-stage plan (EEV recourse)
    std::optional<std::vector<long>> prepare;
};

/// (second-stage cost, emissions penalty) outcomes of one scenario under a
/// fixed y, reduced to the Pareto-minimal set.
inline std::vector<std::pair<double, double>> scenario_outcomes(const Instance& inst, const Scenario& sc,
                                                                const std::vector<OracleCell>& cells,
                                                                const std::vector<long>& y, double pi, double eps) {
    std::vector<long> supply = y;
    std::vector<long> demand(inst.trains.size());
    std::map<std::pair<std::size_t, std::string>, long> cap;
    for (std::size_t n = 0; n < inst.trains.size(); ++n) {
        demand[n] = sc.demand_of(inst.trains[n].id);
        for (const auto& st : inst.trains[n].stops)
            cap[{n, st.hub}] = sc.capacity_at(inst.trains[n].id, st.hub);
    }
    std::vector<std::pair<double, double>> found;
    std::function<void(std::size_t, double, double)> rec = [&](std::size_t c, double cost, double em) {
        if (c == cells.size()) {
            double unmet = 0;
            for (long d : demand)
                unmet += static_cast<double>(d);
            found.emplace_back(cost + pi * unmet, inst.cost.emissions_penalty * std::max(0.0, em - eps));
            return;
        }
        const auto& cell = cells[c];
        long& k = cap[{cell.train, cell.hub}];
        const long hi = std::min({supply[cell.origin], k, demand[cell.train]});
        for (long q = 0; q <= hi; ++q) {
            supply[cell.origin] -= q;
            k -= q;
            demand[cell.train] -= q;
            rec(c + 1, cost + q * cell.unit_cost, em + q * cell.unit_emission);
            supply[cell.origin] += q;
            k += q;
            demand[cell.train] += q;
        }
    };
    rec(0, 0.0, 0.0);
    std::sort(found.begin(), found.end());
    std::vector<std::pair<double, double>> front;
    for (const auto& f : found)
        if (front.empty() || f.second < front.back().second - 1e-12)
            front.push_back(f);
    return front;
}

/// Exact optimum of the mean-risk two-stage problem by enumeration over every
/// integer first-stage plan and every integer recourse.
inline double brute_force_optimum(const Instance& inst, const ScenarioSet& scen, const OracleOptions& opt = {}) {
    const auto cells = oracle_cells(inst, opt.transfer);
    const double eps = opt.epsilon.value_or(inst.emissions.cap);
    const std::size_t S = scen.scenarios.size();
    std::vector<double> probs;
    for (const auto& s : scen.scenarios)
        probs.push_back(s.probability);

    double best = std::numeric_limits<double>::infinity();
    std::vector<long> y(inst.origins.size(), 0);
    std::function<void(std::size_t)> over_y = [&](std::size_t i) {
        if (i < y.size()) {
            if (opt.prepare) {
                y[i] = (*opt.prepare)[i];
                over_y(i + 1);
                return;
            }
            for (long v = 0; v <= inst.origins[i].max_prepare; ++v) {
                y[i] = v;
                over_y(i + 1);
            }
            return;
        }
        double first = 0;
        for (std::size_t k = 0; k < y.size(); ++k)
            first += inst.origins[k].prep_cost * static_cast<double>(y[k]);
        std::vector<std::vector<std::pair<double, double>>> opts(S);
        for (std::size_t w = 0; w < S; ++w) {
            const double pi =
                inst.cost.unmet_penalty.size() == 1 ? inst.cost.unmet_penalty[0] : inst.cost.unmet_penalty[w];
            opts[w] = scenario_outcomes(inst, scen.scenarios[w], cells, y, pi, eps);
        }
        std::vector<double> c(S), pen(S);
        std::function<void(std::size_t)> over_w = [&](std::size_t w) {
            if (w == S) {
                double total = first;
                for (std::size_t k = 0; k < S; ++k)
                    total += probs[k] * ((1.0 - opt.lambda) * c[k] + pen[k]);
                if (opt.lambda > 0)
                    total += opt.lambda * tail_average(c, probs, opt.alpha);
                best = std::min(best, total);
                return;
            }
            for (const auto& [cost, p] : opts[w]) {
                c[w] = cost;
                pen[w] = p;
                over_w(w + 1);
            }
        };
        over_w(0);
    };
    over_y(0);
    return best;
}

}  // namespace planner::testing
