#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <set>

#include "planner/error.hpp"
#include "planner/solver.hpp"

namespace planner {

const char* to_string(MipStatus s) {
    switch (s) {
        case MipStatus::Optimal: return "optimal";
        case MipStatus::GapLimit: return "gap-limit";
        case MipStatus::TimeLimit: return "time-limit";
        case MipStatus::NodeLimit: return "node-limit";
        case MipStatus::Infeasible: return "infeasible";
        case MipStatus::Unbounded: return "unbounded";
    }
    return "?";
}

std::vector<SolutionViolation> check_solution(const LinearProgram& lp, const std::vector<double>& x, double tol) {
    std::vector<SolutionViolation> out;
    if (x.size() != lp.num_cols())
        throw PlannerError(ErrorCode::InvalidArgument, "check_solution: vector length does not match the model");
    for (std::size_t r = 0; r < lp.num_rows(); ++r) {
        const double a = lp.row_activity(r, x);
        double slack = 0.0;
        switch (lp.sense[r]) {
            case Sense::LessEqual: slack = lp.rhs[r] - a; break;
            case Sense::GreaterEqual: slack = a - lp.rhs[r]; break;
            case Sense::Equal: slack = -std::abs(a - lp.rhs[r]); break;
        }
        if (slack < -tol)
            out.push_back({SolutionViolation::Kind::Row, r, lp.row_name[r], slack});
    }
    for (std::size_t j = 0; j < lp.num_cols(); ++j) {
        const double s = std::min(x[j] - lp.lower[j], lp.upper[j] - x[j]);
        if (s < -tol)
            out.push_back({SolutionViolation::Kind::Bound, j, {}, s});
        if (lp.is_integer(j)) {
            const double f = std::abs(x[j] - std::round(x[j]));
            if (f > tol)
                out.push_back({SolutionViolation::Kind::Integrality, j, {}, -f});
        }
    }
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::size_t kDiveInterval = 50;
constexpr std::size_t kDiveSteps = 200;
constexpr std::size_t kNeighborhoodInterval = 200;
constexpr std::size_t kNeighborhoodNodes = 500;

struct Node {
    std::size_t id = 0;
    std::size_t depth = 0;
    double bound = -kInf;
    std::vector<std::tuple<std::size_t, double, double>> changes;  // col, lb, ub
    std::shared_ptr<const Basis> basis;
};

class BranchAndBound {
public:
    BranchAndBound(const LinearProgram& lp, const SolverConfig& cfg, bool neighborhood = true)
        : lp_(lp), cfg_(cfg), simplex_(lp, lp_options(cfg)), neighborhood_(neighborhood) {
        up_locks_.assign(lp.num_cols(), 0);
        down_locks_.assign(lp.num_cols(), 0);
        for (std::size_t r = 0; r < lp.num_rows(); ++r)
            for (std::size_t k = lp.row_start[r]; k < lp.row_start[r + 1]; ++k) {
                const auto c = static_cast<std::size_t>(lp.row_index[k]);
                const double a = lp.row_value[k];
                const Sense s = lp.sense[r];
                if (s == Sense::Equal || (s == Sense::LessEqual && a > 0) || (s == Sense::GreaterEqual && a < 0))
                    ++up_locks_[c];
                if (s == Sense::Equal || (s == Sense::LessEqual && a < 0) || (s == Sense::GreaterEqual && a > 0))
                    ++down_locks_[c];
            }
    }

    MipResult run() {
        const auto start = Clock::now();
        MipResult res;
        if (cfg_.node_log)
            *cfg_.node_log << "node,bound,incumbent,gap,time\n";

        std::map<std::size_t, Node> open;
        // (bound, -depth, id) for best-bound selection
        std::set<std::tuple<double, long, std::size_t>> by_bound;
        std::size_t next_id = 0;
        auto push = [&](Node nd) {
            nd.id = next_id++;
            by_bound.insert({nd.bound, -static_cast<long>(nd.depth), nd.id});
            open.emplace(nd.id, std::move(nd));
        };
        push(Node{});

        double global_bound = -kInf;
        double pruned_min = kInf;
        bool plunging = false;
        bool stopped_by_gap = false;

        auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
        auto gap_of = [&](double inc, double bnd) {
            return std::isfinite(inc) ? (inc - bnd) / std::max(1.0, std::abs(inc)) : kInf;
        };
        auto closes = [&](double bnd) {
            return std::isfinite(incumbent_obj_) && gap_of(incumbent_obj_, bnd) <= cfg_.gap;
        };

        while (!open.empty()) {
            if (cfg_.time_limit > 0 && elapsed() > cfg_.time_limit) {
                res.status = MipStatus::TimeLimit;
                break;
            }
            if (cfg_.node_limit > 0 && res.nodes >= cfg_.node_limit) {
                res.status = MipStatus::NodeLimit;
                break;
            }

            // global bound over open nodes (children never fall below parents)
            const double open_min = std::get<0>(*by_bound.begin());
            global_bound = std::max(global_bound, std::min({open_min, incumbent_obj_, pruned_min}));
            if (closes(global_bound) && res.nodes > 0) {
                stopped_by_gap = true;
                break;
            }

            std::size_t pick;
            if (plunging)
                pick = open.rbegin()->first;  // most recently created
            else
                pick = std::get<2>(*by_bound.begin());
            Node nd = std::move(open.at(pick));
            open.erase(pick);
            by_bound.erase({nd.bound, -static_cast<long>(nd.depth), nd.id});

            if (closes(nd.bound)) {
                pruned_min = std::min(pruned_min, nd.bound);
                plunging = false;
                continue;
            }

            ++res.nodes;
            std::vector<double> lower = lp_.lower, upper = lp_.upper;
            for (const auto& [c, l, u] : nd.changes) {
                lower[c] = l;
                upper[c] = u;
            }
            LpSolution sol = simplex_.solve(lower, upper, nd.basis.get());
            res.lp_iterations += sol.iterations;

            if (sol.status == LpStatus::Unbounded && nd.depth == 0) {
                res.status = MipStatus::Unbounded;
                res.wall_time = elapsed();
                return res;
            }
            if (sol.status == LpStatus::IterationLimit)
                throw PlannerError(ErrorCode::NumericalBreakdown, "branch-and-bound: LP iteration limit at node " +
                                                                      std::to_string(res.nodes));
            bool branched = false;
            if (sol.status == LpStatus::Optimal) {
                const double bound = std::max(nd.bound, sol.objective);
                if (nd.depth == 0 && cfg_.root_heuristic)
                    run_root_heuristic(sol.primal, res);
                if (nd.depth == 0 || res.nodes % kDiveInterval == 0) {
                    const bool had = new_incumbent_flag_;
                    dive(sol.primal, lower, upper, sol.basis);
                    new_incumbent_flag_ = had;
                }
                if (neighborhood_ && (nd.depth == 0 || res.nodes % kNeighborhoodInterval == 0)) {
                    const bool had = new_incumbent_flag_;
                    search_neighborhood(sol.primal, lower, upper, elapsed());
                    new_incumbent_flag_ = had;
                }

                if (!closes(bound)) {
                    std::vector<double> xs = sol.primal;
                    trivial_round(xs, lower, upper);
                    const auto frac = most_fractional(xs);
                    if (!frac) {
                        try_incumbent(xs, lower, upper, sol.basis.get());
                    } else {
                        const std::size_t j = *frac;
                        const double v = xs[j];
                        Node down{0, nd.depth + 1, bound, nd.changes, sol.basis};
                        down.changes.emplace_back(j, lower[j], std::floor(v));
                        Node up{0, nd.depth + 1, bound, nd.changes, sol.basis};
                        up.changes.emplace_back(j, std::ceil(v), upper[j]);
                        // the child pushed last is plunged first
                        if (v - std::floor(v) >= 0.5) {
                            push(std::move(down));
                            push(std::move(up));
                        } else {
                            push(std::move(up));
                            push(std::move(down));
                        }
                        branched = true;
                    }
                } else {
                    pruned_min = std::min(pruned_min, bound);
                }
            }
            if (new_incumbent_flag_) {
                plunging = true;
                new_incumbent_flag_ = false;
            } else if (!branched) {
                plunging = false;
            }

            const double open_now = by_bound.empty() ? kInf : std::get<0>(*by_bound.begin());
            global_bound = std::max(global_bound, std::min({open_now, incumbent_obj_, pruned_min}));
            res.bound_trace.push_back(global_bound);
            if (cfg_.node_log)
                *cfg_.node_log << res.nodes << ',' << global_bound << ',' << incumbent_obj_ << ','
                               << gap_of(incumbent_obj_, global_bound) << ',' << elapsed() << '\n';
        }

        if (open.empty() || stopped_by_gap) {
            if (!std::isfinite(incumbent_obj_)) {
                res.status = MipStatus::Infeasible;
            } else {
                res.status = (stopped_by_gap && cfg_.gap > kDefaultGap) ? MipStatus::GapLimit : MipStatus::Optimal;
                if (open.empty())
                    global_bound = std::max(global_bound, std::min(incumbent_obj_, pruned_min));
            }
        }
        res.incumbent = incumbent_;
        res.objective = incumbent_obj_;
        if (!open.empty() && !stopped_by_gap)
            global_bound = std::max(global_bound,
                                    std::min({std::get<0>(*by_bound.begin()), incumbent_obj_, pruned_min}));
        res.best_bound = std::min(global_bound, incumbent_obj_);
        res.gap = gap_of(incumbent_obj_, res.best_bound);
        res.wall_time = elapsed();
        return res;
    }

private:
    static LpOptions lp_options(const SolverConfig& cfg) {
        LpOptions o;
        o.feasibility_tol = cfg.feasibility_tol;
        return o;
    }

    void trivial_round(std::vector<double>& xs, const std::vector<double>& lower, const std::vector<double>& upper) const {
        for (std::size_t j = 0; j < xs.size(); ++j) {
            if (!lp_.is_integer(j))
                continue;
            const double f = xs[j] - std::floor(xs[j]);
            if (f <= cfg_.integrality_tol || f >= 1.0 - cfg_.integrality_tol)
                continue;
            const double c = lp_.objective[j];
            if (up_locks_[j] == 0 && c <= 0.0 && std::ceil(xs[j]) <= upper[j])
                xs[j] = std::ceil(xs[j]);
            else if (down_locks_[j] == 0 && c >= 0.0 && std::floor(xs[j]) >= lower[j])
                xs[j] = std::floor(xs[j]);
        }
    }

    std::optional<std::size_t> most_fractional(const std::vector<double>& xs) const {
        const bool prioritized =
            cfg_.branching == SolverConfig::Branching::Prioritized && cfg_.priority.size() == xs.size();
        std::optional<std::size_t> best;
        double best_dist = -1.0;
        int best_priority = 0;
        for (std::size_t j = 0; j < xs.size(); ++j) {
            if (!lp_.is_integer(j))
                continue;
            const double f = xs[j] - std::floor(xs[j]);
            if (f <= cfg_.integrality_tol || f >= 1.0 - cfg_.integrality_tol)
                continue;
            const double dist = std::min(f, 1.0 - f);
            const int prio = prioritized ? cfg_.priority[j] : 0;
            if (best && prio < best_priority)
                continue;
            // ties keep the lowest index
            if ((best && prio > best_priority) || dist > best_dist + 1e-12) {
                best_priority = prio;
                best_dist = dist;
                best = j;
            }
        }
        return best;
    }

    /// Fixes integers at their rounded values and re-solves the continuous part.
    bool try_incumbent(const std::vector<double>& xs, std::vector<double> lower, std::vector<double> upper,
                       const Basis* warm) {
        for (std::size_t j = 0; j < xs.size(); ++j)
            if (lp_.is_integer(j)) {
                const double r = std::round(xs[j]);
                if (r < lower[j] - cfg_.integrality_tol || r > upper[j] + cfg_.integrality_tol)
                    return false;
                lower[j] = upper[j] = r;
            }
        LpSolution pol = simplex_.solve(lower, upper, warm);
        if (pol.status != LpStatus::Optimal)
            return false;
        for (std::size_t j = 0; j < xs.size(); ++j)
            if (lp_.is_integer(j))
                pol.primal[j] = lower[j];
        if (!check_solution(lp_, pol.primal, 1e-6).empty())
            return false;
        const double obj = lp_.evaluate_objective(pol.primal);
        if (obj < incumbent_obj_ - 1e-9 * std::max(1.0, std::abs(obj))) {
            incumbent_obj_ = obj;
            incumbent_ = std::move(pol.primal);
            new_incumbent_flag_ = true;
            return true;
        }
        return false;
    }

    /// Fractional diving: rounds the least fractional integers in batches and
    /// re-solves until the LP point is integral or the dive fails.
    void dive(std::vector<double> x, std::vector<double> lower, std::vector<double> upper,
              std::shared_ptr<const Basis> basis) {
        for (std::size_t step = 0; step < kDiveSteps; ++step) {
            std::vector<std::pair<double, std::size_t>> frac;
            for (std::size_t j = 0; j < x.size(); ++j) {
                if (!lp_.is_integer(j))
                    continue;
                const double f = x[j] - std::floor(x[j]);
                if (f > cfg_.integrality_tol && f < 1.0 - cfg_.integrality_tol)
                    frac.emplace_back(std::min(f, 1.0 - f), j);
            }
            if (frac.empty()) {
                try_incumbent(x, lower, upper, basis.get());
                return;
            }
            if (std::isfinite(incumbent_obj_) && lp_.evaluate_objective(x) >= incumbent_obj_)
                return;
            std::sort(frac.begin(), frac.end());
            const std::size_t batch = std::max<std::size_t>(1, frac.size() / 8);
            const std::size_t first = frac.front().second;
            const double nearest = std::round(x[first]);
            const double flip = nearest > x[first] ? std::floor(x[first]) : std::ceil(x[first]);
            // attempts in order: batch with integral values frozen, batch alone,
            // nearest single rounding, flipped single rounding
            LpSolution s;
            std::vector<double> trial_lower, trial_upper;
            for (int attempt = 0; attempt < 4; ++attempt) {
                trial_lower = lower;
                trial_upper = upper;
                if (attempt == 0)
                    for (std::size_t j = 0; j < x.size(); ++j)
                        if (lp_.is_integer(j) && std::abs(x[j] - std::round(x[j])) <= cfg_.integrality_tol)
                            trial_lower[j] = trial_upper[j] = std::round(x[j]);
                if (attempt < 2) {
                    for (std::size_t k = 0; k < batch; ++k) {
                        const std::size_t j = frac[k].second;
                        trial_lower[j] = trial_upper[j] = std::round(x[j]);
                    }
                } else {
                    const double v = attempt == 2 ? nearest : flip;
                    if (v < lower[first] || v > upper[first])
                        continue;
                    trial_lower[first] = trial_upper[first] = v;
                }
                s = simplex_.solve(trial_lower, trial_upper, basis.get());
                if (s.status == LpStatus::Optimal)
                    break;
            }
            if (s.status != LpStatus::Optimal)
                return;
            lower = std::move(trial_lower);
            upper = std::move(trial_upper);
            x = std::move(s.primal);
            basis = s.basis;
        }
    }

    /// Fixes integers on which the incumbent and the node relaxation agree and
    /// searches the rest with a node-limited sub-tree.
    void search_neighborhood(const std::vector<double>& x, std::vector<double> lower, std::vector<double> upper,
                             double elapsed) {
        if (incumbent_.empty())
            return;
        std::size_t free = 0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (!lp_.is_integer(j))
                continue;
            if (std::abs(incumbent_[j] - x[j]) <= cfg_.integrality_tol)
                lower[j] = upper[j] = incumbent_[j];
            else
                ++free;
        }
        if (free == 0)
            return;
        LinearProgram sub = lp_;
        sub.lower = std::move(lower);
        sub.upper = std::move(upper);
        SolverConfig sub_cfg = cfg_;
        sub_cfg.node_limit = kNeighborhoodNodes;
        sub_cfg.node_log = nullptr;
        sub_cfg.root_heuristic = nullptr;
        if (cfg_.time_limit > 0) {
            sub_cfg.time_limit = cfg_.time_limit - elapsed;
            if (sub_cfg.time_limit <= 0)
                return;
        }
        BranchAndBound inner(sub, sub_cfg, false);
        inner.incumbent_obj_ = incumbent_obj_;
        const MipResult r = inner.run();
        if (r.incumbent.empty() || !(r.objective < incumbent_obj_ - 1e-9 * std::max(1.0, std::abs(r.objective))))
            return;
        if (!check_solution(lp_, r.incumbent, 1e-6).empty())
            return;
        incumbent_obj_ = r.objective;
        incumbent_ = r.incumbent;
        new_incumbent_flag_ = true;
    }

    void run_root_heuristic(const std::vector<double>& root, MipResult& res) {
        auto proposal = cfg_.root_heuristic(root, cfg_.seed);
        if (!proposal || proposal->size() != lp_.num_cols())
            return;
        if (try_incumbent(*proposal, lp_.lower, lp_.upper, nullptr)) {
            res.root_heuristic_used = true;
            new_incumbent_flag_ = false;  // the root itself is not a plunge trigger
        }
    }

    const LinearProgram& lp_;
    const SolverConfig& cfg_;
    SimplexSolver simplex_;
    std::vector<int> up_locks_, down_locks_;
    std::vector<double> incumbent_;
    double incumbent_obj_ = kInf;
    bool new_incumbent_flag_ = false;
    bool neighborhood_ = true;
};

}  // namespace

MipResult solve_milp(const LinearProgram& lp, const SolverConfig& cfg) {
    if (!(cfg.gap > 0.0) || !(cfg.feasibility_tol > 0.0) || !(cfg.integrality_tol > 0.0))
        throw PlannerError(ErrorCode::InvalidConfig, "solver tolerances must be positive");
    BranchAndBound bb(lp, cfg);
    return bb.run();
}

}  // namespace planner
