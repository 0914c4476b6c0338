#include <algorithm>
#include <cmath>

#include "planner/error.hpp"
#include "planner/solver.hpp"

namespace planner {

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterationLimit: return "iteration-limit";
    }
    return "?";
}

using State = Basis::State;

struct SimplexSolver::Impl {
    LpOptions opt;
    std::size_t n = 0, m = 0;

    // structural columns (CSC); slack n+r is the unit column e_r
    std::vector<std::size_t> col_start;
    std::vector<int> col_row;
    std::vector<double> col_val;
    std::vector<double> cost;  // n+m
    std::vector<double> rhs;
    std::vector<double> base_lower, base_upper;  // n+m
    double constant = 0.0;

    // per-solve state
    std::vector<double> lb, ub, x;
    std::vector<State> state;
    std::vector<int> head;
    std::vector<int> pos;  // position in basis or -1

    // dense LU of the basis, rows permuted by `order`, row-major
    std::vector<double> lu;
    std::vector<std::size_t> order;
    struct Eta {
        std::size_t r;
        double pivot;
        std::vector<std::pair<std::size_t, double>> col;  // excluding r
    };
    std::vector<Eta> etas;

    std::size_t bland_count = 0;

    explicit Impl(const LinearProgram& lp, LpOptions o) : opt(o) {
        n = lp.num_cols();
        m = lp.num_rows();
        constant = lp.objective_constant;
        std::vector<std::size_t> count(n + 1, 0);
        for (int c : lp.row_index)
            ++count[static_cast<std::size_t>(c) + 1];
        col_start.assign(n + 1, 0);
        for (std::size_t j = 0; j < n; ++j)
            col_start[j + 1] = col_start[j] + count[j + 1];
        col_row.resize(lp.row_index.size());
        col_val.resize(lp.row_value.size());
        std::vector<std::size_t> fill(col_start.begin(), col_start.end() - 1);
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t k = lp.row_start[r]; k < lp.row_start[r + 1]; ++k) {
                const auto c = static_cast<std::size_t>(lp.row_index[k]);
                col_row[fill[c]] = static_cast<int>(r);
                col_val[fill[c]++] = lp.row_value[k];
            }
        cost.assign(n + m, 0.0);
        std::copy(lp.objective.begin(), lp.objective.end(), cost.begin());
        rhs = lp.rhs;
        base_lower.resize(n + m);
        base_upper.resize(n + m);
        for (std::size_t j = 0; j < n; ++j) {
            base_lower[j] = lp.lower[j];
            base_upper[j] = lp.upper[j];
        }
        // a'x + s = b
        for (std::size_t r = 0; r < m; ++r) {
            switch (lp.sense[r]) {
                case Sense::LessEqual: base_lower[n + r] = 0.0; base_upper[n + r] = kInf; break;
                case Sense::GreaterEqual: base_lower[n + r] = -kInf; base_upper[n + r] = 0.0; break;
                case Sense::Equal: base_lower[n + r] = 0.0; base_upper[n + r] = 0.0; break;
            }
        }
    }

    // --- column access -------------------------------------------------
    double dot_column(std::size_t j, const std::vector<double>& v) const {
        if (j >= n)
            return v[j - n];
        double s = 0.0;
        for (std::size_t k = col_start[j]; k < col_start[j + 1]; ++k)
            s += col_val[k] * v[static_cast<std::size_t>(col_row[k])];
        return s;
    }

    void load_column(std::size_t j, std::vector<double>& v) const {
        std::fill(v.begin(), v.end(), 0.0);
        if (j >= n) {
            v[j - n] = 1.0;
            return;
        }
        for (std::size_t k = col_start[j]; k < col_start[j + 1]; ++k)
            v[static_cast<std::size_t>(col_row[k])] = col_val[k];
    }

    // --- factorization -------------------------------------------------
    /// Returns the basis position that could not be pivoted, or m on success.
    std::size_t factorize() {
        etas.clear();
        lu.assign(m * m, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            const auto j = static_cast<std::size_t>(head[k]);
            if (j >= n) {
                lu[(j - n) * m + k] = 1.0;
            } else {
                for (std::size_t e = col_start[j]; e < col_start[j + 1]; ++e)
                    lu[static_cast<std::size_t>(col_row[e]) * m + k] = col_val[e];
            }
        }
        order.resize(m);
        for (std::size_t r = 0; r < m; ++r)
            order[r] = r;
        for (std::size_t k = 0; k < m; ++k) {
            std::size_t best = k;
            double best_abs = std::abs(lu[order[k] * m + k]);
            for (std::size_t i = k + 1; i < m; ++i) {
                const double a = std::abs(lu[order[i] * m + k]);
                if (a > best_abs) {
                    best_abs = a;
                    best = i;
                }
            }
            if (best_abs < 1e-11)
                return k;
            std::swap(order[k], order[best]);
            const double* prow = &lu[order[k] * m];
            const double piv = prow[k];
            for (std::size_t i = k + 1; i < m; ++i) {
                double* row = &lu[order[i] * m];
                if (row[k] == 0.0)
                    continue;
                const double l = row[k] / piv;
                row[k] = l;
                for (std::size_t c = k + 1; c < m; ++c)
                    if (prow[c] != 0.0)
                        row[c] -= l * prow[c];
            }
        }
        return m;
    }

    void refactor() {
        for (std::size_t attempt = 0; attempt <= m; ++attempt) {
            const std::size_t bad = factorize();
            if (bad == m)
                return;
            // Replace the offending column with the slack of an unpivoted row.
            std::size_t slack = n + m;
            for (std::size_t i = bad; i < m && slack == n + m; ++i)
                if (pos[n + order[i]] < 0)
                    slack = n + order[i];
            for (std::size_t r = 0; r < m && slack == n + m; ++r)
                if (pos[n + r] < 0)
                    slack = n + r;
            if (slack == n + m)
                break;
            const auto out = static_cast<std::size_t>(head[bad]);
            make_nonbasic_near(out);
            pos[out] = -1;
            head[bad] = static_cast<int>(slack);
            pos[slack] = static_cast<int>(bad);
            state[slack] = State::Basic;
        }
        throw PlannerError(ErrorCode::NumericalBreakdown,
                           "simplex: basis could not be refactorized after repairs (m=" + std::to_string(m) + ")");
    }

    void make_nonbasic_near(std::size_t j) {
        const bool has_l = std::isfinite(lb[j]), has_u = std::isfinite(ub[j]);
        if (has_l && (!has_u || std::abs(x[j] - lb[j]) <= std::abs(ub[j] - x[j]))) {
            state[j] = State::AtLower;
            x[j] = lb[j];
        } else if (has_u) {
            state[j] = State::AtUpper;
            x[j] = ub[j];
        } else {
            state[j] = State::Free;
        }
    }

    // B a = v
    void ftran(std::vector<double>& v) const {
        std::vector<double> w(m);
        for (std::size_t k = 0; k < m; ++k)
            w[k] = v[order[k]];
        for (std::size_t k = 0; k < m; ++k) {
            const double wk = w[k];
            if (wk == 0.0)
                continue;
            for (std::size_t i = k + 1; i < m; ++i) {
                const double l = lu[order[i] * m + k];
                if (l != 0.0)
                    w[i] -= l * wk;
            }
        }
        for (std::size_t kk = m; kk-- > 0;) {
            const double* row = &lu[order[kk] * m];
            double s = w[kk];
            for (std::size_t c = kk + 1; c < m; ++c)
                if (row[c] != 0.0)
                    s -= row[c] * w[c];
            w[kk] = s / row[kk];
        }
        for (const auto& e : etas) {
            const double ar = w[e.r] / e.pivot;
            w[e.r] = ar;
            if (ar != 0.0)
                for (const auto& [i, a] : e.col)
                    w[i] -= a * ar;
        }
        v.swap(w);
    }

    // B' y = c
    void btran(std::vector<double>& c) const {
        std::vector<double> u = c;
        for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
            double s = u[it->r];
            for (const auto& [i, a] : it->col)
                s -= u[i] * a;
            u[it->r] = s / it->pivot;
        }
        // U' z = u  (forward)
        std::vector<double> z(m, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            const double* row = &lu[order[k] * m];
            const double zk = u[k] / row[k];
            z[k] = zk;
            if (zk == 0.0)
                continue;
            for (std::size_t c = k + 1; c < m; ++c)
                if (row[c] != 0.0)
                    u[c] -= row[c] * zk;
        }
        // L' w = z  (backward)
        for (std::size_t kk = m; kk-- > 0;) {
            const double* row = &lu[order[kk] * m];
            const double wk = z[kk];
            if (wk == 0.0)
                continue;
            for (std::size_t i = 0; i < kk; ++i)
                if (row[i] != 0.0)
                    z[i] -= row[i] * wk;
        }
        for (std::size_t k = 0; k < m; ++k)
            c[order[k]] = z[k];
    }

    void compute_basic_values() {
        std::vector<double> r = rhs;
        for (std::size_t j = 0; j < n + m; ++j) {
            if (state[j] == State::Basic || x[j] == 0.0)
                continue;
            if (j >= n) {
                r[j - n] -= x[j];
            } else {
                for (std::size_t k = col_start[j]; k < col_start[j + 1]; ++k)
                    r[static_cast<std::size_t>(col_row[k])] -= col_val[k] * x[j];
            }
        }
        ftran(r);
        for (std::size_t k = 0; k < m; ++k)
            x[static_cast<std::size_t>(head[k])] = r[k];
    }

    // --- setup -----------------------------------------------------------
    void place_nonbasic(std::size_t j, State preferred) {
        const bool has_l = std::isfinite(lb[j]), has_u = std::isfinite(ub[j]);
        State s = preferred;
        if (s == State::AtLower && !has_l)
            s = has_u ? State::AtUpper : State::Free;
        else if (s == State::AtUpper && !has_u)
            s = has_l ? State::AtLower : State::Free;
        else if (s == State::Free && (has_l || has_u))
            s = has_l ? State::AtLower : State::AtUpper;
        state[j] = s;
        x[j] = s == State::AtLower ? lb[j] : s == State::AtUpper ? ub[j] : 0.0;
    }

    void cold_start() {
        head.resize(m);
        pos.assign(n + m, -1);
        for (std::size_t j = 0; j < n; ++j)
            place_nonbasic(j, State::AtLower);
        for (std::size_t r = 0; r < m; ++r) {
            head[r] = static_cast<int>(n + r);
            pos[n + r] = static_cast<int>(r);
            state[n + r] = State::Basic;
        }
    }

    bool warm_start(const Basis& b) {
        if (b.head.size() != m || b.state.size() != n + m)
            return false;
        pos.assign(n + m, -1);
        head = b.head;
        for (std::size_t k = 0; k < m; ++k) {
            const auto j = static_cast<std::size_t>(head[k]);
            if (j >= n + m || pos[j] >= 0 || b.state[j] != State::Basic)
                return false;
            pos[j] = static_cast<int>(k);
        }
        for (std::size_t j = 0; j < n + m; ++j) {
            if (pos[j] >= 0) {
                state[j] = State::Basic;
                x[j] = 0.0;
            } else {
                if (b.state[j] == State::Basic)
                    return false;
                place_nonbasic(j, b.state[j]);
            }
        }
        return true;
    }

    // --- main loop -------------------------------------------------------
    LpSolution run(const std::vector<double>& lower, const std::vector<double>& upper, const Basis* warm) {
        lb = base_lower;
        ub = base_upper;
        std::copy(lower.begin(), lower.end(), lb.begin());
        std::copy(upper.begin(), upper.end(), ub.begin());
        x.assign(n + m, 0.0);
        state.assign(n + m, State::AtLower);

        LpSolution sol;
        for (std::size_t j = 0; j < n; ++j)
            if (lb[j] > ub[j] + opt.feasibility_tol) {
                sol.status = LpStatus::Infeasible;
                return sol;
            }

        if (!warm || !warm_start(*warm))
            cold_start();
        refactor();
        compute_basic_values();

        const std::size_t limit =
            opt.iteration_limit ? opt.iteration_limit : 20000 + 50 * (n + m);
        const double ftol = opt.feasibility_tol;
        const double dtol = opt.optimality_tol;
        bool bland = false;
        std::size_t degenerate = 0;
        int phase = 0;
        std::size_t since_refactor = 0;
        std::size_t verify_retries = 0;

        std::vector<double> cb(m), pi(m), alpha(m);

        for (std::size_t iter = 0;; ++iter) {
            if (iter >= limit) {
                sol.status = LpStatus::IterationLimit;
                sol.iterations = iter;
                break;
            }
            if (since_refactor >= opt.refactor_interval) {
                refactor();
                compute_basic_values();
                since_refactor = 0;
            }

            bool infeasible = false;
            for (std::size_t k = 0; k < m; ++k) {
                const auto j = static_cast<std::size_t>(head[k]);
                if (x[j] < lb[j] - ftol) {
                    cb[k] = -1.0;
                    infeasible = true;
                } else if (x[j] > ub[j] + ftol) {
                    cb[k] = 1.0;
                    infeasible = true;
                } else {
                    cb[k] = 0.0;
                }
            }
            const int want = infeasible ? 1 : 2;
            if (want != phase) {
                phase = want;
                bland = false;
                degenerate = 0;
            }
            if (phase == 2)
                for (std::size_t k = 0; k < m; ++k)
                    cb[k] = cost[static_cast<std::size_t>(head[k])];

            pi = cb;
            btran(pi);

            // pricing
            std::size_t q = n + m;
            double best = 0.0;
            int dir = 0;
            for (std::size_t j = 0; j < n + m; ++j) {
                const State s = state[j];
                if (s == State::Basic || lb[j] == ub[j])
                    continue;
                const double d = (phase == 2 ? cost[j] : 0.0) - dot_column(j, pi);
                int dj = 0;
                if (s == State::AtLower && d < -dtol)
                    dj = 1;
                else if (s == State::AtUpper && d > dtol)
                    dj = -1;
                else if (s == State::Free && std::abs(d) > dtol)
                    dj = d < 0 ? 1 : -1;
                if (!dj)
                    continue;
                if (bland) {
                    q = j;
                    dir = dj;
                    break;
                }
                if (std::abs(d) > best) {
                    best = std::abs(d);
                    q = j;
                    dir = dj;
                }
            }

            if (q == n + m) {
                // Confirm on a fresh factorization before declaring a result.
                if (since_refactor > 0 && verify_retries < 3) {
                    ++verify_retries;
                    refactor();
                    compute_basic_values();
                    since_refactor = 0;
                    continue;
                }
                sol.status = phase == 1 ? LpStatus::Infeasible : LpStatus::Optimal;
                sol.iterations = iter;
                break;
            }

            load_column(q, alpha);
            ftran(alpha);

            // ratio test; basic k moves at rate g = -dir * alpha_k
            const double flip_range = std::isfinite(lb[q]) && std::isfinite(ub[q]) ? ub[q] - lb[q] : kInf;
            std::size_t leave = m;
            double step = kInf;
            bool leave_at_upper = false;

            auto exact_limit = [&](std::size_t k, double g, bool& to_upper) -> double {
                const auto j = static_cast<std::size_t>(head[k]);
                const double v = x[j];
                if (g > 0) {
                    if (phase == 1 && v < lb[j] - ftol) {
                        to_upper = false;
                        return (lb[j] - v) / g;
                    }
                    if (phase == 1 && v > ub[j] + ftol)
                        return kInf;
                    if (!std::isfinite(ub[j]))
                        return kInf;
                    to_upper = true;
                    return std::max(0.0, (ub[j] - v) / g);
                }
                if (phase == 1 && v > ub[j] + ftol) {
                    to_upper = true;
                    return (ub[j] - v) / g;
                }
                if (phase == 1 && v < lb[j] - ftol)
                    return kInf;
                if (!std::isfinite(lb[j]))
                    return kInf;
                to_upper = false;
                return std::max(0.0, (lb[j] - v) / g);
            };

            if (bland) {
                for (std::size_t k = 0; k < m; ++k) {
                    if (std::abs(alpha[k]) <= opt.pivot_tol)
                        continue;
                    const double g = -dir * alpha[k];
                    bool up = false;
                    const double t = exact_limit(k, g, up);
                    if (!std::isfinite(t))
                        continue;
                    if (t < step - 1e-12 ||
                        (t <= step + 1e-12 && leave < m && head[k] < head[leave])) {
                        step = t;
                        leave = k;
                        leave_at_upper = up;
                    }
                }
            } else {
                // Harris two-pass: bound relaxed by ftol, then the largest pivot.
                double relaxed = kInf;
                for (std::size_t k = 0; k < m; ++k) {
                    if (std::abs(alpha[k]) <= opt.pivot_tol)
                        continue;
                    const double g = -dir * alpha[k];
                    bool up = false;
                    const double t = exact_limit(k, g, up);
                    if (!std::isfinite(t))
                        continue;
                    relaxed = std::min(relaxed, t + ftol / std::abs(g));
                }
                double best_pivot = 0.0;
                for (std::size_t k = 0; k < m; ++k) {
                    if (std::abs(alpha[k]) <= opt.pivot_tol)
                        continue;
                    const double g = -dir * alpha[k];
                    bool up = false;
                    const double t = exact_limit(k, g, up);
                    if (!std::isfinite(t) || t > relaxed)
                        continue;
                    if (std::abs(alpha[k]) > best_pivot) {
                        best_pivot = std::abs(alpha[k]);
                        step = t;
                        leave = k;
                        leave_at_upper = up;
                    }
                }
            }

            const bool flip = flip_range <= step;
            if (flip)
                step = flip_range;
            if (!std::isfinite(step)) {
                if (phase == 2) {
                    sol.status = LpStatus::Unbounded;
                    sol.iterations = iter;
                    break;
                }
                // Phase 1 directions are bounded in exact arithmetic; refresh and retry.
                if (verify_retries++ > 5)
                    throw PlannerError(ErrorCode::NumericalBreakdown, "simplex: unbounded phase-1 ray");
                refactor();
                compute_basic_values();
                since_refactor = 0;
                continue;
            }

            if (step <= 1e-12) {
                if (++degenerate >= opt.degeneracy_trigger && !bland) {
                    bland = true;
                    ++bland_count;
                }
            } else {
                degenerate = 0;
            }

            // update primal values
            x[q] += dir * step;
            for (std::size_t k = 0; k < m; ++k)
                if (alpha[k] != 0.0)
                    x[static_cast<std::size_t>(head[k])] -= dir * step * alpha[k];

            if (flip) {
                state[q] = state[q] == State::AtLower ? State::AtUpper : State::AtLower;
                x[q] = state[q] == State::AtLower ? lb[q] : ub[q];
                continue;
            }

            const auto p = static_cast<std::size_t>(head[leave]);
            state[p] = leave_at_upper ? State::AtUpper : State::AtLower;
            x[p] = leave_at_upper ? ub[p] : lb[p];
            pos[p] = -1;
            head[leave] = static_cast<int>(q);
            pos[q] = static_cast<int>(leave);
            state[q] = State::Basic;

            Eta e;
            e.r = leave;
            e.pivot = alpha[leave];
            for (std::size_t k = 0; k < m; ++k)
                if (k != leave && alpha[k] != 0.0)
                    e.col.emplace_back(k, alpha[k]);
            etas.push_back(std::move(e));
            ++since_refactor;
        }

        sol.primal.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
        sol.objective = constant;
        for (std::size_t j = 0; j < n; ++j)
            sol.objective += cost[j] * x[j];
        auto basis = std::make_shared<Basis>();
        basis->head = head;
        basis->state = state;
        sol.basis = std::move(basis);
        return sol;
    }
};

SimplexSolver::SimplexSolver(const LinearProgram& lp, LpOptions options)
    : impl_(std::make_unique<Impl>(lp, options)) {}
SimplexSolver::~SimplexSolver() = default;
SimplexSolver::SimplexSolver(SimplexSolver&&) noexcept = default;
SimplexSolver& SimplexSolver::operator=(SimplexSolver&&) noexcept = default;

LpSolution SimplexSolver::solve() {
    return impl_->run(std::vector<double>(impl_->base_lower.begin(), impl_->base_lower.begin() + static_cast<std::ptrdiff_t>(impl_->n)),
                      std::vector<double>(impl_->base_upper.begin(), impl_->base_upper.begin() + static_cast<std::ptrdiff_t>(impl_->n)),
                      nullptr);
}

LpSolution SimplexSolver::solve(const std::vector<double>& lower, const std::vector<double>& upper,
                                const Basis* warm) {
    return impl_->run(lower, upper, warm);
}

std::size_t SimplexSolver::bland_activations() const { return impl_->bland_count; }

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
    SimplexSolver s(lp, options);
    return s.solve();
}

}  // namespace planner
