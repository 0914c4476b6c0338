#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "planner/linear_program.hpp"

namespace planner {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };
enum class MipStatus { Optimal, GapLimit, TimeLimit, NodeLimit, Infeasible, Unbounded };

const char* to_string(LpStatus s);
const char* to_string(MipStatus s);

/// Simplex basis: basic variable per row position plus nonbasic placement.
/// Variables 0..n-1 are structural, n..n+m-1 are row slacks.
struct Basis {
    enum class State : std::uint8_t { Basic, AtLower, AtUpper, Free };
    std::vector<int> head;
    std::vector<State> state;
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> primal;
    double objective = 0.0;
    std::size_t iterations = 0;
    std::shared_ptr<const Basis> basis;
};

struct LpOptions {
    double feasibility_tol = 1e-7;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-9;
    std::size_t refactor_interval = 64;
    /// consecutive degenerate pivots before switching to Bland's rule
    std::size_t degeneracy_trigger = 50;
    std::size_t iteration_limit = 0;  // 0 = automatic
};

/// Bounded-variable revised primal simplex over a fixed constraint matrix.
/// Bounds may be overridden per solve, and a previous basis reused.
class SimplexSolver {
public:
    explicit SimplexSolver(const LinearProgram& lp, LpOptions options = {});
    ~SimplexSolver();
    SimplexSolver(SimplexSolver&&) noexcept;
    SimplexSolver& operator=(SimplexSolver&&) noexcept;

    LpSolution solve();
    LpSolution solve(const std::vector<double>& lower, const std::vector<double>& upper,
                     const Basis* warm = nullptr);

    /// Number of times Bland's rule was engaged across solves.
    std::size_t bland_activations() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Solves the continuous relaxation. Throws NumericalBreakdown when the basis
/// cannot be refactorized after repairs.
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

inline constexpr double kDefaultGap = 1e-6;

struct SolverConfig {
    double gap = kDefaultGap;
    double time_limit = 0.0;  // seconds, 0 = none
    std::size_t node_limit = 0;  // 0 = none
    double feasibility_tol = 1e-7;
    double integrality_tol = 1e-6;
    /// Prioritized picks the most fractional column among those with the
    /// highest `priority` entry before considering the rest.
    enum class Branching { MostFractional, Prioritized };
    Branching branching = Branching::MostFractional;
    std::vector<int> priority;
    std::uint64_t seed = 0;
    /// Optional CSV node log: node,bound,incumbent,gap,time
    std::ostream* node_log = nullptr;
    /// Root heuristic: proposes an integer assignment from the root LP
    /// solution. Integer entries are fixed and the continuous part re-solved.
    std::function<std::optional<std::vector<double>>(const std::vector<double>& root, std::uint64_t seed)>
        root_heuristic;
};

struct MipResult {
    MipStatus status = MipStatus::Infeasible;
    std::vector<double> incumbent;  // empty when none found
    double objective = kInf;
    double best_bound = -kInf;
    double gap = kInf;
    std::size_t nodes = 0;
    std::size_t lp_iterations = 0;
    double wall_time = 0.0;
    bool root_heuristic_used = false;
    /// global dual bound after each processed node
    std::vector<double> bound_trace;

    bool has_incumbent() const { return !incumbent.empty(); }
};

MipResult solve_milp(const LinearProgram& lp, const SolverConfig& cfg = {});

struct SolutionViolation {
    enum class Kind { Row, Bound, Integrality };
    Kind kind = Kind::Row;
    std::size_t index = 0;  // row or column
    std::string name;
    /// negative slack: how far the entry is outside its allowed range
    double slack = 0.0;
};

/// Every row, bound and integrality violation beyond `tol`.
std::vector<SolutionViolation> check_solution(const LinearProgram& lp, const std::vector<double>& x,
                                              double tol = 1e-6);

}  // namespace planner
