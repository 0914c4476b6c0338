#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace planner {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarType { Continuous, Integer, Binary };
enum class Sense { LessEqual, Equal, GreaterEqual };

/// Sparse linear (mixed-integer) program in row form:
///   min c'x + constant  s.t.  a_r'x (sense_r) b_r,  lb <= x <= ub.
struct LinearProgram {
    std::vector<double> objective;
    double objective_constant = 0.0;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<VarType> type;

    std::vector<std::size_t> row_start{0};
    std::vector<int> row_index;
    std::vector<double> row_value;
    std::vector<Sense> sense;
    std::vector<double> rhs;
    std::vector<std::string> row_name;

    std::size_t num_cols() const { return objective.size(); }
    std::size_t num_rows() const { return rhs.size(); }
    std::size_t num_nonzeros() const { return row_value.size(); }

    int add_column(double cost, double lb, double ub, VarType t);
    /// Appends a row; duplicate column indices are merged and zeros dropped.
    void add_row(std::vector<std::pair<int, double>> terms, Sense s, double b, std::string name = {});

    bool is_integer(std::size_t col) const { return type[col] != VarType::Continuous; }
    std::size_t num_integer() const;

    double evaluate_objective(const std::vector<double>& x) const;
    double row_activity(std::size_t row, const std::vector<double>& x) const;

    /// Numeric content equality (names ignored).
    bool same_numbers(const LinearProgram& other) const;
};

}  // namespace planner
