#include "planner/linear_program.hpp"

#include <algorithm>
#include <stdexcept>

namespace planner {

int LinearProgram::add_column(double cost, double lb, double ub, VarType t) {
    objective.push_back(cost);
    lower.push_back(lb);
    upper.push_back(ub);
    type.push_back(t);
    return static_cast<int>(objective.size() - 1);
}

void LinearProgram::add_row(std::vector<std::pair<int, double>> terms, Sense s, double b, std::string name) {
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& c) { return a.first < c.first; });
    std::size_t out = 0;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        if (terms[k].first < 0 || static_cast<std::size_t>(terms[k].first) >= num_cols())
            throw std::out_of_range("add_row: column index " + std::to_string(terms[k].first) +
                                    " is not allocated");
        if (out > 0 && terms[out - 1].first == terms[k].first)
            terms[out - 1].second += terms[k].second;
        else
            terms[out++] = terms[k];
    }
    terms.resize(out);
    for (const auto& [col, val] : terms) {
        if (val == 0.0)
            continue;
        row_index.push_back(col);
        row_value.push_back(val);
    }
    row_start.push_back(row_value.size());
    sense.push_back(s);
    rhs.push_back(b);
    row_name.push_back(std::move(name));
}

std::size_t LinearProgram::num_integer() const {
    return static_cast<std::size_t>(
        std::count_if(type.begin(), type.end(), [](VarType t) { return t != VarType::Continuous; }));
}

double LinearProgram::evaluate_objective(const std::vector<double>& x) const {
    double v = objective_constant;
    for (std::size_t j = 0; j < objective.size(); ++j)
        v += objective[j] * x[j];
    return v;
}

double LinearProgram::row_activity(std::size_t row, const std::vector<double>& x) const {
    double v = 0.0;
    for (std::size_t k = row_start[row]; k < row_start[row + 1]; ++k)
        v += row_value[k] * x[static_cast<std::size_t>(row_index[k])];
    return v;
}

bool LinearProgram::same_numbers(const LinearProgram& o) const {
    return objective == o.objective && objective_constant == o.objective_constant && lower == o.lower &&
           upper == o.upper && type == o.type && row_start == o.row_start && row_index == o.row_index &&
           row_value == o.row_value && sense == o.sense && rhs == o.rhs;
}

}  // namespace planner
