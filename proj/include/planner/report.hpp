#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace planner {

/// Labeled rows x columns table; cells are numbers, text or empty.
class ReportTable {
public:
    using Cell = std::variant<std::monostate, double, long, std::string>;

    explicit ReportTable(std::vector<std::string> columns = {}) : columns_(std::move(columns)) {}

    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t rows() const { return rows_.size(); }
    const std::vector<Cell>& row(std::size_t r) const { return rows_.at(r); }

    /// Throws InvalidArgument when the width does not match the header.
    void add_row(std::vector<Cell> row);

    std::size_t column_index(const std::string& name) const;
    const Cell& at(std::size_t r, const std::string& column) const;
    std::optional<double> number(std::size_t r, const std::string& column) const;
    std::string text(std::size_t r, const std::string& column) const;

    /// Comma-delimited with a header row; '.' decimal point, fixed precision for
    /// doubles, empty field for missing cells. Fields are quoted when needed.
    void write_csv(std::ostream& out, int precision = 4) const;
    std::string to_csv(int precision = 4) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

/// Parses the CSV written by ReportTable (numbers come back as doubles).
ReportTable parse_csv(const std::string& text);

}  // namespace planner
