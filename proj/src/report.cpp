#include "planner/report.hpp"

#include <sstream>

#include <fmt/format.h>

#include "planner/error.hpp"

namespace planner {

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quoted) {
            if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                cur += '"';
                ++k;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

void ReportTable::add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size())
        throw PlannerError(ErrorCode::InvalidArgument, "row width " + std::to_string(row.size()) +
                                                           " does not match header width " +
                                                           std::to_string(columns_.size()));
    rows_.push_back(std::move(row));
}

std::size_t ReportTable::column_index(const std::string& name) const {
    for (std::size_t c = 0; c < columns_.size(); ++c)
        if (columns_[c] == name)
            return c;
    throw PlannerError(ErrorCode::InvalidArgument, "no column '" + name + "'");
}

const ReportTable::Cell& ReportTable::at(std::size_t r, const std::string& column) const {
    return rows_.at(r).at(column_index(column));
}

std::optional<double> ReportTable::number(std::size_t r, const std::string& column) const {
    const auto& cell = at(r, column);
    if (auto d = std::get_if<double>(&cell))
        return *d;
    if (auto l = std::get_if<long>(&cell))
        return static_cast<double>(*l);
    return std::nullopt;
}

std::string ReportTable::text(std::size_t r, const std::string& column) const {
    const auto& cell = at(r, column);
    if (auto s = std::get_if<std::string>(&cell))
        return *s;
    return {};
}

void ReportTable::write_csv(std::ostream& out, int precision) const {
    for (std::size_t c = 0; c < columns_.size(); ++c)
        out << (c ? "," : "") << quote(columns_[c]);
    out << '\n';
    for (const auto& row : rows_) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                out << ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>)
                        out << fmt::format("{:.{}f}", v, precision);
                    else if constexpr (std::is_same_v<T, long>)
                        out << v;
                    else if constexpr (std::is_same_v<T, std::string>)
                        out << quote(v);
                },
                row[c]);
        }
        out << '\n';
    }
}

std::string ReportTable::to_csv(int precision) const {
    std::ostringstream out;
    write_csv(out, precision);
    return out.str();
}

ReportTable parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw PlannerError(ErrorCode::ParseError, "empty CSV");
    ReportTable table(split_record(line));
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<ReportTable::Cell> row;
        for (auto& field : split_record(line)) {
            if (field.empty()) {
                row.emplace_back(std::monostate{});
                continue;
            }
            try {
                std::size_t used = 0;
                const double d = std::stod(field, &used);
                if (used == field.size()) {
                    row.emplace_back(d);
                    continue;
                }
            } catch (const std::exception&) {
            }
            row.emplace_back(field);
        }
        table.add_row(std::move(row));
    }
    return table;
}

}  // namespace planner
