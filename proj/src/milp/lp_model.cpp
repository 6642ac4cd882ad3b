#include "drcvar/milp/lp_model.hpp"

#include "drcvar/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fmt/format.h>
#include <string_view>

namespace drcvar::milp {

bool operator==(const Column& a, const Column& b) {
    return a.name == b.name && a.lower == b.lower && a.upper == b.upper &&
           a.objective == b.objective && a.binary == b.binary;
}

bool operator==(const Term& a, const Term& b) {
    return a.column == b.column && a.coefficient == b.coefficient;
}

bool operator==(const Row& a, const Row& b) {
    return a.name == b.name && a.terms == b.terms && a.relation == b.relation && a.rhs == b.rhs;
}

bool is_valid_lp_name(const std::string& name) {
    constexpr std::string_view extra = "!\"#$%&()/,.;?@_`'{}|~";
    if (name.empty() || name.size() > 255) return false;
    const unsigned char first = static_cast<unsigned char>(name.front());
    if (std::isdigit(first) || first == '.') return false;
    // A leading e/E followed by a digit could be read as an exponent.
    if ((first == 'e' || first == 'E') && name.size() > 1 &&
        (std::isdigit(static_cast<unsigned char>(name[1])) || name[1] == '+' || name[1] == '-'))
        return false;
    for (char ch : name) {
        const auto c = static_cast<unsigned char>(ch);
        if (!std::isalnum(c) && extra.find(ch) == std::string_view::npos) return false;
    }
    static constexpr std::string_view reserved[] = {"inf", "infinity", "free"};
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return std::find(std::begin(reserved), std::end(reserved), lower) == std::end(reserved);
}

namespace {

void check_bounds(const std::string& name, double lower, double upper) {
    if (std::isnan(lower) || std::isnan(upper) || lower == kInfinity || upper == -kInfinity ||
        lower > upper)
        throw InputError(fmt::format("column '{}' has invalid bounds [{}, {}]", name, lower, upper));
}

} // namespace

int LpModel::add_column(std::string name, double lower, double upper, double objective) {
    const int index = column_count();
    if (name.empty()) name = fmt::format("x{}", index);
    if (!is_valid_lp_name(name)) throw InputError(fmt::format("invalid column name '{}'", name));
    check_bounds(name, lower, upper);
    if (!std::isfinite(objective))
        throw InputError(fmt::format("column '{}' has a non-finite objective", name));
    columns_.push_back({std::move(name), lower, upper, objective, false});
    return index;
}

int LpModel::add_binary(std::string name, double objective) {
    const int index = add_column(std::move(name), 0.0, 1.0, objective);
    columns_.back().binary = true;
    return index;
}

int LpModel::add_row(std::string name, std::vector<Term> terms, Relation relation, double rhs) {
    const int index = row_count();
    if (name.empty()) name = fmt::format("r{}", index);
    if (!is_valid_lp_name(name)) throw InputError(fmt::format("invalid row name '{}'", name));
    if (!std::isfinite(rhs)) throw InputError(fmt::format("row '{}' has a non-finite rhs", name));
    for (const auto& t : terms) {
        if (t.column < 0 || t.column >= column_count())
            throw InputError(fmt::format("row '{}' references unknown column {}", name, t.column));
        if (!std::isfinite(t.coefficient))
            throw InputError(fmt::format("row '{}' has a non-finite coefficient", name));
    }
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return a.column < b.column; });
    std::vector<Term> merged;
    merged.reserve(terms.size());
    for (const auto& t : terms) {
        if (!merged.empty() && merged.back().column == t.column)
            merged.back().coefficient += t.coefficient;
        else
            merged.push_back(t);
    }
    std::erase_if(merged, [](const Term& t) { return t.coefficient == 0.0; });
    rows_.push_back({std::move(name), std::move(merged), relation, rhs});
    return index;
}

void LpModel::set_objective(int column, double coefficient) {
    if (!std::isfinite(coefficient)) throw InputError("non-finite objective coefficient");
    columns_.at(static_cast<std::size_t>(column)).objective = coefficient;
}

void LpModel::set_bounds(int column, double lower, double upper) {
    auto& col = columns_.at(static_cast<std::size_t>(column));
    check_bounds(col.name, lower, upper);
    col.lower = lower;
    col.upper = upper;
}

bool LpModel::has_binaries() const noexcept {
    return std::any_of(columns_.begin(), columns_.end(), [](const Column& c) { return c.binary; });
}

void LpModel::validate() const {
    for (const auto& col : columns_) {
        check_bounds(col.name, col.lower, col.upper);
        if (col.binary && (col.lower < 0.0 || col.upper > 1.0))
            throw InputError(fmt::format("binary column '{}' has bounds outside [0, 1]", col.name));
        if (!std::isfinite(col.objective))
            throw InputError(fmt::format("column '{}' has a non-finite objective", col.name));
    }
    for (const auto& row : rows_) {
        if (!std::isfinite(row.rhs))
            throw InputError(fmt::format("row '{}' has a non-finite rhs", row.name));
        for (const auto& t : row.terms)
            if (t.column < 0 || t.column >= column_count() || !std::isfinite(t.coefficient))
                throw InputError(fmt::format("row '{}' has an invalid term", row.name));
    }
}

double LpModel::objective_value(const std::vector<double>& x) const {
    double value = 0.0;
    for (std::size_t j = 0; j < columns_.size(); ++j) value += columns_[j].objective * x[j];
    return value;
}

double LpModel::row_violation(int i, const std::vector<double>& x) const {
    const auto& row = rows_.at(static_cast<std::size_t>(i));
    double activity = 0.0;
    for (const auto& t : row.terms) activity += t.coefficient * x[static_cast<std::size_t>(t.column)];
    double violation = 0.0;
    switch (row.relation) {
    case Relation::LessEqual: violation = std::max(0.0, activity - row.rhs); break;
    case Relation::GreaterEqual: violation = std::max(0.0, row.rhs - activity); break;
    case Relation::Equal: violation = std::abs(activity - row.rhs); break;
    }
    return violation / (1.0 + std::abs(row.rhs));
}

} // namespace drcvar::milp
