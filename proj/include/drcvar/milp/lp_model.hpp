#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace drcvar::milp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Column {
    std::string name;
    double lower = 0.0;
    double upper = kInfinity;
    double objective = 0.0;
    bool binary = false;
};

struct Term {
    int column;
    double coefficient;
};

struct Row {
    std::string name;
    std::vector<Term> terms; // sorted by column, no duplicates, no zeros
    Relation relation = Relation::LessEqual;
    double rhs = 0.0;
};

bool operator==(const Column& a, const Column& b);
bool operator==(const Term& a, const Term& b);
bool operator==(const Row& a, const Row& b);

/// Sparse linear program, always minimized. Columns may be flagged binary,
/// in which case their bounds are [0, 1].
class LpModel {
public:
    /// Names must be valid LP-file identifiers; an empty name is replaced by
    /// "x<index>". Throws InputError on invalid bounds or names.
    int add_column(std::string name, double lower, double upper, double objective = 0.0);
    int add_binary(std::string name, double objective = 0.0);

    /// Duplicate columns in `terms` are merged and zero coefficients dropped.
    int add_row(std::string name, std::vector<Term> terms, Relation relation, double rhs);

    void set_objective(int column, double coefficient);
    void set_bounds(int column, double lower, double upper);

    const std::vector<Column>& columns() const noexcept { return columns_; }
    const std::vector<Row>& rows() const noexcept { return rows_; }
    const Column& column(int j) const { return columns_.at(static_cast<std::size_t>(j)); }
    const Row& row(int i) const { return rows_.at(static_cast<std::size_t>(i)); }
    int column_count() const noexcept { return static_cast<int>(columns_.size()); }
    int row_count() const noexcept { return static_cast<int>(rows_.size()); }
    bool has_binaries() const noexcept;

    /// Checks every structural invariant; throws InputError on the first
    /// violation. Cheap enough to call before each solve.
    void validate() const;

    /// Objective value c^T x.
    double objective_value(const std::vector<double>& x) const;
    /// Largest violation of row i at x, scaled by 1 / (1 + |rhs|).
    double row_violation(int i, const std::vector<double>& x) const;

    friend bool operator==(const LpModel&, const LpModel&) = default;

private:
    std::vector<Column> columns_;
    std::vector<Row> rows_;
};

/// True if `name` is usable as an identifier in the CPLEX LP text format.
bool is_valid_lp_name(const std::string& name);

} // namespace drcvar::milp
