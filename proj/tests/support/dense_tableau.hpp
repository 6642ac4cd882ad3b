#pragma once

// Textbook two-phase tableau simplex with Bland's rule, kept deliberately
// naive so it shares nothing with the library solver beyond the LP itself.

#include "drcvar/milp/lp_model.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

enum class TableauStatus { Optimal, Infeasible, Unbounded };

struct TableauResult {
    TableauStatus status = TableauStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x; // one per model column
};

namespace detail {

// How a model column maps onto nonnegative tableau columns:
// x = offset + sign * t[first] (- t[second] when split).
struct ColumnMap {
    double offset = 0.0;
    double sign = 1.0;
    int first = -1;
    int second = -1;
};

class Tableau {
public:
    Tableau(int rows, int cols) : m_(rows), n_(cols), t_(static_cast<std::size_t>((rows + 1) * (cols + 1)), 0.0) {}

    double& at(int r, int c) { return t_[static_cast<std::size_t>(r * (n_ + 1) + c)]; }
    double& rhs(int r) { return at(r, n_); }

    void pivot(int r, int c) {
        const double p = at(r, c);
        for (int j = 0; j <= n_; ++j) at(r, j) /= p;
        for (int i = 0; i <= m_; ++i) {
            if (i == r) continue;
            const double f = at(i, c);
            if (f == 0.0) continue;
            for (int j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
        }
    }

    // Bland's rule on the objective row m_; columns with allowed[c] false are
    // never entered. Returns false on an unbounded direction.
    bool optimize(std::vector<int>& basis, const std::vector<bool>& allowed) {
        const double eps = 1e-11;
        while (true) {
            int enter = -1;
            for (int c = 0; c < n_; ++c) {
                if (allowed[static_cast<std::size_t>(c)] && at(m_, c) < -eps) {
                    enter = c;
                    break;
                }
            }
            if (enter < 0) return true;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < m_; ++r) {
                const double a = at(r, enter);
                if (a <= eps) continue;
                const double ratio = rhs(r) / a;
                if (ratio < best - 1e-13 ||
                    (ratio <= best + 1e-13 && leave >= 0 && basis[static_cast<std::size_t>(r)] <
                                                                  basis[static_cast<std::size_t>(leave)])) {
                    best = std::min(best, ratio);
                    leave = r;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
            basis[static_cast<std::size_t>(leave)] = enter;
        }
    }

    int rows() const { return m_; }
    int cols() const { return n_; }

private:
    int m_;
    int n_;
    std::vector<double> t_;
};

} // namespace detail

inline TableauResult solve_dense(const drcvar::milp::LpModel& model) {
    using drcvar::milp::Relation;
    const int ncols = model.column_count();
    std::vector<detail::ColumnMap> maps(static_cast<std::size_t>(ncols));
    int nt = 0;
    struct DenseRow {
        std::vector<std::pair<int, double>> terms; // tableau column, coefficient
        Relation rel;
        double rhs;
    };
    std::vector<DenseRow> rows;

    for (int j = 0; j < ncols; ++j) {
        const auto& col = model.column(j);
        auto& map = maps[static_cast<std::size_t>(j)];
        const bool lo = std::isfinite(col.lower);
        const bool hi = std::isfinite(col.upper);
        if (lo) {
            map.offset = col.lower;
            map.first = nt++;
            if (hi) rows.push_back({{{map.first, 1.0}}, Relation::LessEqual, col.upper - col.lower});
        } else if (hi) {
            map.offset = col.upper;
            map.sign = -1.0;
            map.first = nt++;
        } else {
            map.first = nt++;
            map.second = nt++;
        }
    }
    for (const auto& row : model.rows()) {
        DenseRow dr{{}, row.relation, row.rhs};
        for (const auto& term : row.terms) {
            const auto& map = maps[static_cast<std::size_t>(term.column)];
            dr.rhs -= term.coefficient * map.offset;
            dr.terms.emplace_back(map.first, term.coefficient * map.sign);
            if (map.second >= 0) dr.terms.emplace_back(map.second, -term.coefficient);
        }
        rows.push_back(std::move(dr));
    }

    const int m = static_cast<int>(rows.size());
    // Tableau columns: structural nt, one slack per inequality, one artificial per row.
    int slack_count = 0;
    for (const auto& r : rows) slack_count += r.rel != Relation::Equal;
    const int total = nt + slack_count + m;
    detail::Tableau tab(m, total);
    std::vector<int> basis(static_cast<std::size_t>(m));
    int slack = nt;
    for (int i = 0; i < m; ++i) {
        auto& r = rows[static_cast<std::size_t>(i)];
        const double flip = r.rhs < 0.0 ? -1.0 : 1.0;
        for (const auto& [c, a] : r.terms) tab.at(i, c) += flip * a;
        if (r.rel != Relation::Equal) {
            tab.at(i, slack) = flip * (r.rel == Relation::LessEqual ? 1.0 : -1.0);
            ++slack;
        }
        tab.rhs(i) = flip * r.rhs;
        const int art = nt + slack_count + i;
        tab.at(i, art) = 1.0;
        basis[static_cast<std::size_t>(i)] = art;
    }

    // Phase 1: minimize the artificial sum, written in reduced form.
    for (int i = 0; i < m; ++i)
        for (int c = 0; c <= total; ++c)
            if (c < nt + slack_count || c == total) tab.at(m, c) -= tab.at(i, c);
    std::vector<bool> allowed(static_cast<std::size_t>(total), true);
    tab.optimize(basis, allowed);
    TableauResult result;
    if (-tab.rhs(m) > 1e-7 * (1.0 + static_cast<double>(m))) return result;

    // Drive remaining artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
        if (basis[static_cast<std::size_t>(i)] < nt + slack_count) continue;
        for (int c = 0; c < nt + slack_count; ++c) {
            if (std::abs(tab.at(i, c)) > 1e-9) {
                tab.pivot(i, c);
                basis[static_cast<std::size_t>(i)] = c;
                break;
            }
        }
    }
    for (int c = nt + slack_count; c < total; ++c) allowed[static_cast<std::size_t>(c)] = false;

    // Phase 2 objective row in reduced form.
    std::vector<double> cost(static_cast<std::size_t>(total), 0.0);
    double constant = 0.0;
    for (int j = 0; j < ncols; ++j) {
        const auto& map = maps[static_cast<std::size_t>(j)];
        const double c = model.column(j).objective;
        constant += c * map.offset;
        cost[static_cast<std::size_t>(map.first)] += c * map.sign;
        if (map.second >= 0) cost[static_cast<std::size_t>(map.second)] -= c;
    }
    for (int c = 0; c <= total; ++c) tab.at(m, c) = c < total ? cost[static_cast<std::size_t>(c)] : 0.0;
    for (int i = 0; i < m; ++i) {
        const double cb = cost[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])];
        if (cb == 0.0) continue;
        for (int c = 0; c <= total; ++c) tab.at(m, c) -= cb * tab.at(i, c);
    }
    if (!tab.optimize(basis, allowed)) {
        result.status = TableauStatus::Unbounded;
        return result;
    }

    std::vector<double> t(static_cast<std::size_t>(total), 0.0);
    for (int i = 0; i < m; ++i) t[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] = tab.rhs(i);
    result.x.resize(static_cast<std::size_t>(ncols));
    for (int j = 0; j < ncols; ++j) {
        const auto& map = maps[static_cast<std::size_t>(j)];
        double v = map.offset + map.sign * t[static_cast<std::size_t>(map.first)];
        if (map.second >= 0) v -= t[static_cast<std::size_t>(map.second)];
        result.x[static_cast<std::size_t>(j)] = v;
    }
    result.status = TableauStatus::Optimal;
    result.objective = constant - tab.rhs(m);
    return result;
}

} // namespace oracle
