#include "drcvar/milp/simplex.hpp"

#include "drcvar/errors.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace drcvar::milp {

std::string to_string(SolveStatus status) {
    switch (status) {
    case SolveStatus::Solved: return "SOLVED";
    case SolveStatus::Infeasible: return "INFEASIBLE";
    case SolveStatus::Unbounded: return "UNBOUNDED";
    case SolveStatus::IterLimit: return "ITER_LIMIT";
    }
    return "UNKNOWN";
}

namespace {

// Rows are A x + s = b. Variables 0..n-1 are structural, n..n+m-1 logical;
// the logical of a <= row is in [0, inf), of a >= row in (-inf, 0], of an
// equality row fixed at 0.
struct StandardForm {
    int m = 0;
    int n = 0;
    std::vector<int> col_start;
    std::vector<int> row_index;
    std::vector<double> value;
    std::vector<double> cost;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> rhs;
    std::vector<int> model_column; // structural -> model column
    std::vector<int> model_row;    // row -> model row
    bool infeasible = false;       // detected during presolve
};

StandardForm presolve(const LpModel& model, double tolerance, bool reduce) {
    StandardForm sf;
    const int ncols = model.column_count();
    std::vector<int> reduced(static_cast<std::size_t>(ncols), -1);
    for (int j = 0; j < ncols; ++j) {
        const auto& col = model.column(j);
        if (reduce && col.lower == col.upper) continue;
        reduced[static_cast<std::size_t>(j)] = sf.n++;
        sf.model_column.push_back(j);
    }

    std::vector<std::vector<std::pair<int, double>>> by_column(static_cast<std::size_t>(sf.n));
    for (int model_row = 0; model_row < model.row_count(); ++model_row) {
        const auto& row = model.row(model_row);
        double fixed_activity = 0.0;
        bool has_free = false;
        for (const auto& t : row.terms) {
            if (reduced[static_cast<std::size_t>(t.column)] < 0)
                fixed_activity += t.coefficient * model.column(t.column).lower;
            else
                has_free = true;
        }
        const double rhs = row.rhs - fixed_activity;
        if (!has_free) {
            const double slack = tolerance * (1.0 + std::abs(row.rhs));
            const bool ok = (row.relation == Relation::LessEqual && 0.0 <= rhs + slack) ||
                            (row.relation == Relation::GreaterEqual && 0.0 >= rhs - slack) ||
                            (row.relation == Relation::Equal && std::abs(rhs) <= slack);
            if (!ok) sf.infeasible = true;
            continue;
        }
        const int i = sf.m++;
        sf.model_row.push_back(model_row);
        for (const auto& t : row.terms) {
            const int rj = reduced[static_cast<std::size_t>(t.column)];
            if (rj >= 0) by_column[static_cast<std::size_t>(rj)].emplace_back(i, t.coefficient);
        }
        sf.rhs.push_back(rhs);
        switch (row.relation) {
        case Relation::LessEqual: sf.lower.push_back(0.0), sf.upper.push_back(kInfinity); break;
        case Relation::GreaterEqual: sf.lower.push_back(-kInfinity), sf.upper.push_back(0.0); break;
        case Relation::Equal: sf.lower.push_back(0.0), sf.upper.push_back(0.0); break;
        }
    }

    // Logical bounds were collected first; structural bounds go in front.
    std::vector<double> logical_lower = std::move(sf.lower);
    std::vector<double> logical_upper = std::move(sf.upper);
    sf.lower.clear();
    sf.upper.clear();
    sf.col_start.push_back(0);
    for (int j = 0; j < sf.n; ++j) {
        const auto& col = model.column(sf.model_column[static_cast<std::size_t>(j)]);
        sf.cost.push_back(col.objective);
        sf.lower.push_back(col.lower);
        sf.upper.push_back(col.upper);
        for (const auto& [i, a] : by_column[static_cast<std::size_t>(j)]) {
            sf.row_index.push_back(i);
            sf.value.push_back(a);
        }
        sf.col_start.push_back(static_cast<int>(sf.row_index.size()));
    }
    sf.cost.resize(static_cast<std::size_t>(sf.n + sf.m), 0.0);
    sf.lower.insert(sf.lower.end(), logical_lower.begin(), logical_lower.end());
    sf.upper.insert(sf.upper.end(), logical_upper.begin(), logical_upper.end());
    return sf;
}

// LU of the basis matrix plus a product-form eta file for the pivots since.
class BasisFactor {
public:
    explicit BasisFactor(const StandardForm& sf) : sf_(sf) {}

    bool factorize(const std::vector<int>& head) {
        etas_.clear();
        const int m = sf_.m;
        if (m == 0) return true;
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(static_cast<std::size_t>(m) * 3);
        for (int p = 0; p < m; ++p) {
            const int v = head[static_cast<std::size_t>(p)];
            if (v >= sf_.n) {
                triplets.emplace_back(v - sf_.n, p, 1.0);
            } else {
                for (int e = sf_.col_start[static_cast<std::size_t>(v)];
                     e < sf_.col_start[static_cast<std::size_t>(v) + 1]; ++e)
                    triplets.emplace_back(sf_.row_index[static_cast<std::size_t>(e)], p,
                                          sf_.value[static_cast<std::size_t>(e)]);
            }
        }
        Eigen::SparseMatrix<double> basis(m, m);
        basis.setFromTriplets(triplets.begin(), triplets.end());
        basis.makeCompressed();
        lu_.analyzePattern(basis);
        lu_.factorize(basis);
        return lu_.info() == Eigen::Success;
    }

    // v <- B^{-1} v
    void ftran(std::vector<double>& v) const {
        if (sf_.m == 0) return;
        Eigen::Map<Eigen::VectorXd> vec(v.data(), sf_.m);
        Eigen::VectorXd solved = lu_.solve(vec);
        vec = solved;
        for (const auto& eta : etas_) {
            const double pivot_value = v[static_cast<std::size_t>(eta.row)] / eta.pivot;
            v[static_cast<std::size_t>(eta.row)] = pivot_value;
            if (pivot_value == 0.0) continue;
            for (std::size_t t = 0; t < eta.index.size(); ++t)
                v[static_cast<std::size_t>(eta.index[t])] -= eta.value[t] * pivot_value;
        }
    }

    // v <- B^{-T} v
    void btran(std::vector<double>& v) const {
        if (sf_.m == 0) return;
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double acc = v[static_cast<std::size_t>(it->row)];
            for (std::size_t t = 0; t < it->index.size(); ++t)
                acc -= it->value[t] * v[static_cast<std::size_t>(it->index[t])];
            v[static_cast<std::size_t>(it->row)] = acc / it->pivot;
        }
        Eigen::Map<Eigen::VectorXd> vec(v.data(), sf_.m);
        Eigen::VectorXd solved = lu_.transpose().solve(vec);
        vec = solved;
    }

    // The basis column at `row` was replaced; alpha = B_old^{-1} a_entering.
    void update(int row, const std::vector<double>& alpha) {
        Eta eta;
        eta.row = row;
        eta.pivot = alpha[static_cast<std::size_t>(row)];
        for (int i = 0; i < sf_.m; ++i) {
            if (i == row || alpha[static_cast<std::size_t>(i)] == 0.0) continue;
            eta.index.push_back(i);
            eta.value.push_back(alpha[static_cast<std::size_t>(i)]);
        }
        etas_.push_back(std::move(eta));
    }

    int eta_count() const { return static_cast<int>(etas_.size()); }

private:
    struct Eta {
        int row = 0;
        double pivot = 1.0;
        std::vector<int> index;
        std::vector<double> value;
    };
    const StandardForm& sf_;
    mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
    std::vector<Eta> etas_;
};

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, FreeZero };

class PrimalSimplex {
public:
    PrimalSimplex(const StandardForm& sf, const SimplexOptions& options)
        : sf_(sf), opt_(options), factor_(sf) {}

    SolveStatus run(long& iterations, const Basis* warm) {
        if (warm)
            init_warm_basis(*warm);
        else
            init_slack_basis();
        if (!refactor()) return SolveStatus::IterLimit;
        if (warm) {
            // A warm basis that is still dual feasible (typical after bound
            // changes) is repaired by dual pivots; the primal loop below then
            // confirms optimality or certifies infeasibility.
            dual_iterate(iterations);
            if (iterations >= opt_.iteration_limit) return SolveStatus::IterLimit;
            if (!refactor()) return SolveStatus::IterLimit;
        }
        int refreshes = 0;
        while (true) {
            const SolveStatus status = iterate(iterations);
            if (status != SolveStatus::Solved) return status;
            // Confirm optimality against a fresh factorization.
            if (!refactor()) return SolveStatus::IterLimit;
            if (max_infeasibility() <= opt_.primal_tolerance || ++refreshes > 3) return status;
        }
    }

    std::vector<double> structural_values() const {
        return {x_.begin(), x_.begin() + sf_.n};
    }

    Basis export_basis(int model_columns, int model_rows) const {
        Basis basis;
        basis.columns.assign(idx(model_columns), BasisStatus::AtLower);
        basis.rows.assign(idx(model_rows), BasisStatus::Basic);
        for (int j = 0; j < sf_.n; ++j) basis.columns[idx(sf_.model_column[idx(j)])] = to_status(state_[idx(j)]);
        for (int i = 0; i < sf_.m; ++i) basis.rows[idx(sf_.model_row[idx(i)])] = to_status(state_[idx(sf_.n + i)]);
        return basis;
    }

private:
    std::size_t idx(int v) const { return static_cast<std::size_t>(v); }
    int total() const { return sf_.n + sf_.m; }

    void init_slack_basis() {
        const int nt = total();
        x_.assign(idx(nt), 0.0);
        state_.assign(idx(nt), VarState::AtLower);
        position_.assign(idx(nt), -1);
        head_.resize(idx(sf_.m));
        for (int j = 0; j < sf_.n; ++j) make_nonbasic_near(j, 0.0);
        for (int i = 0; i < sf_.m; ++i) {
            head_[idx(i)] = sf_.n + i;
            state_[idx(sf_.n + i)] = VarState::Basic;
            position_[idx(sf_.n + i)] = i;
        }
    }

    static BasisStatus to_status(VarState s) {
        switch (s) {
        case VarState::Basic: return BasisStatus::Basic;
        case VarState::AtLower: return BasisStatus::AtLower;
        case VarState::AtUpper: return BasisStatus::AtUpper;
        case VarState::FreeZero: return BasisStatus::Free;
        }
        return BasisStatus::AtLower;
    }

    void init_warm_basis(const Basis& warm) {
        const int nt = total();
        x_.assign(idx(nt), 0.0);
        state_.assign(idx(nt), VarState::AtLower);
        position_.assign(idx(nt), -1);
        std::vector<int> basic;
        auto place = [&](int v, BasisStatus status) {
            const double lo = sf_.lower[idx(v)];
            const double hi = sf_.upper[idx(v)];
            if (status == BasisStatus::Basic) {
                basic.push_back(v);
            } else if (status == BasisStatus::AtUpper && std::isfinite(hi)) {
                make_nonbasic_near(v, hi);
            } else if (status == BasisStatus::AtLower && std::isfinite(lo)) {
                make_nonbasic_near(v, lo);
            } else {
                make_nonbasic_near(v, 0.0);
            }
        };
        for (int j = 0; j < sf_.n; ++j) place(j, warm.columns[idx(sf_.model_column[idx(j)])]);
        for (int i = 0; i < sf_.m; ++i) place(sf_.n + i, warm.rows[idx(sf_.model_row[idx(i)])]);
        while (static_cast<int>(basic.size()) > sf_.m) {
            make_nonbasic_near(basic.back(), 0.0);
            basic.pop_back();
        }
        std::vector<char> taken(idx(nt), 0);
        for (int v : basic) taken[idx(v)] = 1;
        for (int i = 0; i < sf_.m && static_cast<int>(basic.size()) < sf_.m; ++i)
            if (!taken[idx(sf_.n + i)]) basic.push_back(sf_.n + i);
        head_ = basic;
        for (int p = 0; p < sf_.m; ++p) {
            state_[idx(head_[idx(p)])] = VarState::Basic;
            position_[idx(head_[idx(p)])] = p;
        }
    }

    void make_nonbasic_near(int v, double target) {
        const double lo = sf_.lower[idx(v)];
        const double hi = sf_.upper[idx(v)];
        position_[idx(v)] = -1;
        if (std::isfinite(lo) && (!std::isfinite(hi) || std::abs(target - lo) <= std::abs(hi - target))) {
            state_[idx(v)] = VarState::AtLower;
            x_[idx(v)] = lo;
        } else if (std::isfinite(hi)) {
            state_[idx(v)] = VarState::AtUpper;
            x_[idx(v)] = hi;
        } else {
            state_[idx(v)] = VarState::FreeZero;
            x_[idx(v)] = 0.0;
        }
    }

    // Refactorize, falling back to the slack basis if the factorization is
    // singular, then recompute the basic values.
    bool refactor() {
        if (!factor_.factorize(head_)) {
            if (++repairs_ > 5) return false;
            for (int p = 0; p < sf_.m; ++p) {
                const int v = head_[idx(p)];
                if (v < sf_.n) make_nonbasic_near(v, x_[idx(v)]);
            }
            for (int i = 0; i < sf_.m; ++i) {
                const int v = sf_.n + i;
                head_[idx(i)] = v;
                position_[idx(v)] = i;
                state_[idx(v)] = VarState::Basic;
            }
            if (!factor_.factorize(head_)) return false;
        }
        compute_primal();
        return true;
    }

    void compute_primal() {
        std::vector<double> r(sf_.rhs);
        for (int j = 0; j < sf_.n; ++j) {
            if (state_[idx(j)] == VarState::Basic || x_[idx(j)] == 0.0) continue;
            for (int e = sf_.col_start[idx(j)]; e < sf_.col_start[idx(j) + 1]; ++e)
                r[idx(sf_.row_index[idx(e)])] -= sf_.value[idx(e)] * x_[idx(j)];
        }
        for (int i = 0; i < sf_.m; ++i) {
            const int v = sf_.n + i;
            if (state_[idx(v)] != VarState::Basic) r[idx(i)] -= x_[idx(v)];
        }
        factor_.ftran(r);
        for (int p = 0; p < sf_.m; ++p) x_[idx(head_[idx(p)])] = r[idx(p)];
    }

    double infeasibility(int v) const {
        const double val = x_[idx(v)];
        if (val < sf_.lower[idx(v)]) return sf_.lower[idx(v)] - val;
        if (val > sf_.upper[idx(v)]) return val - sf_.upper[idx(v)];
        return 0.0;
    }

    double max_infeasibility() const {
        double worst = 0.0;
        for (int v : head_) {
            const double scale = 1.0 + std::max(std::abs(sf_.lower[idx(v)]) * std::isfinite(sf_.lower[idx(v)]),
                                                std::abs(sf_.upper[idx(v)]) * std::isfinite(sf_.upper[idx(v)]));
            worst = std::max(worst, infeasibility(v) / scale);
        }
        return worst;
    }

    double column_dot(int v, const std::vector<double>& y) const {
        if (v >= sf_.n) return y[idx(v - sf_.n)];
        double acc = 0.0;
        for (int e = sf_.col_start[idx(v)]; e < sf_.col_start[idx(v) + 1]; ++e)
            acc += sf_.value[idx(e)] * y[idx(sf_.row_index[idx(e)])];
        return acc;
    }

    void load_column(int v, std::vector<double>& out) const {
        std::fill(out.begin(), out.end(), 0.0);
        if (v >= sf_.n) {
            out[idx(v - sf_.n)] = 1.0;
            return;
        }
        for (int e = sf_.col_start[idx(v)]; e < sf_.col_start[idx(v) + 1]; ++e)
            out[idx(sf_.row_index[idx(e)])] = sf_.value[idx(e)];
    }

    double reduced_cost_of(int v, const std::vector<double>& dual) const {
        return sf_.cost[idx(v)] - column_dot(v, dual);
    }

    void compute_reduced_costs(std::vector<double>& d) const {
        std::vector<double> dual(idx(sf_.m));
        for (int p = 0; p < sf_.m; ++p) dual[idx(p)] = sf_.cost[idx(head_[idx(p)])];
        factor_.btran(dual);
        for (int v = 0; v < total(); ++v)
            d[idx(v)] = state_[idx(v)] == VarState::Basic ? 0.0 : reduced_cost_of(v, dual);
    }

    bool dual_feasible(const std::vector<double>& d) const {
        const double tol = opt_.dual_tolerance;
        for (int v = 0; v < total(); ++v) {
            if (sf_.lower[idx(v)] == sf_.upper[idx(v)]) continue;
            const VarState s = state_[idx(v)];
            if ((s == VarState::AtLower && d[idx(v)] < -tol) || (s == VarState::AtUpper && d[idx(v)] > tol) ||
                (s == VarState::FreeZero && std::abs(d[idx(v)]) > tol))
                return false;
        }
        return true;
    }

    // Dual simplex on a dual feasible basis. Stops when the basis is primal
    // feasible, when no entering column exists, on degenerate stalls, or when
    // the starting basis is not dual feasible; the caller finishes with primal
    // pivots in every case.
    void dual_iterate(long& iterations) {
        const int m = sf_.m;
        const int nt = total();
        std::vector<double> d(idx(nt));
        std::vector<double> rho(idx(m));
        std::vector<double> alpha(idx(m));
        std::vector<double> row(idx(nt), 0.0);
        compute_reduced_costs(d);
        if (!dual_feasible(d)) return;
        long stall = 0;

        while (iterations < opt_.iteration_limit && stall <= opt_.stall_limit) {
            int r = -1;
            double worst = opt_.primal_tolerance;
            for (int p = 0; p < m; ++p) {
                const double inf = infeasibility(head_[idx(p)]);
                if (inf > worst) {
                    worst = inf;
                    r = p;
                }
            }
            if (r < 0) return;
            const int leaving = head_[idx(r)];
            const bool below = x_[idx(leaving)] < sf_.lower[idx(leaving)];
            const double bound = below ? sf_.lower[idx(leaving)] : sf_.upper[idx(leaving)];

            std::fill(rho.begin(), rho.end(), 0.0);
            rho[idx(r)] = 1.0;
            factor_.btran(rho);

            int entering = -1;
            double best_ratio = kInfinity;
            double best_pivot = 0.0;
            for (int v = 0; v < nt; ++v) {
                const VarState s = state_[idx(v)];
                if (s == VarState::Basic || sf_.lower[idx(v)] == sf_.upper[idx(v)]) {
                    row[idx(v)] = 0.0;
                    continue;
                }
                const double a = column_dot(v, rho);
                row[idx(v)] = a;
                if (std::abs(a) <= opt_.pivot_tolerance) continue;
                // Moving v off its bound must push the leaving value toward `bound`.
                const bool up_ok = s == VarState::AtLower || s == VarState::FreeZero;
                const bool down_ok = s == VarState::AtUpper || s == VarState::FreeZero;
                const bool eligible = below ? ((up_ok && a < 0.0) || (down_ok && a > 0.0))
                                            : ((up_ok && a > 0.0) || (down_ok && a < 0.0));
                if (!eligible) continue;
                double dj = d[idx(v)];
                if (s == VarState::AtLower) dj = std::max(0.0, dj);
                if (s == VarState::AtUpper) dj = std::min(0.0, dj);
                const double ratio = std::abs(dj) / std::abs(a);
                const double tie = 1e-12 * std::max(1.0, best_ratio);
                if (entering < 0 || ratio < best_ratio - tie ||
                    (ratio <= best_ratio + tie && std::abs(a) > best_pivot)) {
                    if (entering < 0 || ratio < best_ratio) best_ratio = ratio;
                    entering = v;
                    best_pivot = std::abs(a);
                }
            }
            if (entering < 0) return;
            ++iterations;

            load_column(entering, alpha);
            factor_.ftran(alpha);
            if (std::abs(alpha[idx(r)]) <= opt_.pivot_tolerance) return;

            const double theta_d = d[idx(entering)] / row[idx(entering)];
            for (int v = 0; v < nt; ++v)
                if (row[idx(v)] != 0.0) d[idx(v)] -= theta_d * row[idx(v)];
            d[idx(entering)] = 0.0;
            d[idx(leaving)] = -theta_d;
            stall = std::abs(theta_d) <= 1e-12 ? stall + 1 : 0;

            const double t = (x_[idx(leaving)] - bound) / alpha[idx(r)];
            for (int p = 0; p < m; ++p)
                if (alpha[idx(p)] != 0.0) x_[idx(head_[idx(p)])] -= t * alpha[idx(p)];
            x_[idx(entering)] += t;

            x_[idx(leaving)] = bound;
            state_[idx(leaving)] = below ? VarState::AtLower : VarState::AtUpper;
            position_[idx(leaving)] = -1;
            head_[idx(r)] = entering;
            state_[idx(entering)] = VarState::Basic;
            position_[idx(entering)] = r;

            factor_.update(r, alpha);
            if (factor_.eta_count() >= opt_.refactor_interval) {
                if (!refactor()) return;
                compute_reduced_costs(d);
                if (!dual_feasible(d)) return;
            }
        }
    }

    SolveStatus iterate(long& iterations) {
        const int m = sf_.m;
        std::vector<double> basic_cost(idx(m));
        std::vector<double> dual(idx(m));
        std::vector<double> alpha(idx(m));
        long stall = 0;

        while (true) {
            // Phase selection from the current basic values.
            bool phase_one = false;
            for (int p = 0; p < m; ++p) {
                const int v = head_[idx(p)];
                const double val = x_[idx(v)];
                const double tol = opt_.primal_tolerance;
                if (val < sf_.lower[idx(v)] - tol) {
                    basic_cost[idx(p)] = -1.0;
                    phase_one = true;
                } else if (val > sf_.upper[idx(v)] + tol) {
                    basic_cost[idx(p)] = 1.0;
                    phase_one = true;
                } else {
                    basic_cost[idx(p)] = 0.0;
                }
            }
            if (!phase_one)
                for (int p = 0; p < m; ++p) basic_cost[idx(p)] = sf_.cost[idx(head_[idx(p)])];

            dual = basic_cost;
            factor_.btran(dual);

            // Pricing.
            const bool bland = stall > opt_.stall_limit;
            int entering = -1;
            int direction = 0;
            double best_score = 0.0;
            for (int v = 0; v < total(); ++v) {
                const VarState s = state_[idx(v)];
                if (s == VarState::Basic) continue;
                if (sf_.lower[idx(v)] == sf_.upper[idx(v)]) continue;
                const double c = phase_one ? 0.0 : sf_.cost[idx(v)];
                const double d = c - column_dot(v, dual);
                int dir = 0;
                if (d < -opt_.dual_tolerance && (s == VarState::AtLower || s == VarState::FreeZero))
                    dir = 1;
                else if (d > opt_.dual_tolerance && (s == VarState::AtUpper || s == VarState::FreeZero))
                    dir = -1;
                if (dir == 0) continue;
                if (bland) {
                    entering = v;
                    direction = dir;
                    break;
                }
                if (std::abs(d) > best_score) {
                    best_score = std::abs(d);
                    entering = v;
                    direction = dir;
                }
            }
            if (entering < 0) return phase_one ? SolveStatus::Infeasible : SolveStatus::Solved;
            if (iterations >= opt_.iteration_limit) return SolveStatus::IterLimit;
            ++iterations;

            load_column(entering, alpha);
            factor_.ftran(alpha);

            // Ratio test. Basic p moves by -direction * theta * alpha[p].
            int leaving_pos = -1;
            double theta = kInfinity;
            double leaving_bound = 0.0;
            VarState leaving_state = VarState::AtLower;
            double best_pivot = 0.0;
            for (int p = 0; p < m; ++p) {
                const double a = alpha[idx(p)];
                if (std::abs(a) <= opt_.pivot_tolerance) continue;
                const int v = head_[idx(p)];
                const double rate = -direction * a;
                const double val = x_[idx(v)];
                const double lo = sf_.lower[idx(v)];
                const double hi = sf_.upper[idx(v)];
                const double tol = opt_.primal_tolerance;
                double limit = kInfinity;
                double bound = 0.0;
                VarState hit = VarState::AtLower;
                if (rate < 0.0) {
                    if (val > hi + tol) {
                        bound = hi, hit = VarState::AtUpper;
                    } else if (val >= lo - tol && std::isfinite(lo)) {
                        bound = lo, hit = VarState::AtLower;
                    } else {
                        continue;
                    }
                    limit = std::max(0.0, (val - bound) / -rate);
                } else {
                    if (val < lo - tol) {
                        bound = lo, hit = VarState::AtLower;
                    } else if (val <= hi + tol && std::isfinite(hi)) {
                        bound = hi, hit = VarState::AtUpper;
                    } else {
                        continue;
                    }
                    limit = std::max(0.0, (bound - val) / rate);
                }
                const double tie = 1e-12 * std::max(1.0, theta);
                bool take = false;
                if (leaving_pos < 0 || limit < theta - tie) {
                    take = true;
                } else if (limit <= theta + tie) {
                    if (bland)
                        take = v < head_[idx(leaving_pos)];
                    else
                        take = std::abs(a) > best_pivot;
                }
                if (take) {
                    if (leaving_pos < 0 || limit < theta) theta = limit;
                    leaving_pos = p;
                    leaving_bound = bound;
                    leaving_state = hit;
                    best_pivot = std::abs(a);
                }
            }

            const double span = sf_.upper[idx(entering)] - sf_.lower[idx(entering)];
            const bool flip = std::isfinite(span) && span <= theta;
            if (leaving_pos < 0 && !flip) {
                if (!phase_one) return SolveStatus::Unbounded;
                // Numerical trouble: phase-1 rays cannot be unbounded.
                if (!refactor()) return SolveStatus::IterLimit;
                continue;
            }
            const double step = flip ? span : theta;

            for (int p = 0; p < m; ++p)
                if (alpha[idx(p)] != 0.0) x_[idx(head_[idx(p)])] -= direction * step * alpha[idx(p)];
            x_[idx(entering)] += direction * step;

            stall = step <= 1e-12 ? stall + 1 : 0;

            if (flip) {
                const bool to_upper = direction > 0;
                state_[idx(entering)] = to_upper ? VarState::AtUpper : VarState::AtLower;
                x_[idx(entering)] = to_upper ? sf_.upper[idx(entering)] : sf_.lower[idx(entering)];
                continue;
            }

            const int leaving = head_[idx(leaving_pos)];
            x_[idx(leaving)] = leaving_bound;
            state_[idx(leaving)] = leaving_state;
            position_[idx(leaving)] = -1;
            head_[idx(leaving_pos)] = entering;
            state_[idx(entering)] = VarState::Basic;
            position_[idx(entering)] = leaving_pos;

            factor_.update(leaving_pos, alpha);
            if (factor_.eta_count() >= opt_.refactor_interval)
                if (!refactor()) return SolveStatus::IterLimit;
        }
    }

    const StandardForm& sf_;
    const SimplexOptions& opt_;
    BasisFactor factor_;
    std::vector<double> x_;
    std::vector<VarState> state_;
    std::vector<int> position_;
    std::vector<int> head_;
    int repairs_ = 0;
};

} // namespace

LpSolution solve_lp(const LpModel& model, const SimplexOptions& options, const Basis* warm_start) {
    model.validate();
    LpSolution solution;
    solution.values.resize(static_cast<std::size_t>(model.column_count()));
    for (int j = 0; j < model.column_count(); ++j)
        solution.values[static_cast<std::size_t>(j)] = model.column(j).lower;

    const StandardForm sf = presolve(model, 1e-9, options.presolve);
    if (sf.infeasible) {
        solution.status = SolveStatus::Infeasible;
        return solution;
    }

    if (warm_start && (warm_start->columns.size() != solution.values.size() ||
                       warm_start->rows.size() != static_cast<std::size_t>(model.row_count())))
        throw InputError("warm-start basis does not match the model dimensions");

    PrimalSimplex simplex(sf, options);
    solution.status = simplex.run(solution.iterations, warm_start);
    solution.basis = simplex.export_basis(model.column_count(), model.row_count());
    const auto reduced = simplex.structural_values();
    for (int j = 0; j < sf.n; ++j)
        solution.values[static_cast<std::size_t>(sf.model_column[static_cast<std::size_t>(j)])] =
            reduced[static_cast<std::size_t>(j)];
    solution.objective = model.objective_value(solution.values);
    return solution;
}

} // namespace drcvar::milp
