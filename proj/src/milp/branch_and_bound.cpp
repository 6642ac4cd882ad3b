#include "drcvar/milp/branch_and_bound.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>
#include <vector>

namespace drcvar::milp {

namespace {

struct Node {
    double bound;
    long id;
    // (column, fixed value) pairs accumulated from the root.
    std::vector<std::pair<int, double>> fixings;
    // Optimal basis of the parent relaxation.
    std::shared_ptr<const Basis> basis;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.id > b.id;
    }
};

double relative_gap(double incumbent, double bound) {
    if (!std::isfinite(incumbent)) return kInfinity;
    return std::max(0.0, incumbent - bound) / std::max(1.0, std::abs(incumbent));
}

} // namespace

LpSolution solve_milp(const LpModel& model, const BranchAndBoundOptions& options) {
    model.validate();
    std::vector<int> binaries;
    for (int j = 0; j < model.column_count(); ++j)
        if (model.column(j).binary) binaries.push_back(j);

    LpSolution best;
    best.status = SolveStatus::Infeasible;
    best.values.assign(static_cast<std::size_t>(model.column_count()), 0.0);
    double incumbent = kInfinity;
    long iterations = 0;
    long nodes = 0;
    bool hit_limit = false;
    bool unbounded = false;
    std::vector<double> history;

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    open.push({-kInfinity, 0, {}, nullptr});
    long next_id = 1;
    LpModel work = model;
    // Node models differ only in bounds, so bases carry over unchanged.
    SimplexOptions lp_options = options.lp;
    lp_options.presolve = false;

    const double prune_slack = 1e-9;
    while (!open.empty()) {
        if (open.top().bound >= incumbent - prune_slack * std::max(1.0, std::abs(incumbent))) {
            open.pop();
            continue;
        }
        if (nodes >= options.node_limit) {
            hit_limit = true;
            break;
        }
        Node node = open.top();
        open.pop();
        ++nodes;

        for (int j : binaries) work.set_bounds(j, model.column(j).lower, model.column(j).upper);
        for (const auto& [j, v] : node.fixings) work.set_bounds(j, v, v);
        LpSolution relaxed = solve_lp(work, lp_options, node.basis.get());
        iterations += relaxed.iterations;
        if (relaxed.status == SolveStatus::Infeasible) continue;
        if (relaxed.status == SolveStatus::Unbounded) {
            unbounded = true;
            break;
        }
        if (relaxed.status != SolveStatus::Solved) {
            hit_limit = true;
            break;
        }
        if (relaxed.objective >= incumbent - prune_slack * std::max(1.0, std::abs(incumbent)))
            continue;

        int branch = -1;
        double most_fractional = options.integrality_tolerance;
        for (int j : binaries) {
            const double v = relaxed.values[static_cast<std::size_t>(j)];
            const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
            if (frac > most_fractional + 1e-12) {
                most_fractional = frac;
                branch = j;
            }
        }

        if (branch < 0) {
            // Integral: snap binaries and polish the continuous part.
            LpSolution candidate = relaxed;
            bool snapped = false;
            for (int j : binaries) {
                const double v = std::round(relaxed.values[static_cast<std::size_t>(j)]);
                if (v != relaxed.values[static_cast<std::size_t>(j)]) snapped = true;
                work.set_bounds(j, v, v);
            }
            if (snapped) {
                LpSolution polished = solve_lp(work, lp_options, &relaxed.basis);
                iterations += polished.iterations;
                if (polished.status == SolveStatus::Solved) candidate = std::move(polished);
            }
            for (int j : binaries) {
                auto& v = candidate.values[static_cast<std::size_t>(j)];
                v = std::round(v) + 0.0;
            }
            if (candidate.objective < incumbent) {
                incumbent = candidate.objective;
                history.push_back(incumbent);
                best = std::move(candidate);
                best.status = SolveStatus::Solved;
            }
            continue;
        }

        const auto basis = std::make_shared<const Basis>(std::move(relaxed.basis));
        for (double value : {0.0, 1.0}) {
            Node child{relaxed.objective, next_id++, node.fixings, basis};
            child.fixings.emplace_back(branch, value);
            open.push(std::move(child));
        }
    }

    double bound = incumbent;
    if (!open.empty()) bound = std::min(bound, open.top().bound);
    best.iterations = iterations;
    best.nodes = nodes;
    best.incumbent_history = std::move(history);
    best.basis = {};
    if (unbounded) {
        best.status = SolveStatus::Unbounded;
        best.gap = kInfinity;
    } else if (hit_limit) {
        best.status = SolveStatus::IterLimit;
        best.gap = relative_gap(incumbent, bound);
    } else {
        best.gap = std::isfinite(incumbent) ? 0.0 : kInfinity;
    }
    return best;
}

} // namespace drcvar::milp
