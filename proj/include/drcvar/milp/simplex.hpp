#pragma once

#include "drcvar/milp/lp_model.hpp"
#include "drcvar/milp/solution.hpp"

namespace drcvar::milp {

struct SimplexOptions {
    long iteration_limit = 100000;
    /// Consecutive degenerate pivots before switching to Bland's rule.
    long stall_limit = 500;
    /// Pivots between fresh factorizations of the basis.
    int refactor_interval = 100;
    double primal_tolerance = 1e-9;
    double dual_tolerance = 1e-9;
    double pivot_tolerance = 1e-9;
    /// Remove fixed columns and rows without free columns before solving.
    bool presolve = true;
};

/// Bounded-variable primal simplex. Binary flags are ignored (the relaxation
/// is solved). Phase 1 minimizes the sum of bound infeasibilities starting
/// from the all-logical basis; phase 2 uses Dantzig pricing with a fallback to
/// Bland's rule after `stall_limit` degenerate pivots.
///
/// Fixed columns and rows left without free columns are removed before the
/// simplex runs. The result is deterministic for identical input.
///
/// A warm start replaces the all-logical starting basis. Its basic set is
/// padded with logicals or trimmed to the row count; a singular start falls
/// back to the all-logical basis. A dual feasible start (such as an optimal
/// basis after bound changes) is first repaired with dual simplex pivots.
LpSolution solve_lp(const LpModel& model, const SimplexOptions& options = {},
                    const Basis* warm_start = nullptr);

} // namespace drcvar::milp
