#pragma once

#include "drcvar/milp/lp_model.hpp"
#include "drcvar/milp/simplex.hpp"
#include "drcvar/milp/solution.hpp"

namespace drcvar::milp {

struct BranchAndBoundOptions {
    long node_limit = 1000000;
    /// Binary values within this distance of 0 or 1 count as integral.
    double integrality_tolerance = 1e-6;
    /// Relative optimality gap reported as converged.
    double gap_tolerance = 1e-6;
    SimplexOptions lp;
};

/// Best-first branch and bound over the binary columns. Branches on the most
/// fractional binary (ties to the lowest column index); open nodes are ordered
/// by relaxation bound, then by creation order. Incumbents are re-solved with
/// every binary fixed so their continuous part satisfies the rows exactly.
///
/// On hitting the node limit the status is ITER_LIMIT and the incumbent (if
/// any) is returned with its gap.
LpSolution solve_milp(const LpModel& model, const BranchAndBoundOptions& options = {});

} // namespace drcvar::milp
