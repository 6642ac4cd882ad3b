#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace drcvar::milp {

enum class SolveStatus { Solved, Infeasible, Unbounded, IterLimit };

std::string to_string(SolveStatus status);

enum class BasisStatus : std::uint8_t { Basic, AtLower, AtUpper, Free };

/// Simplex basis in model indexing, usable as a warm start.
struct Basis {
    std::vector<BasisStatus> columns;
    std::vector<BasisStatus> rows; // status of each row's logical variable

    bool empty() const { return columns.empty() && rows.empty(); }
};

struct LpSolution {
    SolveStatus status = SolveStatus::IterLimit;
    std::vector<double> values; // one per model column
    double objective = 0.0;
    long iterations = 0;
    // Branch-and-bound statistics; nodes = 0 for a plain LP solve.
    long nodes = 0;
    double gap = 0.0;
    /// Incumbent objective after each improvement, in order.
    std::vector<double> incumbent_history;
    /// Final basis of an LP solve; empty after branch and bound.
    Basis basis;
};

} // namespace drcvar::milp
