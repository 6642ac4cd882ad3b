#pragma once

#include "drcvar/milp/branch_and_bound.hpp"
#include "drcvar/milp/lp_model.hpp"
#include "drcvar/milp/solution.hpp"
#include "drcvar/risk_core.hpp"
#include "drcvar/sample_set.hpp"
#include "drcvar/wasserstein.hpp"

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace drcvar::cocontrol {

/// Polytope {x : C x <= d} assumed to contain every realization of a term's
/// random vector.
class SupportPolytope {
public:
    SupportPolytope(Eigen::MatrixXd c_matrix, Eigen::VectorXd d_vector);

    /// C = [I; -I], d = [upper; -lower].
    static SupportPolytope box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

    /// Box spanning the per-coordinate sample range, widened on each side by
    /// `margin` times the range. Coordinates with zero range are widened by
    /// margin * max(1, |value|).
    static SupportPolytope box_around(const SampleSet& samples, double margin = 0.10);

    const Eigen::MatrixXd& c_matrix() const noexcept { return c_; }
    const Eigen::VectorXd& d_vector() const noexcept { return d_; }
    Eigen::Index facet_count() const noexcept { return c_.rows(); }
    Eigen::Index dimension() const noexcept { return c_.cols(); }

    /// Largest entry of C x - d, scaled by 1 + |d|.
    double max_violation(const Eigen::RowVectorXd& x) const;

private:
    Eigen::MatrixXd c_;
    Eigen::VectorXd d_;
};

enum class LossSign : int { Positive = 1, Negative = -1 };

/// One CVaR-controlled term with loss sign * <y, X>. The first term of a
/// problem is the objective term and carries neither bound nor penalty; every
/// later term is a co-controlled constraint with both.
struct RiskTerm {
    risk::Alpha alpha;
    LossSign sign = LossSign::Positive;
    std::optional<double> bound;
    std::optional<double> penalty;
    SampleSet samples;
    SupportPolytope support;

    /// Piece coefficients of max_j (a_j * loss + b_j * z); j is 0 or 1.
    /// The sign of the loss is folded into the tail slope a_1.
    double piece_slope(int j) const;
    double piece_offset(int j) const;
};

struct LinearConstraint {
    std::vector<double> coefficients; // one per decision coordinate
    milp::Relation relation = milp::Relation::LessEqual;
    double rhs = 0.0;
};

/// The decision vector y shared by all terms.
struct DecisionSpec {
    int dimension = 0;
    bool binary = false;
    /// Bounds default to [0, 1] when left empty.
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<LinearConstraint> constraints;
};

/// Column and row indices of the assembled model.
struct Layout {
    std::vector<int> y;
    std::vector<int> z;   // one per term
    std::vector<int> rho; // one per term, -1 for the objective term
    int lambda = -1;
    std::vector<std::vector<int>> s; // [term][sample]
    int gamma_begin = 0;
    int gamma_end = 0;
    int bound_rows = 0;
    int risk_rows = 0; // sample-wise epigraph rows
    int norm_rows = 0; // linearized dual-norm rows
};

struct CoControlLp {
    milp::LpModel lp;
    Layout layout;
};

/// Assembles the finite reformulation of the worst-case co-control problem
/// over a Wasserstein ball (transport norm l1, dual norm l_inf) for affine
/// losses and polytope supports:
///
///   min  lambda * eps + sum_i (1/K_i) sum_k s_ik + sum_{i>=1} eta_i rho_i
///   s.t. z_i + rho_i = b_i                                           i >= 1
///        b_j z_i + <g_ikj, d_i - C_i w_ik> + a_j <y, w_ik> <= s_ik  all i,k,j
///        -lambda <= (C_i^T g_ikj - a_j y)_n <= lambda                all i,k,j,n
///        g_ikj >= 0, rho_i >= 0
///
/// Throws InputError on inconsistent terms and BuildError when a sample lies
/// outside its support polytope.
CoControlLp build_cocontrol_lp(std::span<const RiskTerm> terms, const wasserstein::RadiusSpec& radius,
                               const DecisionSpec& decision);

struct CoControlSolution {
    std::vector<double> y;
    std::vector<double> z;   // per term; the VaR estimate
    std::vector<double> rho; // per term; 0 for the objective term
    double lambda = 0.0;
    double objective = 0.0;
    /// (1/K) sum_k s_ik per term. The lambda * eps part is shared by all
    /// terms, so these are an upper-bound decomposition, not exact CVaRs.
    std::vector<double> cvar_per_term;
};

/// Throws SolveError unless raw.status is SOLVED.
CoControlSolution extract_solution(const CoControlLp& model, const milp::LpSolution& raw,
                                   std::span<const RiskTerm> terms);

/// Solves with branch and bound when the decision is binary, else as an LP.
milp::LpSolution solve_model(const CoControlLp& model, const milp::BranchAndBoundOptions& options = {});

/// sign * <y, w_k> for every sample row.
std::vector<double> term_losses(const RiskTerm& term, std::span<const double> y);

/// Fraction of samples whose loss lies in [z_i, z_i + rho_i]; the empirical
/// counterpart of the probability mass added beyond alpha_i.
double added_security(const CoControlSolution& solution, std::span<const RiskTerm> terms,
                      std::size_t term_index);

/// Fraction of samples whose loss exceeds the term's bound.
double violation_rate(const CoControlSolution& solution, std::span<const RiskTerm> terms,
                      std::size_t term_index);

/// Flat `key = value` report, values at 12 significant digits.
std::string format_report(const CoControlSolution& solution, std::span<const RiskTerm> terms,
                          const wasserstein::RadiusSpec& radius);

} // namespace drcvar::cocontrol
