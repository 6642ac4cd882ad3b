#include "drcvar/cocontrol.hpp"

#include "drcvar/errors.hpp"
#include "drcvar/milp/branch_and_bound.hpp"
#include "drcvar/milp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace drcvar::cocontrol {

namespace {
constexpr double kContainmentTolerance = 1e-9;
} // namespace

SupportPolytope::SupportPolytope(Eigen::MatrixXd c_matrix, Eigen::VectorXd d_vector)
    : c_(std::move(c_matrix)), d_(std::move(d_vector)) {
    if (c_.rows() != d_.size() || c_.rows() < 1 || c_.cols() < 1)
        throw InputError("support polytope needs a nonempty C with one d entry per row");
    if (!c_.allFinite() || !d_.allFinite()) throw InputError("support polytope has non-finite data");
}

SupportPolytope SupportPolytope::box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
    const Eigen::Index n = lower.size();
    if (upper.size() != n) throw InputError("box bounds differ in dimension");
    if ((lower.array() > upper.array()).any()) throw InputError("box has lower > upper");
    Eigen::MatrixXd c(2 * n, n);
    c << Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd d(2 * n);
    d << upper, -lower;
    return {std::move(c), std::move(d)};
}

SupportPolytope SupportPolytope::box_around(const SampleSet& samples, double margin) {
    if (!(margin >= 0.0) || !std::isfinite(margin)) throw InputError("support margin must be >= 0");
    Eigen::VectorXd lower = samples.data().colwise().minCoeff().transpose();
    Eigen::VectorXd upper = samples.data().colwise().maxCoeff().transpose();
    for (Eigen::Index n = 0; n < lower.size(); ++n) {
        const double range = upper(n) - lower(n);
        const double pad = range > 0.0 ? margin * range : margin * std::max(1.0, std::abs(lower(n)));
        lower(n) -= pad;
        upper(n) += pad;
    }
    return box(lower, upper);
}

double SupportPolytope::max_violation(const Eigen::RowVectorXd& x) const {
    const Eigen::VectorXd slack = c_ * x.transpose() - d_;
    return (slack.array() / (1.0 + d_.array().abs())).maxCoeff();
}

double RiskTerm::piece_slope(int j) const {
    return j == 0 ? 0.0 : static_cast<int>(sign) * alpha.tail_scale();
}

double RiskTerm::piece_offset(int j) const { return j == 0 ? 1.0 : 1.0 - alpha.tail_scale(); }

namespace {

void validate_terms(std::span<const RiskTerm> terms, const wasserstein::RadiusSpec& radius,
                    const DecisionSpec& decision) {
    if (terms.empty()) throw InputError("co-control problem needs at least the objective term");
    if (decision.dimension < 1) throw InputError("decision dimension must be positive");
    const auto n = static_cast<std::size_t>(decision.dimension);
    if ((!decision.lower.empty() && decision.lower.size() != n) ||
        (!decision.upper.empty() && decision.upper.size() != n))
        throw InputError("decision bounds do not match the decision dimension");
    for (const auto& c : decision.constraints)
        if (c.coefficients.size() != n)
            throw InputError("decision constraint does not match the decision dimension");
    if (!(radius.epsilon >= 0.0) || !std::isfinite(radius.epsilon))
        throw InputError(fmt::format("Wasserstein radius must be finite and >= 0, got {}", radius.epsilon));

    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& t = terms[i];
        if (t.penalty && !t.bound)
            throw InputError(fmt::format("term {} has a penalty but no bound", i));
        if (i == 0 && (t.bound || t.penalty))
            throw InputError("the objective term (index 0) takes neither bound nor penalty");
        if (i > 0 && (!t.bound || !t.penalty))
            throw InputError(fmt::format("constraint term {} needs both a bound and a penalty", i));
        if (t.bound && !std::isfinite(*t.bound))
            throw InputError(fmt::format("term {} has a non-finite bound", i));
        if (t.penalty && !(*t.penalty >= 0.0 && std::isfinite(*t.penalty)))
            throw InputError(fmt::format("term {} needs a finite penalty >= 0", i));
        if (t.samples.dimension() != decision.dimension || t.support.dimension() != decision.dimension)
            throw InputError(fmt::format("term {} dimension differs from the decision dimension", i));
        for (Eigen::Index k = 0; k < t.samples.sample_count(); ++k)
            if (t.support.max_violation(t.samples.row(k)) > kContainmentTolerance)
                throw BuildError(fmt::format("sample {} of term {} lies outside its support polytope", k, i));
    }
}

} // namespace

CoControlLp build_cocontrol_lp(std::span<const RiskTerm> terms, const wasserstein::RadiusSpec& radius,
                               const DecisionSpec& decision) {
    validate_terms(terms, radius, decision);
    using milp::Relation;
    using milp::Term;
    CoControlLp out;
    auto& lp = out.lp;
    auto& layout = out.layout;
    const int n = decision.dimension;

    for (int d = 0; d < n; ++d) {
        const auto name = fmt::format("y_{}", d);
        const auto sd = static_cast<std::size_t>(d);
        if (decision.binary && decision.lower.empty() && decision.upper.empty()) {
            layout.y.push_back(lp.add_binary(name));
            continue;
        }
        const double lo = decision.lower.empty() ? 0.0 : decision.lower[sd];
        const double hi = decision.upper.empty() ? 1.0 : decision.upper[sd];
        const int col = decision.binary ? lp.add_binary(name) : lp.add_column(name, lo, hi);
        if (decision.binary) lp.set_bounds(col, std::max(lo, 0.0), std::min(hi, 1.0));
        layout.y.push_back(col);
    }
    for (std::size_t i = 0; i < terms.size(); ++i)
        layout.z.push_back(lp.add_column(fmt::format("z_{}", i), -milp::kInfinity, milp::kInfinity));
    for (std::size_t i = 0; i < terms.size(); ++i)
        layout.rho.push_back(i == 0 ? -1
                                    : lp.add_column(fmt::format("rho_{}", i), 0.0, milp::kInfinity,
                                                    *terms[i].penalty));
    layout.lambda = lp.add_column("lambda", 0.0, milp::kInfinity, radius.epsilon);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto k_count = terms[i].samples.sample_count();
        const double weight = 1.0 / static_cast<double>(k_count);
        auto& s_cols = layout.s.emplace_back();
        for (Eigen::Index k = 0; k < k_count; ++k)
            s_cols.push_back(lp.add_column(fmt::format("s_{}_{}", i, k), -milp::kInfinity,
                                           milp::kInfinity, weight));
    }

    for (std::size_t c = 0; c < decision.constraints.size(); ++c) {
        const auto& con = decision.constraints[c];
        std::vector<Term> terms_row;
        for (int d = 0; d < n; ++d)
            terms_row.push_back({layout.y[static_cast<std::size_t>(d)], con.coefficients[static_cast<std::size_t>(d)]});
        lp.add_row(fmt::format("decision_{}", c), std::move(terms_row), con.relation, con.rhs);
    }
    for (std::size_t i = 1; i < terms.size(); ++i) {
        lp.add_row(fmt::format("cocontrol_{}", i), {{layout.z[i], 1.0}, {layout.rho[i], 1.0}},
                   Relation::Equal, *terms[i].bound);
        ++layout.bound_rows;
    }

    layout.gamma_begin = lp.column_count();
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& term = terms[i];
        const auto& cm = term.support.c_matrix();
        const auto& dv = term.support.d_vector();
        const Eigen::Index facets = term.support.facet_count();
        for (Eigen::Index k = 0; k < term.samples.sample_count(); ++k) {
            const Eigen::RowVectorXd w = term.samples.row(k);
            const Eigen::VectorXd room = dv - cm * w.transpose();
            for (int j = 0; j < 2; ++j) {
                const double a = term.piece_slope(j);
                const double b = term.piece_offset(j);
                std::vector<int> gamma(static_cast<std::size_t>(facets));
                for (Eigen::Index r = 0; r < facets; ++r)
                    gamma[static_cast<std::size_t>(r)] =
                        lp.add_column(fmt::format("g_{}_{}_{}_{}", i, k, j, r), 0.0, milp::kInfinity);

                std::vector<Term> epigraph{{layout.z[i], b}, {layout.s[i][static_cast<std::size_t>(k)], -1.0}};
                for (Eigen::Index r = 0; r < facets; ++r)
                    epigraph.push_back({gamma[static_cast<std::size_t>(r)], std::max(0.0, room(r))});
                for (int d = 0; d < n; ++d)
                    epigraph.push_back({layout.y[static_cast<std::size_t>(d)], a * w(d)});
                lp.add_row(fmt::format("risk_{}_{}_{}", i, k, j), std::move(epigraph),
                           Relation::LessEqual, 0.0);
                ++layout.risk_rows;

                for (int d = 0; d < n; ++d) {
                    for (int side = 0; side < 2; ++side) {
                        const double sgn = side == 0 ? 1.0 : -1.0;
                        std::vector<Term> norm_row{{layout.lambda, -1.0},
                                                   {layout.y[static_cast<std::size_t>(d)], -sgn * a}};
                        for (Eigen::Index r = 0; r < facets; ++r)
                            norm_row.push_back({gamma[static_cast<std::size_t>(r)], sgn * cm(r, d)});
                        lp.add_row(fmt::format("norm_{}_{}_{}_{}_{}", i, k, j, d, side == 0 ? "p" : "m"),
                                   std::move(norm_row), Relation::LessEqual, 0.0);
                        ++layout.norm_rows;
                    }
                }
            }
        }
    }
    layout.gamma_end = lp.column_count();
    return out;
}

milp::LpSolution solve_model(const CoControlLp& model, const milp::BranchAndBoundOptions& options) {
    if (model.lp.has_binaries()) return milp::solve_milp(model.lp, options);
    return milp::solve_lp(model.lp, options.lp);
}

CoControlSolution extract_solution(const CoControlLp& model, const milp::LpSolution& raw,
                                   std::span<const RiskTerm> terms) {
    if (raw.status != milp::SolveStatus::Solved)
        throw SolveError(fmt::format("co-control model not solved: {}", milp::to_string(raw.status)));
    const auto& layout = model.layout;
    if (terms.size() != layout.z.size()) throw InputError("term list does not match the model");
    auto value = [&](int col) { return raw.values.at(static_cast<std::size_t>(col)); };

    CoControlSolution sol;
    for (int col : layout.y) sol.y.push_back(value(col));
    for (std::size_t i = 0; i < terms.size(); ++i) {
        sol.z.push_back(value(layout.z[i]));
        sol.rho.push_back(layout.rho[i] < 0 ? 0.0 : value(layout.rho[i]));
        double sum = 0.0;
        for (int col : layout.s[i]) sum += value(col);
        sol.cvar_per_term.push_back(sum / static_cast<double>(layout.s[i].size()));
    }
    sol.lambda = value(layout.lambda);
    sol.objective = raw.objective;
    return sol;
}

std::vector<double> term_losses(const RiskTerm& term, std::span<const double> y) {
    const auto& data = term.samples.data();
    if (static_cast<Eigen::Index>(y.size()) != data.cols())
        throw InputError("decision length differs from the term dimension");
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    const Eigen::VectorXd losses = static_cast<double>(static_cast<int>(term.sign)) * (data * yv);
    return {losses.data(), losses.data() + losses.size()};
}

double added_security(const CoControlSolution& solution, std::span<const RiskTerm> terms,
                      std::size_t term_index) {
    const auto& term = terms[term_index];
    if (!term.bound) throw InputError("added security is defined for constrained terms only");
    const auto losses = term_losses(term, solution.y);
    const double z = solution.z[term_index];
    const double top = z + solution.rho[term_index];
    const double tol = 1e-9 * std::max(1.0, std::abs(z));
    const auto inside = std::count_if(losses.begin(), losses.end(),
                                      [&](double l) { return l >= z - tol && l <= top + tol; });
    return static_cast<double>(inside) / static_cast<double>(losses.size());
}

double violation_rate(const CoControlSolution& solution, std::span<const RiskTerm> terms,
                      std::size_t term_index) {
    const auto& term = terms[term_index];
    if (!term.bound) throw InputError("violation rate is defined for constrained terms only");
    const auto losses = term_losses(term, solution.y);
    const double b = *term.bound;
    const double tol = 1e-9 * std::max(1.0, std::abs(b));
    const auto above = std::count_if(losses.begin(), losses.end(), [&](double l) { return l > b + tol; });
    return static_cast<double>(above) / static_cast<double>(losses.size());
}

std::string format_report(const CoControlSolution& solution, std::span<const RiskTerm> terms,
                          const wasserstein::RadiusSpec& radius) {
    std::string out;
    auto put = [&out](const std::string& key, double v) { out += fmt::format("{} = {:.12g}\n", key, v + 0.0); };
    out += "status = SOLVED\n";
    put("objective", solution.objective);
    put("epsilon", radius.epsilon);
    put("lambda", solution.lambda);
    for (std::size_t d = 0; d < solution.y.size(); ++d) put(fmt::format("y.{}", d), solution.y[d]);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        put(fmt::format("term.{}.z", i), solution.z[i]);
        put(fmt::format("term.{}.cvar", i), solution.cvar_per_term[i]);
        if (!terms[i].bound) continue;
        put(fmt::format("term.{}.bound", i), *terms[i].bound);
        put(fmt::format("term.{}.rho", i), solution.rho[i]);
        put(fmt::format("term.{}.added_security", i), added_security(solution, terms, i));
        put(fmt::format("term.{}.violation_rate", i), violation_rate(solution, terms, i));
    }
    return out;
}

} // namespace drcvar::cocontrol
