#pragma once

// Randomized co-control instances shared by the unit and acceptance tests.

#include "drcvar/cocontrol.hpp"
#include "support/oracles.hpp"

#include <random>

namespace fixture {

struct Instance {
    std::vector<drcvar::cocontrol::RiskTerm> terms;
    drcvar::cocontrol::DecisionSpec decision;
};

inline Eigen::MatrixXd uniform_matrix(std::mt19937_64& rng, int k, int n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::MatrixXd m(k, n);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = u(rng);
    return m;
}

inline drcvar::cocontrol::RiskTerm make_term(double alpha, drcvar::cocontrol::LossSign sign,
                                             std::optional<double> bound, std::optional<double> penalty,
                                             Eigen::MatrixXd data, double margin = 0.1) {
    drcvar::SampleSet samples(std::move(data));
    auto support = drcvar::cocontrol::SupportPolytope::box_around(samples, margin);
    return {drcvar::risk::Alpha(alpha), sign, bound, penalty, std::move(samples), std::move(support)};
}

// One objective term plus one or two constrained terms, continuous y in
// [0, 1]^N with sum(y) >= 1. Each term has its own sample matrix.
inline Instance random_instance(std::mt19937_64& rng, int n, int k, double eta) {
    using drcvar::cocontrol::LossSign;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> extra(1, 2);
    const double alphas[] = {0.5, 0.8, 0.9, 0.95};
    Instance inst;
    inst.terms.push_back(make_term(alphas[rng() % 4], LossSign::Positive, std::nullopt, std::nullopt,
                                   uniform_matrix(rng, k, n, 0.5, 3.0)));
    const int constrained = extra(rng);
    for (int t = 0; t < constrained; ++t) {
        const Eigen::MatrixXd w = uniform_matrix(rng, k, n, 1.0, 4.0);
        const double bound = -(0.5 + 2.0 * unit(rng));
        inst.terms.push_back(make_term(alphas[rng() % 4], LossSign::Negative, bound, eta, w));
    }
    inst.decision.dimension = n;
    inst.decision.constraints.push_back({std::vector<double>(static_cast<std::size_t>(n), 1.0),
                                         drcvar::milp::Relation::GreaterEqual, 1.0});
    return inst;
}

// The same instance in the direct sample-average form, solved densely.
inline oracle::TableauResult solve_saa_oracle(const Instance& inst,
                                              const std::optional<std::vector<double>>& fixed_y = std::nullopt) {
    std::vector<oracle::SaaTerm> saa;
    for (const auto& t : inst.terms)
        saa.push_back({t.alpha.value(), static_cast<double>(static_cast<int>(t.sign)), t.bound,
                       t.penalty.value_or(0.0), t.samples.data()});
    const int n = inst.decision.dimension;
    const std::vector<double> lo(static_cast<std::size_t>(n), 0.0), hi(static_cast<std::size_t>(n), 1.0);
    auto lp = oracle::saa_model(saa, n, lo, hi, fixed_y);
    for (const auto& c : inst.decision.constraints) {
        std::vector<drcvar::milp::Term> row;
        for (int d = 0; d < n; ++d) row.push_back({d, c.coefficients[static_cast<std::size_t>(d)]});
        lp.add_row("", std::move(row), c.relation, c.rhs);
    }
    return oracle::solve_dense(lp);
}

} // namespace fixture
