#pragma once

#include "drcvar/cocontrol.hpp"
#include "drcvar/sample_set.hpp"
#include "drcvar/wasserstein.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace drcvar::auction {

/// Reverse auction for demand response: customer n bids a reduction r_n at
/// price pi_n; the aggregator must procure at least `target` energy. The
/// history holds past deviations delta_n^k (delivered minus bid), K x N.
struct AuctionInstance {
    std::vector<double> bids;
    std::vector<double> prices;
    double target = 0.0;
    Eigen::MatrixXd deviations;

    int customer_count() const noexcept { return static_cast<int>(bids.size()); }
    Eigen::Index sample_count() const noexcept { return deviations.rows(); }
    /// Throws InputError on negative bids/prices/target or a ragged history.
    void validate() const;
};

struct AuctionConfig {
    double alpha0 = 0.9; // cost term
    double alpha1 = 0.9; // shortfall term
    /// Penalty as a fraction of the reference scale (see penalty_for).
    double eta_pi = 0.0;
    double beta = 0.95;
    std::optional<double> c_override;
    /// Bypasses calibration entirely.
    std::optional<double> epsilon_override;
    double support_margin = 0.10;
    double xi_max = 1e6;
    /// Branch-and-bound node budget; exhausting it fails the solve.
    long node_limit = 1000000;
    std::uint64_t seed = 1;
};

/// Realized delivery w1 = r + delta and its priced counterpart w0 = pi * w1.
struct RealizedSamples {
    SampleSet cost;     // w0
    SampleSet delivery; // w1
};

RealizedSamples realize_samples(const AuctionInstance& instance);

/// eta = eta_pi * mean(pi) * (sum_n r_n pi_n / N).
double penalty_for(const AuctionInstance& instance, double eta_pi);

struct AuctionProblem {
    std::vector<cocontrol::RiskTerm> terms;
    cocontrol::DecisionSpec decision;
    double eta = 0.0;
    std::vector<std::string> warnings;
};

/// Term 0: CVaR of the procurement cost <u, w0>. Term 1: CVaR of the
/// shortfall -<u, w1> with bound -target and penalty eta. u is binary.
AuctionProblem build_auction_problem(const AuctionInstance& instance, const AuctionConfig& config);

/// C for each term's samples; the joint radius uses the largest.
struct Calibration {
    std::vector<double> c_per_term;
    wasserstein::RadiusSpec radius;
};

/// Radius from the config: epsilon override, else C override or estimate_c.
Calibration calibrate(const AuctionProblem& problem, const AuctionConfig& config);

struct AuctionResult {
    AuctionProblem problem;
    Calibration calibration;
    cocontrol::CoControlLp model;
    milp::LpSolution raw;
    std::optional<cocontrol::CoControlSolution> solution; // set when SOLVED
};

/// Build, calibrate and solve in one go.
AuctionResult solve_auction(const AuctionInstance& instance, const AuctionConfig& config);

struct SyntheticSpec {
    int customers = 10;
    double gamma = 0.2; // bid fraction of base consumption
    double sigma = 0.1; // deviation std as a fraction of the bid
    int samples = 100;
    std::uint64_t seed = 1;
    /// Base consumption is drawn log-uniformly from this range.
    double base_min = 10.0;
    double base_max = 60.0;
    /// Target as a fraction of the summed bids.
    double target_fraction = 0.5;
};

/// Base levels come from stream 0 of the seed and standardized deviations
/// from stream 1, so changing gamma or sigma rescales the same draws. Each
/// deviation is normal with std sigma * r_n, redrawn until |delta| <= r_n.
/// Prices are 1.
AuctionInstance generate_synthetic(const SyntheticSpec& spec);

} // namespace drcvar::auction
