#include "drcvar/auction.hpp"

#include "drcvar/errors.hpp"
#include "drcvar/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>
#include <random>

namespace drcvar::auction {

void AuctionInstance::validate() const {
    const auto n = bids.size();
    if (n == 0) throw InputError("auction instance has no customers");
    if (prices.size() != n) throw InputError("bids and prices differ in length");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(bids[i] >= 0.0) || !std::isfinite(bids[i]))
            throw InputError(fmt::format("bid of customer {} must be finite and >= 0", i));
        if (!(prices[i] >= 0.0) || !std::isfinite(prices[i]))
            throw InputError(fmt::format("price of customer {} must be finite and >= 0", i));
    }
    if (!(target >= 0.0) || !std::isfinite(target)) throw InputError("target must be finite and >= 0");
    if (deviations.rows() < 1 || deviations.cols() != static_cast<Eigen::Index>(n))
        throw InputError("deviation history must have K >= 1 rows and one column per customer");
    if (!deviations.allFinite()) throw InputError("deviation history has non-finite entries");
}

RealizedSamples realize_samples(const AuctionInstance& instance) {
    instance.validate();
    const Eigen::Index n = instance.customer_count();
    const Eigen::Map<const Eigen::RowVectorXd> r(instance.bids.data(), n);
    const Eigen::Map<const Eigen::RowVectorXd> pi(instance.prices.data(), n);
    Eigen::MatrixXd delivery = instance.deviations.rowwise() + r;
    Eigen::MatrixXd cost = delivery.array().rowwise() * pi.array();
    return {SampleSet(std::move(cost)), SampleSet(std::move(delivery))};
}

double penalty_for(const AuctionInstance& instance, double eta_pi) {
    if (!(eta_pi >= 0.0) || !std::isfinite(eta_pi)) throw InputError("eta_pi must be finite and >= 0");
    const auto n = static_cast<double>(instance.bids.size());
    const double mean_price = std::accumulate(instance.prices.begin(), instance.prices.end(), 0.0) / n;
    const double bid_value =
        std::inner_product(instance.bids.begin(), instance.bids.end(), instance.prices.begin(), 0.0);
    return eta_pi * mean_price * (bid_value / n);
}

AuctionProblem build_auction_problem(const AuctionInstance& instance, const AuctionConfig& config) {
    auto samples = realize_samples(instance);
    AuctionProblem problem;
    problem.eta = penalty_for(instance, config.eta_pi);

    const double total_bids = std::accumulate(instance.bids.begin(), instance.bids.end(), 0.0);
    if (instance.target > total_bids)
        problem.warnings.push_back(fmt::format(
            "target {} exceeds the sum of all bids {}; the shortfall constraint is likely infeasible",
            instance.target, total_bids));

    auto cost_support = cocontrol::SupportPolytope::box_around(samples.cost, config.support_margin);
    auto delivery_support = cocontrol::SupportPolytope::box_around(samples.delivery, config.support_margin);
    problem.terms.push_back({risk::Alpha(config.alpha0), cocontrol::LossSign::Positive, std::nullopt,
                             std::nullopt, std::move(samples.cost), std::move(cost_support)});
    problem.terms.push_back({risk::Alpha(config.alpha1), cocontrol::LossSign::Negative, -instance.target,
                             problem.eta, std::move(samples.delivery), std::move(delivery_support)});
    problem.decision.dimension = instance.customer_count();
    problem.decision.binary = true;
    return problem;
}

Calibration calibrate(const AuctionProblem& problem, const AuctionConfig& config) {
    Calibration cal;
    const Eigen::Index k = problem.terms.front().samples.sample_count();
    if (config.epsilon_override) {
        if (!(*config.epsilon_override >= 0.0) || !std::isfinite(*config.epsilon_override))
            throw InputError("epsilon override must be finite and >= 0");
        cal.radius = {config.beta, 0.0, *config.epsilon_override};
        return cal;
    }
    double c = 0.0;
    if (config.c_override) {
        c = *config.c_override;
    } else {
        wasserstein::EstimateOptions options;
        options.xi_max = config.xi_max;
        for (const auto& term : problem.terms) {
            cal.c_per_term.push_back(wasserstein::estimate_c(term.samples, options));
            c = std::max(c, cal.c_per_term.back());
        }
    }
    cal.radius = wasserstein::radius(k, config.beta, c);
    return cal;
}

AuctionResult solve_auction(const AuctionInstance& instance, const AuctionConfig& config) {
    AuctionResult result;
    result.problem = build_auction_problem(instance, config);
    result.calibration = calibrate(result.problem, config);
    result.model = cocontrol::build_cocontrol_lp(result.problem.terms, result.calibration.radius,
                                                 result.problem.decision);
    milp::BranchAndBoundOptions options;
    options.node_limit = config.node_limit;
    result.raw = cocontrol::solve_model(result.model, options);
    if (result.raw.status == milp::SolveStatus::Solved)
        result.solution = cocontrol::extract_solution(result.model, result.raw, result.problem.terms);
    return result;
}

AuctionInstance generate_synthetic(const SyntheticSpec& spec) {
    if (spec.customers < 1) throw InputError("synthetic instance needs at least one customer");
    if (!(spec.gamma > 0.0 && spec.gamma <= 1.0)) throw InputError("gamma must lie in (0, 1]");
    if (!(spec.sigma > 0.0 && spec.sigma <= 1.0)) throw InputError("sigma must lie in (0, 1]");
    if (spec.samples < 1) throw InputError("synthetic instance needs at least one sample");
    if (!(spec.base_min > 0.0 && spec.base_max >= spec.base_min))
        throw InputError("base consumption range must be positive and ordered");

    AuctionInstance inst;
    const auto n = static_cast<std::size_t>(spec.customers);
    auto base_stream = make_stream(spec.seed, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double log_lo = std::log(spec.base_min);
    const double log_hi = std::log(spec.base_max);
    for (std::size_t i = 0; i < n; ++i) {
        const double base = std::exp(log_lo + (log_hi - log_lo) * unit(base_stream));
        inst.bids.push_back(spec.gamma * base);
        inst.prices.push_back(1.0);
    }
    inst.target = spec.target_fraction * std::accumulate(inst.bids.begin(), inst.bids.end(), 0.0);

    auto deviation_stream = make_stream(spec.seed, 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double cutoff = 1.0 / spec.sigma;
    inst.deviations.resize(spec.samples, spec.customers);
    for (int k = 0; k < spec.samples; ++k) {
        for (int i = 0; i < spec.customers; ++i) {
            double z = normal(deviation_stream);
            while (std::abs(z) > cutoff) z = normal(deviation_stream);
            inst.deviations(k, i) = z * spec.sigma * inst.bids[static_cast<std::size_t>(i)];
        }
    }
    return inst;
}

} // namespace drcvar::auction
