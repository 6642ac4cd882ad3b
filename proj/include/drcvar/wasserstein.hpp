#pragma once

#include "drcvar/sample_set.hpp"

#include <Eigen/Dense>

namespace drcvar::wasserstein {

/// Radius of the Wasserstein ball around the empirical distribution.
struct RadiusSpec {
    double beta = 0.0;
    double c_constant = 0.0;
    double epsilon = 0.0;
};

/// Componentwise mean of the sample rows.
Eigen::VectorXd sample_mean(const SampleSet& samples);

struct EstimateOptions {
    /// Upper end of the search over xi. For near-constant data the infimum is
    /// approached only as xi grows without bound, so the returned C is an
    /// upper estimate whenever the minimizer sits at this cap.
    double xi_max = 1e6;
    /// Tolerance on the objective value at which bisection stops.
    double tol = 1e-10;
};

/// The function minimized by estimate_c, before the leading factor 2:
/// sqrt( (1 / (2 xi)) * (1 + ln( (1/K) sum_k exp(xi * ||w_k - mu||_1^2) )) ).
/// Evaluated with a log-sum-exp so large xi does not overflow.
double c_objective(const SampleSet& samples, double xi);

/// 2 * inf over xi in (0, xi_max] of c_objective. A 128-point log-spaced scan
/// brackets the minimum, then bisection on the sign of a central difference
/// refines it.
double estimate_c(const SampleSet& samples, const EstimateOptions& options = {});

/// epsilon = C * sqrt(log(1 / (1 - beta)) / K) with K the sample count.
RadiusSpec radius(const SampleSet& samples, double beta, double c_constant);
/// Same formula without a sample set.
RadiusSpec radius(Eigen::Index sample_count, double beta, double c_constant);

} // namespace drcvar::wasserstein
