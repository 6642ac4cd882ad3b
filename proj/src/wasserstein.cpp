#include "drcvar/wasserstein.hpp"

#include "drcvar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <vector>

namespace drcvar::wasserstein {

namespace {

// Squared l1 deviations from the sample mean, the only data c_objective needs.
class CObjective {
public:
    explicit CObjective(const SampleSet& samples) {
        const Eigen::RowVectorXd mean = sample_mean(samples).transpose();
        const Eigen::Index k = samples.sample_count();
        sq_dev_.resize(static_cast<std::size_t>(k));
        for (Eigen::Index i = 0; i < k; ++i) {
            const double l1 = (samples.row(i) - mean).cwiseAbs().sum();
            sq_dev_[static_cast<std::size_t>(i)] = l1 * l1;
        }
        max_dev_ = *std::max_element(sq_dev_.begin(), sq_dev_.end());
        log_count_ = std::log(static_cast<double>(k));
    }

    double operator()(double xi) const {
        // ln((1/K) sum exp(xi d_k)) = xi d_max + ln(sum exp(xi (d_k - d_max))) - ln K
        double acc = 0.0;
        for (double d : sq_dev_) acc += std::exp(xi * (d - max_dev_));
        const double log_mean = xi * max_dev_ + std::log(acc) - log_count_;
        return std::sqrt((1.0 + log_mean) / (2.0 * xi));
    }

    double max_deviation() const { return max_dev_; }

private:
    std::vector<double> sq_dev_;
    double max_dev_ = 0.0;
    double log_count_ = 0.0;
};

constexpr int kBracketGrid = 128;
constexpr int kMaxBisections = 200;

} // namespace

Eigen::VectorXd sample_mean(const SampleSet& samples) {
    return samples.data().colwise().mean().transpose();
}

double c_objective(const SampleSet& samples, double xi) {
    if (!(xi > 0.0)) throw InputError("c_objective needs xi > 0");
    return CObjective(samples)(xi);
}

double estimate_c(const SampleSet& samples, const EstimateOptions& options) {
    if (!(options.xi_max > 0.0) || !std::isfinite(options.xi_max))
        throw InputError(fmt::format("xi_max must be positive and finite, got {}", options.xi_max));
    if (!(options.tol > 0.0)) throw InputError("estimate_c tolerance must be positive");

    const CObjective objective(samples);
    double xi_min = options.xi_max * 1e-12;
    if (objective.max_deviation() > 0.0)
        xi_min = std::min(xi_min, 1e-4 / objective.max_deviation());

    // Work in t = ln(xi); the objective varies over many decades of xi.
    const double t_lo = std::log(xi_min);
    const double t_hi = std::log(options.xi_max);
    auto eval = [&](double t) { return objective(std::exp(t)); };

    std::vector<double> grid(kBracketGrid);
    int best_index = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kBracketGrid; ++i) {
        const double t = t_lo + (t_hi - t_lo) * i / (kBracketGrid - 1);
        grid[static_cast<std::size_t>(i)] = eval(t);
        if (grid[static_cast<std::size_t>(i)] < best) {
            best = grid[static_cast<std::size_t>(i)];
            best_index = i;
        }
    }

    const double step = (t_hi - t_lo) / (kBracketGrid - 1);
    double a = t_lo + step * std::max(best_index - 1, 0);
    double b = t_lo + step * std::min(best_index + 1, kBracketGrid - 1);
    b = std::min(b, t_hi);
    double fa = eval(a);
    double fb = eval(b);
    for (int iter = 0; iter < kMaxBisections; ++iter) {
        // For a convex objective, endpoints within tol of the best interior
        // value bound the minimum to within tol as well.
        if ((iter > 0 && std::max(fa, fb) - best <= options.tol) || b - a <= 1e-14 * std::max(1.0, std::abs(b)))
            break;
        const double mid = 0.5 * (a + b);
        const double h = 1e-3 * (b - a);
        const double slope = eval(mid + h) - eval(mid - h);
        const double fmid = eval(mid);
        best = std::min(best, fmid);
        if (slope < 0.0) {
            a = mid;
            fa = fmid;
        } else {
            b = mid;
            fb = fmid;
        }
    }
    best = std::min({best, fa, fb});
    return 2.0 * best;
}

RadiusSpec radius(Eigen::Index sample_count, double beta, double c_constant) {
    if (sample_count < 1) throw InputError("radius needs at least one sample");
    if (!(beta >= 0.0 && beta < 1.0))
        throw InputError(fmt::format("beta must lie in [0, 1), got {}", beta));
    if (!(c_constant >= 0.0) || !std::isfinite(c_constant))
        throw InputError(fmt::format("C must be finite and nonnegative, got {}", c_constant));
    const double log_term = std::log(1.0 / (1.0 - beta));
    return {beta, c_constant,
            c_constant * std::sqrt(log_term / static_cast<double>(sample_count))};
}

RadiusSpec radius(const SampleSet& samples, double beta, double c_constant) {
    return radius(samples.sample_count(), beta, c_constant);
}

} // namespace drcvar::wasserstein
