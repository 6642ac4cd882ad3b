#include "drcvar/risk_core.hpp"

#include "drcvar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace drcvar::risk {

Alpha::Alpha(double value) : value_(value) {
    if (!(value > 0.0 && value < 1.0))
        throw InputError(fmt::format("alpha must lie in (0, 1), got {}", value));
}

EmpiricalSamples1D::EmpiricalSamples1D(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw InputError("empirical sample set is empty");
    for (double v : values_)
        if (!std::isfinite(v)) throw InputError("empirical sample set contains a non-finite value");
}

PwlLoss::PwlLoss(std::vector<LinearPiece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw InputError("piecewise-linear loss needs at least one piece");
}

PwlLoss PwlLoss::cvar(Alpha alpha) {
    const double scale = alpha.tail_scale();
    return PwlLoss({{0.0, 1.0}, {scale, 1.0 - scale}});
}

std::size_t var_rank(std::size_t sample_count, Alpha alpha) {
    const auto count = static_cast<double>(sample_count);
    auto k = static_cast<std::size_t>(std::ceil(alpha.value() * count));
    k = std::clamp<std::size_t>(k, 1, sample_count);
    // alpha * K may be off by one ulp; settle on the exact counting criterion.
    while (k > 1 && static_cast<double>(k - 1) / count >= alpha.value()) --k;
    while (k < sample_count && static_cast<double>(k) / count < alpha.value()) ++k;
    return k;
}

double empirical_var(const EmpiricalSamples1D& samples, Alpha alpha) {
    std::vector<double> sorted(samples.values().begin(), samples.values().end());
    const std::size_t k = var_rank(sorted.size(), alpha);
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     sorted.end());
    return sorted[k - 1];
}

CvarResult empirical_cvar(const EmpiricalSamples1D& samples, Alpha alpha) {
    std::vector<double> sorted(samples.values().begin(), samples.values().end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double weight = alpha.tail_scale() / static_cast<double>(n);

    // Objective at z = sorted[j]: only samples above index j contribute to the
    // hinge term; equal samples contribute zero.
    double best = std::numeric_limits<double>::infinity();
    double suffix = 0.0;
    std::vector<double> value_at(n);
    for (std::size_t j = n; j-- > 0;) {
        const double above = static_cast<double>(n - 1 - j);
        value_at[j] = sorted[j] + weight * (suffix - above * sorted[j]);
        suffix += sorted[j];
    }
    for (double v : value_at) best = std::min(best, v);

    return {best, sorted[var_rank(n, alpha) - 1]};
}

double pwl_max_eval(const PwlLoss& loss, double x, double z) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& piece : loss.pieces()) best = std::max(best, piece.a * x + piece.b * z);
    return best;
}

} // namespace drcvar::risk
