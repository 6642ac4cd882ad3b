#pragma once

#include <span>
#include <vector>

namespace drcvar::risk {

/// Probability level in the open interval (0, 1).
class Alpha {
public:
    /// Throws InputError when value is not in (0, 1).
    explicit Alpha(double value);

    double value() const noexcept { return value_; }
    /// 1 / (1 - alpha), the slope of the tail piece.
    double tail_scale() const noexcept { return 1.0 / (1.0 - value_); }

private:
    double value_;
};

/// Realizations of a scalar random loss. Nonempty, all values finite.
class EmpiricalSamples1D {
public:
    explicit EmpiricalSamples1D(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    std::vector<double> values_;
};

/// One affine piece a * x + b * z of a pointwise-maximum loss.
struct LinearPiece {
    double a;
    double b;
};

/// Pointwise maximum of affine pieces in (x, z).
class PwlLoss {
public:
    explicit PwlLoss(std::vector<LinearPiece> pieces);

    /// The two-piece loss whose expectation, minimized over z, is the CVaR:
    /// max(z, z + (x - z) / (1 - alpha)).
    static PwlLoss cvar(Alpha alpha);

    std::span<const LinearPiece> pieces() const noexcept { return pieces_; }

private:
    std::vector<LinearPiece> pieces_;
};

/// Smallest k such that k / sample_count >= alpha, evaluated in floating point.
/// This is the 1-based rank of the empirical VaR order statistic.
std::size_t var_rank(std::size_t sample_count, Alpha alpha);

/// Empirical VaR: the var_rank-th smallest sample.
double empirical_var(const EmpiricalSamples1D& samples, Alpha alpha);

struct CvarResult {
    double cvar;
    double var;
};

/// Empirical CVaR by minimizing z + E[(X - z)^+] / (1 - alpha) over z.
///
/// The objective is convex and piecewise linear with kinks at the samples, so
/// its minimum is attained on a sample. `var` is the smallest minimizer, which
/// is the same order statistic empirical_var returns.
CvarResult empirical_cvar(const EmpiricalSamples1D& samples, Alpha alpha);

/// max_j (a_j * x + b_j * z)
double pwl_max_eval(const PwlLoss& loss, double x, double z);

} // namespace drcvar::risk
