#pragma once

// Shared numerical kernels: adaptive Dormand-Prince integration with
// dense output, bracketed scalar root finding, and dense
// eigenvalues for small real matrices.

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "flocsim/errors.hpp"

namespace flocsim::numerics {

using State = std::vector<double>;

/// Right-hand side y' = F(t, y); writes F into `dy` (same length as `y`).
/// May throw DomainError for states outside its domain; the integrator
/// treats that as a rejected trial step.
using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dy)>;

/// Returns true to stop integration after the current accepted step.
using StopCondition = std::function<bool(double t, std::span<const double> y)>;

struct IntegratorConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 10'000'000;
    /// Number of points on uniform output grids built from this config.
    std::size_t output_points = 2000;

    void validate() const;
};

/// Accepted steps of an integration plus the data needed for dense output.
/// Times are strictly increasing.
class Trajectory {
public:
    explicit Trajectory(std::size_t dimension) : dim_(dimension) {}

    std::size_t dimension() const noexcept { return dim_; }
    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }

    std::span<const double> times() const noexcept { return times_; }
    double time(std::size_t i) const { return times_.at(i); }
    std::span<const double> state(std::size_t i) const;
    std::span<const double> slope(std::size_t i) const;
    std::span<const double> back() const { return state(size() - 1); }

    double start_time() const { return times_.front(); }
    double end_time() const { return times_.back(); }

    /// True when a StopCondition ended the run before the requested end.
    bool stopped_early() const noexcept { return stopped_early_; }
    void mark_stopped() noexcept { stopped_early_ = true; }

    /// Dense output: the fourth-order continuous extension of the step
    /// (cubic Hermite where no extension was stored); exact at the nodes.
    /// `t` must lie in [start_time(), end_time()].
    State at(double t) const;

    /// Dense output on a sorted grid.
    std::vector<State> sample(std::span<const double> grid) const;

    /// `extension` holds the quartic coefficient of the step ending at t;
    /// empty means cubic Hermite on that step.
    void append(double t, std::span<const double> y, std::span<const double> dy,
                std::span<const double> extension = {});

private:
    std::size_t dim_;
    std::vector<double> times_;
    std::vector<double> states_;
    std::vector<double> slopes_;
    std::vector<double> extension_;
    bool stopped_early_ = false;
};

/// Integrates y' = rhs(t, y) from t0 to t1 > t0 with an embedded 5(4)
/// Runge-Kutta pair (Dormand-Prince), PI step-size control and mixed error
/// weights abs_tol + rel_tol*|y|. Deterministic for identical inputs.
///
/// Throws IntegrationError on step-size underflow or when max_steps is
/// exceeded; the error carries the last accepted time.
Trajectory integrate(const Rhs& rhs, std::span<const double> init, double t0, double t1,
                     const IntegratorConfig& config = {}, const StopCondition& stop = {});

/// n equally spaced points covering [a, b] including both ends.
std::vector<double> uniform_grid(double a, double b, std::size_t n);

struct Root {
    double x;
    /// |func(x)|
    double residual;
    int iterations;
};

/// Bracketed root of a continuous scalar function (TOMS 748, a Brent-class
/// method). Requires func(lo)*func(hi) <= 0, otherwise throws BracketError.
/// The returned root always lies in [min(lo,hi), max(lo,hi)] and the final
/// bracket width is at most max(tol, a few ulps).
Root find_root(const std::function<double(double)>& func, double lo, double hi, double tol,
               int max_iterations = 200);

using Complex = std::complex<double>;

/// Eigenvalues of a real square matrix (dimension <= 64), sorted by real
/// part descending (ties broken by imaginary part descending). 2x2 uses
/// trace/determinant; larger sizes use balancing followed by Hessenberg
/// reduction and shifted QR. Throws NumericError on non-convergence.
std::vector<Complex> eigenvalues(const Eigen::MatrixXd& m);

inline double max_real_part(std::span<const Complex> values) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : values) best = std::max(best, v.real());
    return best;
}

} // namespace flocsim::numerics
