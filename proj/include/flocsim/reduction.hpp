#pragma once

// Slow manifolds of the attachment dynamics, reduced density-dependent
// chemostat models, and empirical checks that the full model tracks the
// reduced one as the timescale separation epsilon goes to zero.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "flocsim/models.hpp"
#include "flocsim/numerics.hpp"

namespace flocsim {

/// Planktonic biomass u in [0, x] on the slow manifold alpha*u = beta*(x - u).
/// Uses the closed form of each kinetics variant; Freter is root-solved.
double slow_manifold_u(const AttachmentKinetics& kinetics, double x, double s, double g_at_s);

/// Same quantity through a bracketed 1-D root solve of the balance for any
/// variant. Throws NumericError if the balance has no sign change on the
/// admissible interval.
double slow_manifold_u_generic(const AttachmentKinetics& kinetics, double x, double s,
                               double g_at_s);

/// Planktonic fraction p = u/x and its partial derivatives.
struct Fraction {
    double p;
    double dp_ds;
    double dp_dx;
};

/// Reduced two-dimensional model
///   S' = D (S_in - S) - mu(S, x) x,   x' = (mu(S, x) - d(S, x)) x
/// with mu = p f + (1 - p) g and d = p D0 + (1 - p) D1.
class ReducedModel {
public:
    explicit ReducedModel(FullModel source);

    const FullModel& source() const noexcept { return source_; }
    double D() const noexcept { return source_.D; }
    double S_in() const noexcept { return source_.S_in; }

    Fraction fraction(double s, double x) const;

    double growth(double s, double x) const;
    double growth_ds(double s, double x) const;
    double growth_dx(double s, double x) const;

    double removal(double s, double x) const;
    double removal_ds(double s, double x) const;
    double removal_dx(double s, double x) const;

    /// x-only overloads, valid when !fraction_depends_on_substrate().
    double removal(double x) const { return removal(0.0, x); }
    double removal_dx(double x) const { return removal_dx(0.0, x); }

    /// True for the SubstrateDependent and Freter kinetics, where p = p(S, x).
    bool fraction_depends_on_substrate() const noexcept;

    /// True when p = p(x) is decreasing with p(0) = 1, p(+inf) = 0 and
    /// [x p(x)]' > 0 by construction (TotalDensity and MassAction).
    bool density_dependent_fraction() const noexcept;

    std::array<double, 2> rhs(double s, double x) const;
    void rhs_vec(std::span<const double> y, std::span<double> dy) const;

private:
    FullModel source_;
};

ReducedModel reduce(const FullModel& model);

/// Reduced n-species model with p_i(x) = b_i / (b_i + sum_j a_ij x_j).
/// State layout (S, x_1..x_n).
class MultiReducedModel {
public:
    explicit MultiReducedModel(MultiSpeciesModel source);

    const MultiSpeciesModel& source() const noexcept { return source_; }
    std::size_t species() const noexcept { return source_.species(); }
    bool diagonal() const noexcept { return source_.diagonal(); }

    std::vector<double> fractions(std::span<const double> x) const;
    /// u_i = b_i x_i / (b_i + sum_j a_ij x_j)
    std::vector<double> quasi_steady_u(std::span<const double> x) const;

    double growth(std::size_t i, double s, std::span<const double> x) const;
    double removal(std::size_t i, std::span<const double> x) const;
    double growth_ds(std::size_t i, double s, std::span<const double> x) const;
    double growth_dx(std::size_t i, std::size_t j, double s, std::span<const double> x) const;

    void rhs_vec(std::span<const double> y, std::span<double> dy) const;

    /// Species i as a single-species reduced model (valid for diagonal A):
    /// TotalDensity(a_ii, b_i) kinetics with the shared D and S_in.
    ReducedModel species_model(std::size_t i) const;

private:
    MultiSpeciesModel source_;
};

MultiReducedModel reduce_multi(const MultiSpeciesModel& model);

struct ConvergenceRow {
    double epsilon = 0.0;
    double err_S = 0.0;
    double err_x = 0.0;
    /// u and v errors over [t0, T] against the slow-manifold prediction.
    double err_u = 0.0;
    double err_v = 0.0;
    /// u error over all of [0, T], boundary layer included (not serialized).
    double err_u_with_layer = 0.0;
    bool failed = false;
    std::string failure;
};

/// Sup-norm errors between full and reduced trajectories, one row per
/// epsilon in decreasing order. Serializes to CSV
/// `epsilon,err_S,err_x,err_u,err_v`; failed rows carry nan errors.
struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;

    std::string to_csv() const;
};

/// Runs the reduced model from (S0, u0 + v0) and the full model for every
/// epsilon from `init`, sampling both on a uniform grid of
/// config.output_points points on [0, T]. Requires 0 < t0 < T, epsilons
/// positive and strictly decreasing, init.u > 0. An integration failure at
/// some epsilon produces a failed row instead of aborting.
ConvergenceTable tikhonov_convergence(const FullModel& model, const FullState& init, double T,
                                      double t0, std::span<const double> epsilons,
                                      const numerics::IntegratorConfig& config = {},
                                      unsigned threads = 1);

/// n-species analogue; errors are maxima over species.
ConvergenceTable tikhonov_convergence_multi(const MultiSpeciesModel& model,
                                            const MultiState& init, double T, double t0,
                                            std::span<const double> epsilons,
                                            const numerics::IntegratorConfig& config = {},
                                            unsigned threads = 1);

} // namespace flocsim
