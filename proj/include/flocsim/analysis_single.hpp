#pragma once

// Equilibria and local stability of the reduced single-species model
//   S' = D (S_in - S) - mu(S, x) x,   x' = (mu(S, x) - d(x)) x
// through the nullclines S = phi(x) (mu = d) and S = gamma(x).

#include <array>
#include <complex>
#include <compare>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flocsim/numerics.hpp"
#include "flocsim/reduction.hpp"

namespace flocsim::single {

/// A break-even concentration; +infinity is a distinct state, not a
/// large float.
class Threshold {
public:
    static Threshold finite(double value) { return Threshold(false, value); }
    static Threshold infinite() { return Threshold(true, 0.0); }

    bool is_infinite() const noexcept { return infinite_; }
    bool is_finite() const noexcept { return !infinite_; }
    /// Throws DomainError when infinite.
    double value() const;
    /// The value, or +inf as a double for comparisons and output.
    double as_double() const noexcept;

    friend std::partial_ordering operator<=>(const Threshold& a, const Threshold& b) noexcept {
        return a.as_double() <=> b.as_double();
    }
    friend bool operator==(const Threshold& a, const Threshold& b) noexcept {
        return a.as_double() == b.as_double();
    }

private:
    Threshold(bool infinite, double value) : infinite_(infinite), value_(value) {}

    bool infinite_;
    double value_;
};

/// lambda0 solves mu(S, 0) = d(0) and lambda1 solves mu(S, +inf) = d(+inf).
struct BreakEven {
    Threshold lambda0 = Threshold::infinite();
    Threshold lambda1 = Threshold::infinite();
};

BreakEven break_even(const ReducedModel& model);

/// Which branch of the existence theory applies.
enum class Regime {
    UniquePositive,      // lambda0 < min(lambda1, S_in): exactly one
    NoPositive,          // S_in < lambda0 < lambda1: none
    OddPositive,         // lambda1 < lambda0 < S_in: odd count
    EvenOrNonePositive,  // lambda1 < S_in < lambda0: zero or even
    Boundary,            // a tie between thresholds or lambda0 = +inf
};

Regime regime(const BreakEven& be, double s_in);
std::string to_string(Regime r);

/// S >= 0 with mu(S, x) = d(x), or nullopt when mu(., x) stays below d(x).
std::optional<double> phi(const ReducedModel& model, double x);

/// phi'(x) = (d'(x) - dmu/dx) / (dmu/dS) evaluated at (phi(x), x).
double phi_slope(const ReducedModel& model, double s, double x);

/// gamma(x) = S_in - x d(x) / D; may be negative.
double gamma(const ReducedModel& model, double x);
double gamma_slope(const ReducedModel& model, double x);

/// Positive equilibria satisfy x <= x_upper_bound = D S_in / D1 + 1.
double x_upper_bound(const ReducedModel& model);

enum class EquilibriumKind { Washout, Positive };

enum class Stability { StableNode, StableFocus, Saddle, UnstableNode, UnstableFocus, NonHyperbolic };

std::string to_string(EquilibriumKind k);
std::string to_string(Stability s);

/// |Re lambda| at or below this makes an equilibrium NonHyperbolic.
inline constexpr double kHyperbolicityThreshold = 1e-8;
/// Residual bound for a point to be accepted as a positive equilibrium.
inline constexpr double kEquilibriumResidual = 1e-9;

struct Equilibrium {
    EquilibriumKind kind = EquilibriumKind::Washout;
    double S = 0.0;
    double x = 0.0;
    Eigen::Matrix2d jacobian = Eigen::Matrix2d::Zero();
    std::array<numerics::Complex, 2> eigenvalues{};
    Stability classification = Stability::NonHyperbolic;
    /// Two scan roots merged into this one (tangential intersection).
    bool degenerate = false;
    /// phi'(x) - gamma'(x), positive equilibria only.
    std::optional<double> nullcline_slope_gap;

    bool stable() const noexcept {
        return classification == Stability::StableNode ||
               classification == Stability::StableFocus;
    }
};

struct ScanOptions {
    std::size_t points = 4096;
    /// Bisection stops at |dx| <= bisection_tol * x_max.
    double bisection_tol = 1e-12;
    /// Roots closer than merge_radius * x_max are merged.
    double merge_radius = 1e-8;
};

struct EquilibriumReport {
    BreakEven break_even;
    Regime regime = Regime::Boundary;
    double x_max = 0.0;
    /// Washout first, then positive equilibria by increasing x.
    std::vector<Equilibrium> equilibria;

    std::size_t positive_count() const;
    bool any_degenerate() const;
};

/// Washout plus every sign change of phi - gamma on (0, x_max].
/// Requires a model whose planktonic fraction does not depend on S.
EquilibriumReport find_equilibria(const ReducedModel& model, const ScanOptions& options = {});

/// Builds the Jacobian at (S, x), computes eigenvalues and classifies.
/// x == 0 is the washout (S must equal S_in). Throws PreconditionError
/// when (S, x) is not an equilibrium within kEquilibriumResidual.
Equilibrium classify(const ReducedModel& model, double s, double x);

Stability classify_eigenvalues(const std::array<numerics::Complex, 2>& eigenvalues);

enum class HypothesisStatus { VerifiedAnalytic, VerifiedOnGrid, Violated, NotApplicable };
std::string to_string(HypothesisStatus s);

struct Witness {
    double S = 0.0;
    double x = 0.0;
    /// Signed slack of the violated strict inequality (<= 0).
    double residual = 0.0;
    std::string inequality;
};

struct HypothesisResult {
    HypothesisStatus status = HypothesisStatus::NotApplicable;
    std::optional<Witness> witness;
    /// Smallest slack seen over the grid (analytic checks report the
    /// structural margin they tested).
    double worst_margin = 0.0;
};

/// Results for H0..H4, in that order.
struct HypothesisReport {
    std::array<HypothesisResult, 5> results;

    const HypothesisResult& operator[](std::size_t i) const { return results.at(i); }
    bool holds() const;
};

HypothesisReport check_hypotheses(const ReducedModel& model);

using Point = std::array<double, 2>;  // (S, x)

struct Separatrix {
    /// Both branches start at the saddle and follow the stable manifold
    /// backwards in time until they leave [0, S_in + 1] x [0, x_max].
    std::array<std::vector<Point>, 2> branches;
    /// Stable and unstable eigenvectors of the saddle (unit length).
    Point stable_direction{};
    Point unstable_direction{};
};

/// Stable manifold of a positive saddle. Throws PreconditionError for
/// non-saddle input.
Separatrix separatrix(const ReducedModel& model, const Equilibrium& saddle, double span = 200.0,
                      const numerics::IntegratorConfig& config = {});

/// Forward trajectory of the reduced model.
numerics::Trajectory simulate(const ReducedModel& model, double s0, double x0, double T,
                              const numerics::IntegratorConfig& config = {});

} // namespace flocsim::single
