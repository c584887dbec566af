#pragma once

// Growth laws, attachment/detachment kinetics and the right-hand sides of
// the full chemostat-with-flocculation systems (one species and n species).

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "flocsim/errors.hpp"

namespace flocsim {

/// Per-capita growth rate of the substrate concentration: Monod or zero.
class GrowthLaw {
public:
    enum class Kind { Monod, Zero };

    static GrowthLaw monod(double mu_max, double half_saturation);
    static GrowthLaw zero() { return GrowthLaw(Kind::Zero, 0.0, 1.0); }

    Kind kind() const noexcept { return kind_; }
    double mu_max() const noexcept { return mu_max_; }
    double half_saturation() const noexcept { return k_; }

    double value(double s) const noexcept {
        return kind_ == Kind::Zero ? 0.0 : mu_max_ * s / (k_ + s);
    }
    double derivative(double s) const noexcept {
        if (kind_ == Kind::Zero) return 0.0;
        const double den = k_ + s;
        return mu_max_ * k_ / (den * den);
    }
    /// sup over S >= 0 (not attained for Monod).
    double supremum() const noexcept { return kind_ == Kind::Zero ? 0.0 : mu_max_; }

    /// S >= 0 with value(S) = level, or nullopt when level is not attained.
    std::optional<double> inverse(double level) const noexcept;

    friend bool operator==(const GrowthLaw&, const GrowthLaw&) = default;

private:
    GrowthLaw(Kind kind, double mu_max, double k) : kind_(kind), mu_max_(mu_max), k_(k) {}

    Kind kind_;
    double mu_max_;
    double k_;
};

/// A nonnegative, nondecreasing rate of S: offset + law(S).
struct SubstrateRate {
    double offset = 0.0;
    GrowthLaw law = GrowthLaw::zero();

    double value(double s) const noexcept { return offset + law.value(s); }
    double derivative(double s) const noexcept { return law.derivative(s); }
};

/// Decreasing map G on [0,1] with G(0) = 1, used by the Freter kinetics.
struct DecreasingMap {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    std::string name;

    /// G(W) = 1 - W.
    static DecreasingMap linear();
};

namespace kinetics {

/// alpha = a, beta = b.
struct Constant {
    double a;
    double b;
};

/// alpha = alpha(S), beta = beta(S).
struct SubstrateDependent {
    SubstrateRate alpha;
    SubstrateRate beta;
};

/// alpha = a u, beta = b (flocks of two bacteria).
struct MassAction {
    double a;
    double b;
};

/// alpha = a (u + v), beta = b.
struct TotalDensity {
    double a;
    double b;
};

/// alpha = a (1 - W), beta = b + g(S) (1 - G(W)), W = v / v_max.
struct Freter {
    double a;
    double b;
    double v_max;
    DecreasingMap G = DecreasingMap::linear();
};

} // namespace kinetics

using AttachmentKinetics = std::variant<kinetics::Constant, kinetics::SubstrateDependent,
                                        kinetics::MassAction, kinetics::TotalDensity,
                                        kinetics::Freter>;

/// Snake-case tag of the active variant ("constant", "total_density", ...).
std::string kinetics_name(const AttachmentKinetics& k);

/// Throws ConfigError unless every rate constant is admissible.
void validate(const AttachmentKinetics& k);

/// Attachment rate alpha and detachment rate beta at one state.
struct ExchangeRates {
    double alpha;
    double beta;
};

/// Evaluates alpha and beta. `g_at_s` is the aggregated growth rate g(S)
/// (only the Freter detachment uses it). Throws DomainError when the
/// Freter fill ratio v/v_max exceeds 1.
ExchangeRates exchange_rates(const AttachmentKinetics& k, double s, double u, double v,
                             double g_at_s);

struct FullState {
    double S = 0.0;
    double u = 0.0;
    double v = 0.0;
};

/// Parameters of the full single-species model with timescale separation
/// epsilon (epsilon = 1 means no separation).
struct FullModel {
    double D = 1.0;
    double S_in = 1.0;
    double D0 = 1.0;
    double D1 = 1.0;
    GrowthLaw f = GrowthLaw::zero();
    GrowthLaw g = GrowthLaw::zero();
    AttachmentKinetics kinetics = kinetics::Constant{1.0, 1.0};
    double epsilon = 1.0;

    void validate() const;

    /// D1 < D0 <= D, the regime of the single-species analysis.
    bool in_reference_regime() const noexcept { return D1 < D0 && D0 <= D; }
};

/// Negative components no smaller than -kNonnegativeSlack are clamped to
/// zero before evaluating the model; anything below is a DomainError.
inline constexpr double kNonnegativeSlack = 1e-10;

/// Time derivative of the full model.
FullState rhs_full(const FullModel& model, const FullState& state);

/// n-species model with attachment alpha_i = sum_j a_ij (u_j + v_j) and
/// detachment beta_i = b_i, both scaled by 1/epsilon.
struct MultiSpeciesModel {
    double D = 1.0;
    double S_in = 1.0;
    std::vector<GrowthLaw> f;
    std::vector<GrowthLaw> g;
    std::vector<double> D0;
    std::vector<double> D1;
    Eigen::MatrixXd A;
    std::vector<double> b;
    double epsilon = 1.0;

    std::size_t species() const noexcept { return f.size(); }
    bool diagonal() const noexcept;
    void validate() const;
};

/// State layout for the multi-species model: (S, u_1..u_n, v_1..v_n).
struct MultiState {
    double S = 0.0;
    std::vector<double> u;
    std::vector<double> v;

    std::vector<double> pack() const;
    static MultiState unpack(std::span<const double> y, std::size_t n);
};

MultiState rhs_multi(const MultiSpeciesModel& model, const MultiState& state);

/// Vector-form wrappers for the integrator.
void rhs_full_vec(const FullModel& model, std::span<const double> y, std::span<double> dy);
void rhs_multi_vec(const MultiSpeciesModel& model, std::span<const double> y,
                   std::span<double> dy);

} // namespace flocsim
