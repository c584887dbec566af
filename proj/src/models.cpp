#include "flocsim/models.hpp"

#include <cmath>
#include <string>

namespace flocsim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw ConfigError(std::string(what) + " must be a finite positive number");
}

double clamp_nonnegative(double value, const char* what) {
    if (value >= 0.0) return value;
    if (value >= -kNonnegativeSlack) return 0.0;
    if (std::isnan(value)) throw DomainError(std::string(what) + " is NaN");
    throw DomainError(std::string(what) + " is negative: " + std::to_string(value));
}

} // namespace

GrowthLaw GrowthLaw::monod(double mu_max, double half_saturation) {
    require_positive(mu_max, "Monod mu_max");
    require_positive(half_saturation, "Monod K");
    return GrowthLaw(Kind::Monod, mu_max, half_saturation);
}

std::optional<double> GrowthLaw::inverse(double level) const noexcept {
    if (level == 0.0) return 0.0;
    if (kind_ == Kind::Zero || level < 0.0 || level >= mu_max_) return std::nullopt;
    return k_ * level / (mu_max_ - level);
}

DecreasingMap DecreasingMap::linear() {
    return {[](double w) { return 1.0 - w; }, [](double) { return -1.0; }, "linear"};
}

std::string kinetics_name(const AttachmentKinetics& k) {
    return std::visit(Overloaded{
                          [](const kinetics::Constant&) { return std::string("constant"); },
                          [](const kinetics::SubstrateDependent&) {
                              return std::string("substrate_dependent");
                          },
                          [](const kinetics::MassAction&) { return std::string("mass_action"); },
                          [](const kinetics::TotalDensity&) {
                              return std::string("total_density");
                          },
                          [](const kinetics::Freter&) { return std::string("freter"); },
                      },
                      k);
}

void validate(const AttachmentKinetics& k) {
    std::visit(Overloaded{
                   [](const kinetics::Constant& c) {
                       require_positive(c.a, "attachment rate a");
                       require_positive(c.b, "detachment rate b");
                   },
                   [](const kinetics::SubstrateDependent& c) {
                       if (!(c.alpha.offset >= 0.0))
                           throw ConfigError("attachment offset must be nonnegative");
                       require_positive(c.beta.offset, "detachment offset");
                       if (c.alpha.offset == 0.0 && c.alpha.law.kind() == GrowthLaw::Kind::Zero)
                           throw ConfigError("attachment rate alpha(S) is identically zero");
                   },
                   [](const kinetics::MassAction& c) {
                       require_positive(c.a, "attachment rate a");
                       require_positive(c.b, "detachment rate b");
                   },
                   [](const kinetics::TotalDensity& c) {
                       require_positive(c.a, "attachment rate a");
                       require_positive(c.b, "detachment rate b");
                   },
                   [](const kinetics::Freter& c) {
                       require_positive(c.a, "attachment rate a");
                       require_positive(c.b, "detachment rate b");
                       require_positive(c.v_max, "v_max");
                       if (!c.G.value || !c.G.derivative)
                           throw ConfigError("Freter G must provide value and derivative");
                       if (std::abs(c.G.value(0.0) - 1.0) > 1e-12)
                           throw ConfigError("Freter G must satisfy G(0) = 1");
                   },
               },
               k);
}

ExchangeRates exchange_rates(const AttachmentKinetics& k, double s, double u, double v,
                             double g_at_s) {
    return std::visit(
        Overloaded{
            [](const kinetics::Constant& c) { return ExchangeRates{c.a, c.b}; },
            [s](const kinetics::SubstrateDependent& c) {
                return ExchangeRates{c.alpha.value(s), c.beta.value(s)};
            },
            [u](const kinetics::MassAction& c) { return ExchangeRates{c.a * u, c.b}; },
            [u, v](const kinetics::TotalDensity& c) {
                return ExchangeRates{c.a * (u + v), c.b};
            },
            [v, g_at_s](const kinetics::Freter& c) {
                if (v > c.v_max)
                    throw DomainError("Freter kinetics: v exceeds v_max (W > 1)");
                const double w = v / c.v_max;
                return ExchangeRates{c.a * (1.0 - w), c.b + g_at_s * (1.0 - c.G.value(w))};
            },
        },
        k);
}

void FullModel::validate() const {
    require_positive(D, "D");
    require_positive(S_in, "S_in");
    require_positive(D0, "D0");
    require_positive(D1, "D1");
    require_positive(epsilon, "epsilon");
    flocsim::validate(kinetics);
}

FullState rhs_full(const FullModel& model, const FullState& state) {
    if (!(model.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    const double s = clamp_nonnegative(state.S, "S");
    const double u = clamp_nonnegative(state.u, "u");
    const double v = clamp_nonnegative(state.v, "v");

    const double fs = model.f.value(s);
    const double gs = model.g.value(s);
    const auto [alpha, beta] = exchange_rates(model.kinetics, s, u, v, gs);
    const double attach = alpha / model.epsilon * u;
    const double detach = beta / model.epsilon * v;

    FullState d;
    d.S = model.D * (model.S_in - s) - (fs * u + gs * v);
    d.u = (fs - model.D0) * u - attach + detach;
    d.v = (gs - model.D1) * v + attach - detach;
    return d;
}

void rhs_full_vec(const FullModel& model, std::span<const double> y, std::span<double> dy) {
    const FullState d = rhs_full(model, {y[0], y[1], y[2]});
    dy[0] = d.S;
    dy[1] = d.u;
    dy[2] = d.v;
}

bool MultiSpeciesModel::diagonal() const noexcept {
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            if (i != j && A(i, j) != 0.0) return false;
    return true;
}

void MultiSpeciesModel::validate() const {
    require_positive(D, "D");
    require_positive(S_in, "S_in");
    require_positive(epsilon, "epsilon");
    const std::size_t n = f.size();
    if (n == 0) throw ConfigError("multi-species model needs at least one species");
    if (g.size() != n || D0.size() != n || D1.size() != n || b.size() != n ||
        static_cast<std::size_t>(A.rows()) != n || static_cast<std::size_t>(A.cols()) != n)
        throw ConfigError("multi-species model: dimension mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        require_positive(D0[i], "D0_i");
        require_positive(D1[i], "D1_i");
        require_positive(b[i], "b_i");
        bool any_positive = false;
        for (std::size_t j = 0; j < n; ++j) {
            const double a = A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (!(a >= 0.0) || !std::isfinite(a))
                throw ConfigError("attachment matrix entries must be finite and nonnegative");
            any_positive = any_positive || a > 0.0;
        }
        if (!any_positive)
            throw ConfigError("every row of the attachment matrix needs a positive entry");
    }
}

std::vector<double> MultiState::pack() const {
    std::vector<double> y;
    y.reserve(1 + u.size() + v.size());
    y.push_back(S);
    y.insert(y.end(), u.begin(), u.end());
    y.insert(y.end(), v.begin(), v.end());
    return y;
}

MultiState MultiState::unpack(std::span<const double> y, std::size_t n) {
    if (y.size() != 1 + 2 * n) throw ConfigError("multi-species state: dimension mismatch");
    MultiState s;
    s.S = y[0];
    s.u.assign(y.begin() + 1, y.begin() + 1 + static_cast<std::ptrdiff_t>(n));
    s.v.assign(y.begin() + 1 + static_cast<std::ptrdiff_t>(n), y.end());
    return s;
}

MultiState rhs_multi(const MultiSpeciesModel& model, const MultiState& state) {
    if (!(model.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    const std::size_t n = model.species();
    if (state.u.size() != n || state.v.size() != n || model.g.size() != n ||
        model.D0.size() != n || model.D1.size() != n || model.b.size() != n ||
        static_cast<std::size_t>(model.A.rows()) != n ||
        static_cast<std::size_t>(model.A.cols()) != n)
        throw ConfigError("multi-species model: dimension mismatch");

    const double s = clamp_nonnegative(state.S, "S");
    std::vector<double> u(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = clamp_nonnegative(state.u[i], "u_i");
        v[i] = clamp_nonnegative(state.v[i], "v_i");
    }

    MultiState d;
    d.u.resize(n);
    d.v.resize(n);
    double consumption = 0.0;
    // Same operation order as rhs_full, so n = 1 reproduces it bit for bit.
    for (std::size_t i = 0; i < n; ++i) {
        const double fs = model.f[i].value(s);
        const double gs = model.g[i].value(s);
        double alpha = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            alpha += model.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                     (u[j] + v[j]);
        const double attach = alpha / model.epsilon * u[i];
        const double detach = model.b[i] / model.epsilon * v[i];
        d.u[i] = (fs - model.D0[i]) * u[i] - attach + detach;
        d.v[i] = (gs - model.D1[i]) * v[i] + attach - detach;
        consumption += fs * u[i] + gs * v[i];
    }
    d.S = model.D * (model.S_in - s) - consumption;
    return d;
}

void rhs_multi_vec(const MultiSpeciesModel& model, std::span<const double> y,
                   std::span<double> dy) {
    const std::size_t n = model.species();
    const MultiState d = rhs_multi(model, MultiState::unpack(y, n));
    dy[0] = d.S;
    for (std::size_t i = 0; i < n; ++i) {
        dy[1 + i] = d.u[i];
        dy[1 + n + i] = d.v[i];
    }
}

} // namespace flocsim
