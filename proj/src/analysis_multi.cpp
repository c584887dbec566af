#include "flocsim/analysis_multi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "flocsim/format.hpp"

namespace flocsim::multi {

namespace {

constexpr double kDoublingCap = 1e15;
constexpr int kBisectionCap = 200;

std::vector<ReducedModel> split(const MultiReducedModel& model) {
    if (!model.diagonal())
        throw PreconditionError(
            "equilibrium analysis needs a diagonal attachment matrix (a_ij = 0 for i != j)");
    std::vector<ReducedModel> out;
    for (std::size_t i = 0; i < model.species(); ++i) out.push_back(model.species_model(i));
    return out;
}

} // namespace

DiagonalMultiModel::DiagonalMultiModel(const MultiReducedModel& model) : species_(split(model)) {
    init();
}

DiagonalMultiModel::DiagonalMultiModel(std::vector<ReducedModel> species)
    : species_(std::move(species)) {
    init();
}

void DiagonalMultiModel::init() {
    if (species_.empty()) throw ConfigError("multi-species model needs at least one species");
    D_ = species_.front().D();
    S_in_ = species_.front().S_in();
    double l0 = 0.0;
    double l1 = std::numeric_limits<double>::infinity();
    for (const auto& sp : species_) {
        if (sp.D() != D_ || sp.S_in() != S_in_)
            throw ConfigError("all species must share D and S_in");
        if (sp.fraction_depends_on_substrate())
            throw PreconditionError("multi-species analysis needs p_i = p_i(x_i)");
        break_even_.push_back(single::break_even(sp));
        l0 = std::max(l0, break_even_.back().lambda0.as_double());
        l1 = std::min(l1, break_even_.back().lambda1.as_double());
    }
    lambda0_max_ = std::isinf(l0) ? single::Threshold::infinite() : single::Threshold::finite(l0);
    lambda1_min_ = std::isinf(l1) ? single::Threshold::infinite() : single::Threshold::finite(l1);
}

double X(const DiagonalMultiModel& model, std::size_t i, double s) {
    const auto& be = model.break_even(i);
    if (!(s >= 0.0)) throw DomainError("X_i: S must be nonnegative");
    if (be.lambda1.is_finite() && s >= be.lambda1.value())
        throw DomainError("X_i: S must lie below lambda1 of species " + std::to_string(i + 1));
    if (be.lambda0.is_infinite() || s <= be.lambda0.value()) return 0.0;

    const ReducedModel& sp = model.species_model(i);
    auto excess = [&](double x) { return sp.growth(s, x) - sp.removal(x); };
    double hi = 1.0;
    while (excess(hi) > 0.0) {
        hi *= 2.0;
        if (hi > kDoublingCap) throw NumericError("X_i: no balance point below 1e15");
    }
    if (excess(hi) == 0.0) return hi;
    return numerics::find_root(excess, 0.0, hi, 1e-15 * hi).x;
}

double h(const DiagonalMultiModel& model, std::size_t i, double s) {
    const double x = X(model, i, s);
    return x == 0.0 ? 0.0 : model.species_model(i).growth(s, x) * x;
}

double H(const DiagonalMultiModel& model, double s) {
    double total = 0.0;
    for (std::size_t i = 0; i < model.species(); ++i) total += h(model, i, s);
    return total - model.D() * (model.S_in() - s);
}

std::vector<std::string> MultiHypothesisReport::violations() const {
    static constexpr const char* names[] = {"H5", "H6", "H7", "H8"};
    std::vector<std::string> out;
    for (std::size_t i = 0; i < species.size(); ++i) {
        for (std::size_t k = 0; k < 4; ++k) {
            const auto& r = species[i][k];
            if (r.status != single::HypothesisStatus::Violated) continue;
            std::ostringstream line;
            line << names[k] << " (species " << i + 1 << ")";
            if (r.witness)
                line << ": " << r.witness->inequality << " fails at S=" << format_double(r.witness->S)
                     << ", x=" << format_double(r.witness->x);
            out.push_back(line.str());
        }
        if (!ordered[i])
            out.push_back("H8 (species " + std::to_string(i + 1) + "): lambda0 >= lambda1");
    }
    if (!h9) out.push_back("H9: max lambda0 >= min(min lambda1, S_in)");
    return out;
}

MultiHypothesisReport check_multi_hypotheses(const DiagonalMultiModel& model) {
    MultiHypothesisReport report;
    for (std::size_t i = 0; i < model.species(); ++i) {
        report.species.push_back(single::check_hypotheses(model.species_model(i)));
        const auto& be = model.break_even(i);
        report.ordered.push_back(be.lambda0 < be.lambda1);
    }
    const double l0 = model.lambda0_max().as_double();
    report.h9 = l0 < std::min(model.lambda1_min().as_double(), model.S_in());
    return report;
}

Eigen::MatrixXd arrowhead_matrix(const std::vector<double>& a, const std::vector<double>& b,
                                 const std::vector<double>& c, double D) {
    const std::size_t n = a.size();
    if (b.size() != n || c.size() != n) throw ConfigError("arrowhead: dimension mismatch");
    const auto dim = static_cast<Eigen::Index>(n + 1);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    double sum_a = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<Eigen::Index>(i + 1);
        m(0, k) = c[i];
        m(k, 0) = a[i];
        m(k, k) = -b[i];
        sum_a += a[i];
    }
    m(0, 0) = -D - sum_a;
    return m;
}

bool arrowhead_stability(const std::vector<double>& a, const std::vector<double>& b,
                         const std::vector<double>& c, double D) {
    const auto ev = numerics::eigenvalues(arrowhead_matrix(a, b, c, D));
    return numerics::max_real_part(ev) < 0.0;
}

std::optional<MultiEquilibrium> solve_positive_equilibrium(const DiagonalMultiModel& model,
                                                           bool assume_hypotheses) {
    if (!assume_hypotheses) {
        const auto report = check_multi_hypotheses(model);
        const auto bad = report.violations();
        if (!bad.empty()) {
            std::string msg = "hypotheses violated:";
            for (const auto& line : bad) msg += "\n  " + line;
            throw PreconditionError(msg);
        }
    }
    if (model.lambda0_max().is_infinite())
        throw PreconditionError("max lambda0 is infinite");
    const double l0 = model.lambda0_max().value();
    const double l1 = model.lambda1_min().as_double();

    MultiEquilibrium eq;
    eq.criterion = H(model, l0);
    if (!(eq.criterion < 0.0)) return std::nullopt;

    double lo = l0, hi = 0.0;
    if (model.S_in() < l1) {
        hi = model.S_in();
    } else {
        // H grows without bound as S approaches min lambda1.
        double gap = l1 - l0;
        for (int k = 0; k < 60; ++k) {
            gap *= 0.5;
            const double s = l1 - gap;
            if (H(model, s) > 0.0) {
                hi = s;
                break;
            }
            lo = s;
        }
        if (hi == 0.0) throw NumericError("H stays negative up to min lambda1");
    }

    const double tol = 1e-12 * (std::isinf(l1) ? hi : l1);
    for (int it = 0; it < kBisectionCap && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double value = H(model, mid);
        if (value == 0.0) {
            lo = hi = mid;
            break;
        }
        (value < 0.0 ? lo : hi) = mid;
    }
    const double candidates[] = {lo, 0.5 * (lo + hi), hi};
    eq.S_star = *std::min_element(std::begin(candidates), std::end(candidates),
                                  [&](double p, double q) {
                                      return std::abs(H(model, p)) < std::abs(H(model, q));
                                  });

    const std::size_t n = model.species();
    std::vector<double> a(n), b(n), c(n);
    double consumption = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const ReducedModel& sp = model.species_model(i);
        const double x = X(model, i, eq.S_star);
        eq.x_star.push_back(x);
        const double mu = sp.growth(eq.S_star, x);
        const double mu_s = sp.growth_ds(eq.S_star, x);
        const double mu_x = sp.growth_dx(eq.S_star, x);
        const double d = sp.removal(x);
        const double d_x = sp.removal_dx(x);
        a[i] = mu_s * x;
        b[i] = -mu_x * x + x * d_x;
        c[i] = -mu_x * x - d;
        consumption += mu * x;
        eq.growth_residual = std::max(eq.growth_residual, std::abs(mu - d));
    }
    eq.mass_residual = std::abs(model.D() * (model.S_in() - eq.S_star) - consumption);
    if (eq.mass_residual > single::kEquilibriumResidual ||
        eq.growth_residual > single::kEquilibriumResidual)
        throw NumericError("positive equilibrium misses the residual bound");

    eq.jacobian = arrowhead_matrix(a, b, c, model.D());
    eq.eigenvalues = numerics::eigenvalues(eq.jacobian);
    eq.stable = numerics::max_real_part(eq.eigenvalues) < 0.0;
    if (!eq.stable) throw NumericError("positive equilibrium is not locally stable");
    return eq;
}

std::string HCurves::to_csv() const {
    std::ostringstream out;
    out << 'S';
    for (std::size_t i = 0; i < h.size(); ++i) out << ",h_" << i + 1;
    out << ",H\n";
    for (std::size_t k = 0; k < S.size(); ++k) {
        out << format_double(S[k]);
        for (const auto& hi : h) out << ',' << format_double(hi[k]);
        out << ',' << format_double(H[k]) << '\n';
    }
    return out.str();
}

HCurves h_curves(const DiagonalMultiModel& model, std::size_t points) {
    if (points < 2) throw ConfigError("h_curves needs at least two points");
    const double s_end = model.lambda1_min().is_finite() ? model.lambda1_min().value()
                                                         : 1.5 * model.S_in();
    HCurves curves;
    curves.h.assign(model.species(), {});
    for (std::size_t k = 0; k < points; ++k) {
        const double s = s_end * static_cast<double>(k) / static_cast<double>(points);
        curves.S.push_back(s);
        double total = 0.0;
        for (std::size_t i = 0; i < model.species(); ++i) {
            const double value = h(model, i, s);
            curves.h[i].push_back(value);
            total += value;
        }
        curves.H.push_back(total - model.D() * (model.S_in() - s));
    }
    return curves;
}

} // namespace flocsim::multi
