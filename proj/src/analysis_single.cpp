#include "flocsim/analysis_single.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace flocsim::single {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Proxy for x -> +infinity, as a multiple of x_max.
constexpr double kInfinityProxy = 1e6;
constexpr double kDoublingCap = 1e15;

void require_density_only(const ReducedModel& model, const char* op) {
    if (model.fraction_depends_on_substrate())
        throw PreconditionError(std::string(op) +
                                ": the planktonic fraction depends on S; single-species "
                                "analysis needs d = d(x)");
}

// Smallest root of an increasing `excess` with excess(0) < 0, found by
// doubling the upper bracket. Infinite when the supremum is known to be
// <= 0 or the bracket grows past kDoublingCap.
Threshold increasing_root(const std::function<double(double)>& excess,
                          std::optional<double> supremum) {
    if (supremum && *supremum <= 0.0) return Threshold::infinite();
    if (excess(0.0) >= 0.0) return Threshold::finite(0.0);
    double hi = 1.0;
    while (excess(hi) <= 0.0) {
        if (excess(hi) == 0.0) return Threshold::finite(hi);
        hi *= 2.0;
        if (hi > kDoublingCap) return Threshold::infinite();
    }
    return Threshold::finite(numerics::find_root(excess, 0.0, hi, 1e-15 * hi).x);
}

} // namespace

double Threshold::value() const {
    if (infinite_) throw DomainError("threshold is +infinity");
    return value_;
}

double Threshold::as_double() const noexcept { return infinite_ ? kInf : value_; }

double x_upper_bound(const ReducedModel& model) {
    const auto& m = model.source();
    return m.D * m.S_in / m.D1 + 1.0;
}

BreakEven break_even(const ReducedModel& model) {
    const auto& m = model.source();
    BreakEven be;
    if (model.density_dependent_fraction()) {
        be.lambda0 = increasing_root([&](double s) { return m.f.value(s) - m.D0; },
                                     m.f.supremum() - m.D0);
        be.lambda1 = increasing_root([&](double s) { return m.g.value(s) - m.D1; },
                                     m.g.supremum() - m.D1);
        return be;
    }
    const double x_inf = kInfinityProxy * x_upper_bound(model);
    auto limit = [&](double x) {
        std::optional<double> sup;
        if (!model.fraction_depends_on_substrate()) {
            const double p = model.fraction(0.0, x).p;
            sup = p * m.f.supremum() + (1.0 - p) * m.g.supremum() - model.removal(0.0, x);
        }
        return increasing_root(
            [&model, x](double s) { return model.growth(s, x) - model.removal(s, x); }, sup);
    };
    be.lambda0 = limit(0.0);
    be.lambda1 = limit(x_inf);
    return be;
}

Regime regime(const BreakEven& be, double s_in) {
    const double l0 = be.lambda0.as_double();
    const double l1 = be.lambda1.as_double();
    if (be.lambda0.is_infinite()) return Regime::Boundary;
    if (l0 < l1 && l0 < s_in) return Regime::UniquePositive;
    if (s_in < l0 && l0 < l1) return Regime::NoPositive;
    if (l1 < l0 && l0 < s_in) return Regime::OddPositive;
    if (l1 < s_in && s_in < l0) return Regime::EvenOrNonePositive;
    return Regime::Boundary;
}

std::string to_string(Regime r) {
    switch (r) {
    case Regime::UniquePositive: return "unique_positive";
    case Regime::NoPositive: return "no_positive";
    case Regime::OddPositive: return "odd_positive";
    case Regime::EvenOrNonePositive: return "even_or_none_positive";
    case Regime::Boundary: return "boundary";
    }
    return "unknown";
}

std::optional<double> phi(const ReducedModel& model, double x) {
    require_density_only(model, "phi");
    if (!(x >= 0.0)) throw DomainError("phi: x must be nonnegative");
    const auto& m = model.source();
    const double p = model.fraction(0.0, x).p;
    const double d = model.removal(x);
    const double sup = p * m.f.supremum() + (1.0 - p) * m.g.supremum();
    if (sup <= d) return std::nullopt;
    auto excess = [&](double s) { return p * m.f.value(s) + (1.0 - p) * m.g.value(s) - d; };
    const Threshold t = increasing_root(excess, sup - d);
    if (t.is_infinite()) return std::nullopt;
    return t.value();
}

double phi_slope(const ReducedModel& model, double s, double x) {
    return (model.removal_dx(s, x) - model.growth_dx(s, x)) / model.growth_ds(s, x);
}

double gamma(const ReducedModel& model, double x) {
    require_density_only(model, "gamma");
    return model.S_in() - x * model.removal(x) / model.D();
}

double gamma_slope(const ReducedModel& model, double x) {
    return -(model.removal(x) + x * model.removal_dx(x)) / model.D();
}

std::string to_string(EquilibriumKind k) {
    return k == EquilibriumKind::Washout ? "washout" : "positive";
}

std::string to_string(Stability s) {
    switch (s) {
    case Stability::StableNode: return "stable_node";
    case Stability::StableFocus: return "stable_focus";
    case Stability::Saddle: return "saddle";
    case Stability::UnstableNode: return "unstable_node";
    case Stability::UnstableFocus: return "unstable_focus";
    case Stability::NonHyperbolic: return "non_hyperbolic";
    }
    return "unknown";
}

std::string to_string(HypothesisStatus s) {
    switch (s) {
    case HypothesisStatus::VerifiedAnalytic: return "verified_analytic";
    case HypothesisStatus::VerifiedOnGrid: return "verified_on_grid";
    case HypothesisStatus::Violated: return "violated";
    case HypothesisStatus::NotApplicable: return "not_applicable";
    }
    return "unknown";
}

Stability classify_eigenvalues(const std::array<numerics::Complex, 2>& ev) {
    for (const auto& l : ev)
        if (std::abs(l.real()) <= kHyperbolicityThreshold) return Stability::NonHyperbolic;
    if (ev[0].imag() != 0.0 || ev[1].imag() != 0.0)
        return ev[0].real() < 0.0 ? Stability::StableFocus : Stability::UnstableFocus;
    const bool neg0 = ev[0].real() < 0.0, neg1 = ev[1].real() < 0.0;
    if (neg0 && neg1) return Stability::StableNode;
    if (!neg0 && !neg1) return Stability::UnstableNode;
    return Stability::Saddle;
}

Equilibrium classify(const ReducedModel& model, double s, double x) {
    require_density_only(model, "classify");
    if (!(x >= 0.0) || !(s >= 0.0)) throw PreconditionError("classify: negative coordinates");
    const auto& m = model.source();
    Equilibrium eq;
    eq.S = s;
    eq.x = x;
    if (x == 0.0) {
        if (std::abs(s - m.S_in) > kEquilibriumResidual)
            throw PreconditionError("classify: washout must sit at S = S_in");
        eq.kind = EquilibriumKind::Washout;
    } else {
        const double r_growth = model.growth(s, x) - model.removal(x);
        const double r_mass = m.D * (m.S_in - s) - x * model.removal(x);
        if (std::abs(r_growth) > kEquilibriumResidual || std::abs(r_mass) > kEquilibriumResidual)
            throw PreconditionError("classify: (S, x) is not an equilibrium (residuals " +
                                    std::to_string(r_growth) + ", " + std::to_string(r_mass) +
                                    ")");
        eq.kind = EquilibriumKind::Positive;
    }

    const double mu = model.growth(s, x);
    const double mu_s = model.growth_ds(s, x);
    const double mu_x = model.growth_dx(s, x);
    const double d = model.removal(x);
    const double d_x = model.removal_dx(x);
    eq.jacobian << -m.D - x * mu_s, -x * mu_x - mu, x * mu_s, mu - d + x * mu_x - x * d_x;

    const auto ev = numerics::eigenvalues(eq.jacobian);
    eq.eigenvalues = {ev[0], ev[1]};
    eq.classification = classify_eigenvalues(eq.eigenvalues);

    if (eq.kind == EquilibriumKind::Positive) {
        const double gap = phi_slope(model, s, x) - gamma_slope(model, x);
        eq.nullcline_slope_gap = gap;
        const double det = eq.jacobian.determinant();
        const double predicted = m.D * x * mu_s * gap;
        const double scale = 1e-12 * std::max({1.0, std::abs(det), std::abs(predicted)});
        if (std::abs(det) > scale && std::abs(predicted) > scale && (det > 0.0) != (predicted > 0.0))
            throw NumericError("classify: sign(det J) disagrees with sign(phi' - gamma')");
    }
    return eq;
}

std::size_t EquilibriumReport::positive_count() const {
    return static_cast<std::size_t>(std::count_if(
        equilibria.begin(), equilibria.end(),
        [](const Equilibrium& e) { return e.kind == EquilibriumKind::Positive; }));
}

bool EquilibriumReport::any_degenerate() const {
    return std::any_of(equilibria.begin(), equilibria.end(),
                       [](const Equilibrium& e) { return e.degenerate; });
}

EquilibriumReport find_equilibria(const ReducedModel& model, const ScanOptions& options) {
    require_density_only(model, "find_equilibria");
    if (options.points < 2) throw ConfigError("equilibrium scan needs at least two points");
    EquilibriumReport report;
    report.break_even = break_even(model);
    report.regime = regime(report.break_even, model.S_in());
    report.x_max = x_upper_bound(model);
    report.equilibria.push_back(classify(model, model.S_in(), 0.0));
    if (report.break_even.lambda0.is_infinite()) return report;

    const double x_max = report.x_max;
    // Sign of phi(x) - gamma(x); phi undefined counts as +.
    auto side = [&](double x) -> int {
        const auto p = phi(model, x);
        if (!p) return 1;
        const double diff = *p - gamma(model, x);
        return diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
    };

    std::vector<double> roots;
    const double step = x_max / static_cast<double>(options.points);
    double x_prev = 0.0;
    int s_prev = side(0.0);
    for (std::size_t k = 1; k <= options.points; ++k) {
        const double x = k == options.points ? x_max : step * static_cast<double>(k);
        const int s = side(x);
        if (s == 0) {
            roots.push_back(x);
        } else if (s_prev != 0 && s != s_prev) {
            double lo = x_prev, hi = x;
            const int s_lo = s_prev;
            while (hi - lo > options.bisection_tol * x_max) {
                const double mid = 0.5 * (lo + hi);
                const int sm = side(mid);
                if (sm == 0) {
                    lo = hi = mid;
                    break;
                }
                (sm == s_lo ? lo : hi) = mid;
            }
            roots.push_back(0.5 * (lo + hi));
        }
        x_prev = x;
        s_prev = s;
    }

    std::vector<std::pair<double, bool>> merged;
    for (double r : roots) {
        if (!merged.empty() && r - merged.back().first < options.merge_radius * x_max)
            merged.back().second = true;
        else
            merged.emplace_back(r, false);
    }
    for (const auto& [x, degenerate] : merged) {
        const auto s = phi(model, x);
        if (!s) continue;
        Equilibrium eq = classify(model, *s, x);
        eq.degenerate = degenerate;
        report.equilibria.push_back(std::move(eq));
    }
    return report;
}

bool HypothesisReport::holds() const {
    return std::all_of(results.begin(), results.end(), [](const HypothesisResult& r) {
        return r.status != HypothesisStatus::Violated;
    });
}

namespace {

// Tracks the smallest slack of a family of inequalities and where it occurs.
class MarginTracker {
public:
    void update(double margin, double s, double x, const char* inequality, bool strict = true) {
        const bool violated = strict ? !(margin > 0.0) : !(margin >= 0.0);
        if (margin < worst_ || (violated && !violated_)) {
            worst_ = margin;
            where_ = Witness{s, x, margin, inequality};
        }
        violated_ = violated_ || violated;
    }

    HypothesisResult result() const {
        HypothesisResult r;
        r.worst_margin = worst_;
        if (violated_) {
            r.status = HypothesisStatus::Violated;
            r.witness = where_;
        } else {
            r.status = HypothesisStatus::VerifiedOnGrid;
        }
        return r;
    }

private:
    double worst_ = kInf;
    bool violated_ = false;
    Witness where_;
};

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    const double a = std::log10(lo), b = std::log10(hi);
    for (std::size_t k = 0; k < n; ++k)
        g[k] = std::pow(10.0, a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
    return g;
}

HypothesisResult analytic(double margin) {
    return {HypothesisStatus::VerifiedAnalytic, std::nullopt, margin};
}

HypothesisResult not_applicable() { return {HypothesisStatus::NotApplicable, std::nullopt, 0.0}; }

constexpr std::size_t kGrid = 64;

} // namespace

HypothesisReport check_hypotheses(const ReducedModel& model) {
    const auto& m = model.source();
    const BreakEven be = break_even(model);
    const double x_max = x_upper_bound(model);
    double s_hi = std::max(1.0, m.S_in);
    if (be.lambda0.is_finite()) s_hi = std::max(s_hi, be.lambda0.value());
    if (be.lambda1.is_finite()) s_hi = std::max(s_hi, be.lambda1.value());
    s_hi *= 2.0;
    const auto s_grid = log_grid(1e-6 * s_hi, s_hi, kGrid);
    std::vector<double> x_grid{0.0};
    for (double x : log_grid(1e-6 * x_max, x_max, kGrid - 1)) x_grid.push_back(x);

    HypothesisReport report;
    const double l0 = be.lambda0.as_double(), l1 = be.lambda1.as_double();

    // Structural route: p decreasing from 1 to 0 with [x p]' > 0, f > g
    // increasing, D1 < D0 <= D.
    if (model.density_dependent_fraction() && m.f.kind() == GrowthLaw::Kind::Monod) {
        double fg_margin = kInf;
        for (double s : s_grid) fg_margin = std::min(fg_margin, m.f.value(s) - m.g.value(s));
        const bool rates = m.D1 < m.D0 && m.D0 <= m.D;
        if (fg_margin > 0.0 && rates) {
            report.results[0] = analytic(m.f.value(s_grid.front()));
            report.results[1] = analytic(fg_margin);
            report.results[2] = analytic(m.D0 - m.D1);
            report.results[3] = l0 < l1 ? analytic(l1 - l0) : not_applicable();
            report.results[4] = l1 < l0 ? analytic(l0 - l1) : not_applicable();
            return report;
        }
    }

    const double x_inf = kInfinityProxy * x_max;

    MarginTracker h0;
    for (double x : x_grid) {
        const double at_zero = model.growth(0.0, x);
        h0.update(std::abs(at_zero) <= 1e-14 ? kInf : -std::abs(at_zero), 0.0, x, "mu(0,x) = 0");
        for (double s : s_grid) h0.update(model.growth(s, x), s, x, "mu(S,x) > 0");
    }
    report.results[0] = h0.result();

    MarginTracker h1;
    for (double x : x_grid)
        for (double s : s_grid) {
            h1.update(model.growth_ds(s, x), s, x, "dmu/dS > 0");
            h1.update(-model.growth_dx(s, x), s, x, "dmu/dx < 0");
        }
    report.results[1] = h1.result();

    MarginTracker h2;
    for (double s : s_grid) {
        const double d0 = model.removal(s, 0.0);
        const double d_inf = model.removal(s, x_inf);
        h2.update(d0 - d_inf, s, x_inf, "d(+inf) < d(0)");
        h2.update(m.D - d0, s, 0.0, "d(0) <= D", /*strict=*/false);
        for (double x : x_grid) {
            const double d = model.removal(s, x);
            const double dx = model.removal_dx(s, x);
            h2.update(d, s, x, "d(x) > 0");
            h2.update(-dx, s, x, "d'(x) < 0");
            h2.update(d + x * dx, s, x, "[x d(x)]' > 0");
            if (model.fraction_depends_on_substrate()) {
                const double ds = model.removal_ds(s, x);
                h2.update(ds == 0.0 ? kInf : -std::abs(ds), s, x, "d independent of S");
            }
        }
    }
    report.results[2] = h2.result();

    auto interval_check = [&](double lo, double hi, bool h3) {
        MarginTracker t;
        for (std::size_t k = 0; k < kGrid; ++k) {
            // H3: [lambda0, lambda1), H4: (lambda1, lambda0]
            const double frac = h3 ? static_cast<double>(k) / kGrid
                                   : static_cast<double>(k + 1) / kGrid;
            const double s = lo + (hi - lo) * frac;
            for (double x : x_grid) {
                const double slack = model.removal_dx(s, x) - model.growth_dx(s, x);
                t.update(h3 ? slack : -slack, s, x, h3 ? "d'(x) > dmu/dx" : "d'(x) < dmu/dx");
            }
        }
        return t.result();
    };
    const double s_cap = std::max(s_hi, 2.0 * std::min(l0, l1));
    report.results[3] = l0 < l1 ? interval_check(l0, std::min(l1, s_cap), true) : not_applicable();
    report.results[4] = l1 < l0 ? interval_check(l1, std::min(l0, s_cap), false) : not_applicable();
    return report;
}

numerics::Trajectory simulate(const ReducedModel& model, double s0, double x0, double T,
                              const numerics::IntegratorConfig& config) {
    const numerics::Rhs rhs = [&model](double, std::span<const double> y, std::span<double> dy) {
        model.rhs_vec(y, dy);
    };
    const std::array<double, 2> y0{s0, x0};
    return numerics::integrate(rhs, y0, 0.0, T, config);
}

namespace {

Point unit(double a, double b) {
    const double n = std::hypot(a, b);
    return {a / n, b / n};
}

// Eigenvector of a 2x2 matrix for a real eigenvalue.
Point eigenvector(const Eigen::Matrix2d& j, double lambda) {
    const double r0a = j(0, 1), r0b = lambda - j(0, 0);
    const double r1a = lambda - j(1, 1), r1b = j(1, 0);
    if (std::hypot(r0a, r0b) >= std::hypot(r1a, r1b)) return unit(r0a, r0b);
    return unit(r1a, r1b);
}

} // namespace

Separatrix separatrix(const ReducedModel& model, const Equilibrium& saddle, double span,
                      const numerics::IntegratorConfig& config) {
    if (saddle.classification != Stability::Saddle)
        throw PreconditionError("separatrix: equilibrium is not a saddle");
    if (!(span > 0.0)) throw ConfigError("separatrix: span must be positive");
    span = std::min(span, 200.0);

    const double s_box = model.S_in() + 1.0;
    const double x_box = x_upper_bound(model);
    const double lambda_stable = std::min(saddle.eigenvalues[0].real(), saddle.eigenvalues[1].real());
    const double lambda_unstable =
        std::max(saddle.eigenvalues[0].real(), saddle.eigenvalues[1].real());

    Separatrix out;
    out.stable_direction = eigenvector(saddle.jacobian, lambda_stable);
    out.unstable_direction = eigenvector(saddle.jacobian, lambda_unstable);
    const double delta = 1e-6 * std::max(1.0, std::abs(saddle.S) + std::abs(saddle.x));

    auto inside = [&](double s, double x) { return s >= 0.0 && s <= s_box && x >= 0.0 && x <= x_box; };
    // Reverse-time field, extended continuously past the nonnegative orthant
    // so that trial steps near the boundary stay defined.
    const numerics::Rhs reverse = [&model](double, std::span<const double> y,
                                           std::span<double> dy) {
        const auto d = model.rhs(std::max(0.0, y[0]), std::max(0.0, y[1]));
        dy[0] = -d[0];
        dy[1] = -d[1];
    };
    const numerics::StopCondition leave = [&](double, std::span<const double> y) {
        return !inside(y[0], y[1]);
    };

    for (int b = 0; b < 2; ++b) {
        const double sign = b == 0 ? 1.0 : -1.0;
        const std::array<double, 2> seed{saddle.S + sign * delta * out.stable_direction[0],
                                         saddle.x + sign * delta * out.stable_direction[1]};
        auto& branch = out.branches[static_cast<std::size_t>(b)];
        branch.push_back({saddle.S, saddle.x});
        const auto traj = numerics::integrate(reverse, seed, 0.0, span, config, leave);
        for (std::size_t k = 0; k < traj.size(); ++k) {
            const auto y = traj.state(k);
            if (inside(y[0], y[1])) {
                branch.push_back({y[0], y[1]});
                continue;
            }
            // Cut the exit segment at the box boundary.
            const Point last = branch.back();
            double t_exit = 1.0;
            auto clip = [&](double from, double to, double bound) {
                if ((to - bound) * (from - bound) < 0.0)
                    t_exit = std::min(t_exit, (bound - from) / (to - from));
            };
            clip(last[0], y[0], 0.0);
            clip(last[0], y[0], s_box);
            clip(last[1], y[1], 0.0);
            clip(last[1], y[1], x_box);
            branch.push_back({last[0] + t_exit * (y[0] - last[0]),
                              last[1] + t_exit * (y[1] - last[1])});
            break;
        }
    }
    return out;
}

} // namespace flocsim::single
