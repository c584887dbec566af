// Acceptance suite: one PASS/FAIL line per criterion with its runtime.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "flocsim/analysis_multi.hpp"
#include "flocsim/analysis_single.hpp"
#include "flocsim/reduction.hpp"
#include "flocsim/scenario.hpp"
#include "oracles.hpp"

using namespace flocsim;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = fs::path(FLOCSIM_SOURCE_DIR) / "scenarios";

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

// Times only the code under test; oracle work runs outside `timed`.
struct Stopwatch {
    Clock::duration total{};

    template <class F>
    auto timed(F&& f) {
        const auto start = Clock::now();
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            total += Clock::now() - start;
        } else {
            auto r = f();
            total += Clock::now() - start;
            return r;
        }
    }

    double ms() const { return std::chrono::duration<double, std::milli>(total).count(); }
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

FullModel bistable_model() { return load_scenario(kScenarios / "paper_fig2_fig3.json").single_model(); }

double monod_inverse(double mu_max, double K, double level) { return K * level / (mu_max - level); }

// 1. Break-even values.
Outcome break_even_values(Stopwatch& sw) {
    const FullModel m = bistable_model();
    const auto be = sw.timed([&] { return single::break_even(ReducedModel(m)); });
    const double l0 = monod_inverse(2.0, 1.0, 1.0), l1 = monod_inverse(1.5, 0.8, 0.5);
    const double e0 = std::abs(be.lambda0.value() - l0), e1 = std::abs(be.lambda1.value() - l1);
    return {e0 <= 1e-8 && e1 <= 1e-8 && sw.ms() < 1.0,
            fmt("lambda0=%.15g lambda1=%.15g errors %.1e %.1e", be.lambda0.value(), be.lambda1.value(), e0, e1)};
}

// Nullcline phi for TotalDensity kinetics with Monod f and g, from the
// quadratic obtained by clearing denominators in p f + (1 - p) g = d.
struct PhiOracle {
    double mf, kf, mg, kg, D0, D1, a, b;

    double operator()(double x) const {
        const double p = b / (b + a * x), q = 1.0 - p, d = p * D0 + q * D1;
        const double A = p * mf + q * mg - d;
        const double B = p * mf * kg + q * mg * kf - d * (kf + kg);
        const double C = -d * kf * kg;
        if (A <= 0.0) return INFINITY;
        return (-B + std::sqrt(B * B - 4.0 * A * C)) / (2.0 * A);
    }
};

// 2. Equilibria of the bundled bistable scenario.
Outcome bistable_equilibria(Stopwatch& sw) {
    const FullModel m = bistable_model();
    const auto rep = sw.timed([&] { return single::find_equilibria(ReducedModel(m)); });

    const PhiOracle phi{2.0, 1.0, 1.5, 0.8, 1.0, 0.5, 4.0, 1.0};
    const double x_max = m.D * m.S_in / m.D1 + 1.0;
    auto gap = [&](double x) {
        const double p = 1.0 / (1.0 + 4.0 * x);
        return phi(x) - (m.S_in - x * (p * m.D0 + (1 - p) * m.D1) / m.D);
    };
    const auto roots = oracle::scan_roots(gap, x_max * 1e-6, x_max, 1'000'000);

    if (rep.equilibria.size() != 3 || roots.size() != 2)
        return {false, fmt("found %zu equilibria, oracle %zu positive", rep.equilibria.size(), roots.size())};
    const auto& w = rep.equilibria[0];
    const auto& lo = rep.equilibria[1].S < rep.equilibria[2].S ? rep.equilibria[1] : rep.equilibria[2];
    const auto& hi = rep.equilibria[1].S < rep.equilibria[2].S ? rep.equilibria[2] : rep.equilibria[1];
    bool ok = w.kind == single::EquilibriumKind::Washout && w.S == 0.9 && w.x == 0.0 && w.stable();
    ok = ok && lo.stable() && hi.classification == single::Stability::Saddle;
    double worst = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
        const double xo = roots[k], so = phi(xo);
        const auto& e = rep.equilibria[1 + k];
        worst = std::max({worst, std::abs(e.x - xo), std::abs(e.S - so)});
    }
    ok = ok && worst <= 1e-6 && sw.ms() < 1000.0;
    return {ok, fmt("washout %s, stable (%.6f, %.6f), saddle (%.6f, %.6f), max oracle gap %.1e",
                    single::to_string(w.classification).c_str(), lo.S, lo.x, hi.S, hi.x, worst)};
}

// 3. Basins on both sides of the separatrix.
Outcome bistability_basins(Stopwatch& sw) {
    const FullModel m = bistable_model();
    const ReducedModel r(m);
    const auto rep = single::find_equilibria(r);
    const auto& washout = rep.equilibria[0];
    const auto& saddle = rep.equilibria[1];
    const auto& stable = rep.equilibria[2];
    const auto sep = sw.timed([&] { return single::separatrix(r, saddle); });

    // One polyline: branch 0 reversed, then branch 1 (both start at the saddle).
    std::vector<single::Point> path(sep.branches[0].rbegin(), sep.branches[0].rend());
    path.insert(path.end(), sep.branches[1].begin() + 1, sep.branches[1].end());
    const double margin = 2e-3;
    std::vector<single::Point> inner;
    for (const auto& p : path)
        if (p[0] > margin && p[1] > margin) inner.push_back(p);
    std::vector<double> arc{0.0};
    for (std::size_t k = 1; k < inner.size(); ++k)
        arc.push_back(arc.back() + std::hypot(inner[k][0] - inner[k - 1][0], inner[k][1] - inner[k - 1][1]));

    // Sides are taken from the left normal of the path tangent; orient it
    // toward the positive stable equilibrium at the saddle.
    std::size_t at = 0;
    while (at + 1 < inner.size() && inner[at] != single::Point{saddle.S, saddle.x}) ++at;
    const std::size_t next = std::min(at + 1, inner.size() - 1), prev = next - 1;
    const double nx = -(inner[next][1] - inner[prev][1]), ny = inner[next][0] - inner[prev][0];
    const double toward_stable = nx * (stable.S - saddle.S) + ny * (stable.x - saddle.x);
    const double orient = toward_stable > 0 ? 1.0 : -1.0;

    const double offset = 1e-3;
    int hits_pos = 0, hits_wash = 0;
    for (int k = 0; k < 20; ++k) {
        const double target = arc.back() * (k + 0.5) / 20.0;
        std::size_t i = 1;
        while (i + 1 < arc.size() && arc[i] < target) ++i;
        const double w = (target - arc[i - 1]) / (arc[i] - arc[i - 1]);
        const double ps = inner[i - 1][0] + w * (inner[i][0] - inner[i - 1][0]);
        const double px = inner[i - 1][1] + w * (inner[i][1] - inner[i - 1][1]);
        const double tx = inner[i][0] - inner[i - 1][0], ty = inner[i][1] - inner[i - 1][1];
        const double len = std::hypot(tx, ty);
        const double ux = -ty / len * orient, uy = tx / len * orient;
        for (double side : {1.0, -1.0}) {
            const auto traj = sw.timed(
                [&] { return single::simulate(r, ps + side * offset * ux, px + side * offset * uy, 500.0); });
            const auto end = traj.back();
            if (side > 0 && std::hypot(end[0] - stable.S, end[1] - stable.x) <= 1e-4) ++hits_pos;
            if (side < 0 && std::hypot(end[0] - washout.S, end[1] - washout.x) <= 1e-4) ++hits_wash;
        }
    }
    return {hits_pos >= 19 && hits_wash >= 19 && sw.ms() < 30000.0,
            fmt("positive side %d/20, washout side %d/20", hits_pos, hits_wash)};
}

// 4. Tikhonov convergence on the bundled scenario.
Outcome tikhonov(Stopwatch& sw) {
    const auto sc = load_scenario(kScenarios / "paper_fig2_fig3.json");
    const auto table = sw.timed([&] {
        return tikhonov_convergence(sc.single_model(), std::get<FullState>(sc.initial), sc.horizon, sc.layer_time,
                                    sc.epsilons, sc.integrator, 3);
    });
    const auto& r = table.rows;
    if (r.size() != 3) return {false, "expected three rows"};
    bool ok = true;
    for (const auto& row : r) ok = ok && !row.failed;
    auto decreasing = [&](auto field) {
        return field(r[1]) < field(r[0]) && field(r[2]) < field(r[1]) && field(r[2]) <= field(r[0]) / 5.0;
    };
    ok = ok && decreasing([](const ConvergenceRow& x) { return x.err_S; }) &&
         decreasing([](const ConvergenceRow& x) { return x.err_u; }) &&
         decreasing([](const ConvergenceRow& x) { return x.err_v; }) && sw.ms() < 60000.0;
    return {ok, fmt("err_S %.3e %.3e %.3e; err_u %.3e %.3e %.3e; err_v %.3e %.3e %.3e", r[0].err_S, r[1].err_S,
                    r[2].err_S, r[0].err_u, r[1].err_u, r[2].err_u, r[0].err_v, r[1].err_v, r[2].err_v)};
}

// 5. Slow-manifold closed forms against the generic root solver.
Outcome slow_manifold(Stopwatch& sw) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> rate(0.05, 10.0), dens(0.0, 10.0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double a = rate(rng), b = rate(rng), x = dens(rng);
        const double expect[] = {b * x / (a + b), b * x / (b + a * x),
                                 x * 2.0 / (1.0 + std::sqrt(1.0 + 4.0 * (a / b) * x))};
        const AttachmentKinetics ks[] = {kinetics::Constant{a, b}, kinetics::TotalDensity{a, b},
                                         kinetics::MassAction{a, b}};
        for (int v = 0; v < 3; ++v) {
            const double generic = sw.timed([&] { return slow_manifold_u_generic(ks[v], x, 0.0, 0.0); });
            const double closed = sw.timed([&] { return slow_manifold_u(ks[v], x, 0.0, 0.0); });
            worst = std::max({worst, std::abs(generic - expect[v]), std::abs(closed - expect[v])});
        }
    }
    return {worst <= 1e-10 && sw.ms() < 1000.0, fmt("max deviation %.1e over 3000 cases", worst)};
}

// 6. Arrowhead stability.
Outcome arrowhead(Stopwatch& sw) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = -INFINITY;
    int unstable = 0;
    for (int k = 0; k < 1000; ++k) {
        const std::size_t n = 1 + rng() % 10;
        std::vector<double> a(n), b(n), c(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = 5.0 * U(rng);
            b[i] = 0.01 + 5.0 * U(rng);
            c[i] = b[i] - 10.0 * U(rng);
        }
        const double D = 0.01 + 3.0 * U(rng);
        const auto ev = sw.timed([&] { return numerics::eigenvalues(multi::arrowhead_matrix(a, b, c, D)); });
        const double re = numerics::max_real_part(ev);
        worst = std::max(worst, re);
        if (!(re < -1e-12) || !multi::arrowhead_stability(a, b, c, D)) ++unstable;
    }
    const auto cex = sw.timed([] { return numerics::eigenvalues(multi::arrowhead_matrix({1.0}, {1.0}, {3.0}, 1.0)); });
    const double cex_re = numerics::max_real_part(cex);
    return {unstable == 0 && cex_re >= 0.0 && sw.ms() < 5000.0,
            fmt("max Re over 1000 admissible %.3e, unstable %d; counterexample max Re %.3f", worst, unstable, cex_re)};
}

// Balance biomass for TotalDensity with Monod laws:
// b (f - D0) = a x (D1 - g).
struct SpeciesParams {
    double mf, kf, mg, kg, D0, D1, a, b;

    double f(double s) const { return mf * s / (kf + s); }
    double g(double s) const { return mg * s / (kg + s); }
    double X(double s) const { return std::max(0.0, b * (f(s) - D0) / (a * (D1 - g(s)))); }
    double h(double s) const {
        const double x = X(s), p = b / (b + a * x);
        return (p * D0 + (1 - p) * D1) * x;
    }
};

FullModel species_model(const SpeciesParams& p, double D, double s_in) {
    FullModel m;
    m.D = D;
    m.S_in = s_in;
    m.D0 = p.D0;
    m.D1 = p.D1;
    m.f = GrowthLaw::monod(p.mf, p.kf);
    m.g = GrowthLaw::monod(p.mg, p.kg);
    m.kinetics = kinetics::TotalDensity{p.a, p.b};
    return m;
}

// 7. Multi-species existence criterion.
Outcome multi_existence(Stopwatch& sw) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int admissible = 0, exists = 0, disagree = 0, unstable = 0, draws = 0;
    double worst_s = 0.0;
    while (admissible < 100 && draws < 100000) {
        ++draws;
        const std::size_t n = 1 + rng() % 4;
        const double D = 1.0;
        std::vector<SpeciesParams> sp;
        for (std::size_t i = 0; i < n; ++i) {
            SpeciesParams p;
            p.D0 = 0.4 + 0.6 * U(rng);
            p.D1 = p.D0 * (0.2 + 0.7 * U(rng));
            p.mf = p.D0 * (1.3 + 2.0 * U(rng));
            p.kf = 0.1 + 0.8 * U(rng);
            p.mg = std::max(p.D1 * (1.1 + U(rng)), 0.0);
            p.mg = std::min(p.mg, 0.95 * p.mf);
            p.kg = p.kf * (1.0 + 2.0 * U(rng));
            p.a = 0.5 + 6.0 * U(rng);
            p.b = 0.5 + 1.5 * U(rng);
            sp.push_back(p);
        }
        double l0 = 0.0, l1 = INFINITY;
        for (const auto& p : sp) {
            l0 = std::max(l0, monod_inverse(p.mf, p.kf, p.D0));
            if (p.mg > p.D1) l1 = std::min(l1, monod_inverse(p.mg, p.kg, p.D1));
        }
        if (!(l0 < l1)) continue;
        const double s_in = l0 * (1.02 + 1.5 * U(rng));
        std::vector<ReducedModel> models;
        for (const auto& p : sp) models.emplace_back(species_model(p, D, s_in));
        const multi::DiagonalMultiModel model(std::move(models));
        if (!multi::check_multi_hypotheses(model).holds()) continue;
        ++admissible;

        auto H = [&](double s) {
            double sum = 0.0;
            for (const auto& p : sp) sum += p.h(s);
            return sum - D * (s_in - s);
        };
        const double top = std::isfinite(l1) ? l1 * (1.0 - 1e-9) : 10.0 * s_in;
        const auto roots = oracle::scan_roots(H, l0, top, 20000);
        const bool oracle_exists = !roots.empty() && roots.front() > l0;

        const auto eq = sw.timed([&] { return multi::solve_positive_equilibrium(model); });
        const bool criterion = multi::H(model, model.lambda0_max().value()) < 0.0;
        if (criterion != oracle_exists || criterion != eq.has_value()) ++disagree;
        if (eq) {
            ++exists;
            if (numerics::max_real_part(eq->eigenvalues) >= 0.0) ++unstable;
            if (!roots.empty()) worst_s = std::max(worst_s, std::abs(eq->S_star - roots.front()));
        }
    }
    return {admissible == 100 && disagree == 0 && unstable == 0 && worst_s <= 1e-8 && sw.ms() < 60000.0,
            fmt("%d admissible models (%d draws), %d with E*, %d disagreements, %d unstable, max |S*-oracle| %.1e",
                admissible, draws, exists, disagree, unstable, worst_s)};
}

// 8. Equilibrium counts per case of the threshold ordering.
Outcome case_parity(Stopwatch& sw) {
    using single::Regime;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const Regime cases[] = {Regime::UniquePositive, Regime::NoPositive, Regime::OddPositive,
                            Regime::EvenOrNonePositive};
    std::string detail;
    bool ok = true;
    for (Regime target : cases) {
        int kept = 0, wrong = 0, tangent = 0, draws = 0;
        std::vector<int> counts(8, 0);
        while (kept < 100 && draws < 200000) {
            ++draws;
            SpeciesParams p;
            p.D0 = 0.4 + 0.6 * U(rng);
            p.D1 = p.D0 * (0.2 + 0.7 * U(rng));
            p.mf = p.D0 * (1.1 + 3.0 * U(rng));
            p.kf = 0.05 + 2.0 * U(rng);
            p.mg = p.mf * (0.3 + 0.65 * U(rng));
            p.kg = 0.05 + 3.0 * U(rng);
            p.a = 0.5 + 8.0 * U(rng);
            p.b = 0.5 + 1.5 * U(rng);
            const double s_in = 0.05 + 3.0 * U(rng);
            const ReducedModel r(species_model(p, 1.0, s_in));
            const auto be = single::break_even(r);
            if (single::regime(be, s_in) != target) continue;
            if (!single::check_hypotheses(r).holds()) continue;
            const auto rep = sw.timed([&] { return single::find_equilibria(r); });
            if (rep.any_degenerate()) {
                ++tangent;
                continue;
            }
            ++kept;
            const auto n = static_cast<int>(rep.positive_count());
            ++counts[static_cast<std::size_t>(std::min(n, 7))];
            bool right = false;
            switch (target) {
            case Regime::UniquePositive: right = n == 1; break;
            case Regime::NoPositive: right = n == 0; break;
            case Regime::OddPositive: right = n % 2 == 1; break;
            case Regime::EvenOrNonePositive: right = n % 2 == 0; break;
            default: break;
            }
            if (!right) ++wrong;
        }
        ok = ok && kept == 100 && wrong == 0;
        detail += fmt("%s: %d kept, %d wrong, %d tangent, counts 0/1/2/3 = %d/%d/%d/%d; ",
                      single::to_string(target).c_str(), kept, wrong, tangent, counts[0], counts[1], counts[2],
                      counts[3]);
    }
    detail.resize(detail.size() - 2);
    return {ok && sw.ms() < 120000.0, detail};
}

// 9. Hypothesis checker.
Outcome hypotheses(Stopwatch& sw) {
    using single::HypothesisStatus;
    const FullModel base = bistable_model();
    FullModel reversed = base;
    reversed.g = GrowthLaw::monod(1.5, 3.0);
    FullModel same_growth = base;
    same_growth.g = base.f;
    FullModel same_removal = base;
    same_removal.D1 = base.D0;

    const auto r_base = sw.timed([&] { return single::check_hypotheses(ReducedModel(base)); });
    const auto r_rev = sw.timed([&] { return single::check_hypotheses(ReducedModel(reversed)); });
    const auto r_fg = sw.timed([&] { return single::check_hypotheses(ReducedModel(same_growth)); });
    const auto r_dd = sw.timed([&] { return single::check_hypotheses(ReducedModel(same_removal)); });

    auto analytic = [](const single::HypothesisReport& rep, std::size_t applicable, std::size_t other) {
        for (std::size_t i : {std::size_t{0}, std::size_t{1}, std::size_t{2}, applicable})
            if (rep[i].status != HypothesisStatus::VerifiedAnalytic) return false;
        return rep[other].status == HypothesisStatus::NotApplicable;
    };
    auto violated = [](const single::HypothesisResult& h) {
        return h.status == HypothesisStatus::Violated && h.witness && h.witness->residual <= 0.0;
    };
    const bool ok = analytic(r_base, 4, 3) && analytic(r_rev, 3, 4) && violated(r_fg[1]) && violated(r_dd[2]) &&
                    sw.ms() < 1000.0;
    return {ok, fmt("f=g witness (S=%.3g, x=%.3g) %s; D0=D1 witness (S=%.3g, x=%.3g) %s",
                    r_fg[1].witness ? r_fg[1].witness->S : NAN, r_fg[1].witness ? r_fg[1].witness->x : NAN,
                    r_fg[1].witness ? r_fg[1].witness->inequality.c_str() : "-",
                    r_dd[2].witness ? r_dd[2].witness->S : NAN, r_dd[2].witness ? r_dd[2].witness->x : NAN,
                    r_dd[2].witness ? r_dd[2].witness->inequality.c_str() : "-")};
}

// 10. Numerics self-checks.
Outcome numerics_checks(Stopwatch& sw) {
    const numerics::Rhs decay = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = -y[0]; };
    const std::array<double, 1> y0{1.0};
    std::vector<double> errors;
    for (double tol : {1e-6, 1e-7, 1e-8, 1e-9, 1e-10}) {
        numerics::IntegratorConfig cfg;
        cfg.rel_tol = tol;
        cfg.abs_tol = tol * 1e-2;
        const auto traj = sw.timed([&] { return numerics::integrate(decay, y0, 0.0, 5.0, cfg); });
        errors.push_back(std::abs(traj.back()[0] - std::exp(-5.0)));
    }
    bool order_ok = errors.front() / errors.back() >= 1e2;
    for (std::size_t k = 1; k < errors.size(); ++k) order_ok = order_ok && errors[k] < errors[k - 1];

    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> U(-5.0, 5.0);
    int outside = 0;
    for (int k = 0; k < 1000; ++k) {
        const double r0 = U(rng), c = U(rng);
        const auto f = [&](double x) { return std::tanh(x - r0) + 0.1 * std::sin(c * x) * (x - r0); };
        const double lo = r0 - 1.0 - std::abs(U(rng)), hi = r0 + 1.0 + std::abs(U(rng));
        if (f(lo) * f(hi) > 0.0) continue;
        const auto root = sw.timed([&] { return numerics::find_root(f, lo, hi, 1e-12); });
        if (root.x < lo || root.x > hi) ++outside;
    }

    double eig_gap = 0.0, transpose_gap = 0.0;
    for (int k = 0; k < 200; ++k) {
        const auto n = static_cast<Eigen::Index>(2 + rng() % 5);
        Eigen::MatrixXd M(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) M(i, j) = U(rng);
        const auto ev = sw.timed([&] { return numerics::eigenvalues(M); });
        const auto evt = sw.timed([&] { return numerics::eigenvalues(M.transpose()); });
        const auto roots = oracle::polynomial_roots(oracle::characteristic_polynomial(M));
        const std::vector<oracle::Complex> a(ev.begin(), ev.end()), b(evt.begin(), evt.end());
        eig_gap = std::max(eig_gap, oracle::set_distance(a, roots) / (1.0 + M.norm()));
        transpose_gap = std::max(transpose_gap, oracle::set_distance(a, b));
    }
    const bool ok = order_ok && outside == 0 && eig_gap <= 1e-8 && transpose_gap <= 1e-9 && sw.ms() < 30000.0;
    return {ok, fmt("error tol 1e-6 %.2e, tol 1e-10 %.2e; roots outside bracket %d; eig vs charpoly %.1e, "
                    "transpose %.1e",
                    errors.front(), errors.back(), outside, eig_gap, transpose_gap)};
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome(Stopwatch&)> run;
    };
    const Criterion criteria[] = {
        {"break-even values", break_even_values},
        {"bistable equilibria", bistable_equilibria},
        {"bistability basins", bistability_basins},
        {"Tikhonov convergence", tikhonov},
        {"slow-manifold formulas", slow_manifold},
        {"arrowhead stability", arrowhead},
        {"multi-species existence", multi_existence},
        {"case-analysis parity", case_parity},
        {"hypothesis checker", hypotheses},
        {"numerics self-checks", numerics_checks},
    };
    int failures = 0, index = 0;
    for (const auto& c : criteria) {
        ++index;
        Stopwatch sw;
        Outcome out;
        try {
            out = c.run(sw);
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        if (!out.pass) ++failures;
        std::printf("%s %2d %-26s [%9.3f ms] %s\n", out.pass ? "PASS" : "FAIL", index, c.name, sw.ms(),
                    out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", index - failures, index);
    return failures == 0 ? 0 : 1;
}
