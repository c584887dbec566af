#include "flocsim/reduction.hpp"

#include "flocsim/format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace flocsim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double clamp_nonnegative(double value, const char* what) {
    if (value >= 0.0) return value;
    if (value >= -kNonnegativeSlack) return 0.0;
    throw DomainError(std::string(what) + " is negative");
}

// Admissible planktonic interval [lo, x]: for Freter v = x - u <= v_max.
double lower_u(const AttachmentKinetics& k, double x) {
    if (const auto* fr = std::get_if<kinetics::Freter>(&k)) return std::max(0.0, x - fr->v_max);
    return 0.0;
}

double balance(const AttachmentKinetics& k, double u, double x, double s, double g_at_s) {
    const double v = std::max(0.0, x - u);
    const auto [alpha, beta] = exchange_rates(k, s, u, v, g_at_s);
    return alpha * u - beta * v;
}

} // namespace

double slow_manifold_u_generic(const AttachmentKinetics& k, double x, double s, double g_at_s) {
    if (!(x >= 0.0)) throw DomainError("slow manifold: x must be nonnegative");
    if (!(s >= 0.0)) throw DomainError("slow manifold: S must be nonnegative");
    if (x == 0.0) return 0.0;
    const double lo = lower_u(k, x);
    auto fn = [&](double u) { return balance(k, u, x, s, g_at_s); };
    try {
        return numerics::find_root(fn, lo, x, 1e-15 * x).x;
    } catch (const BracketError&) {
        throw NumericError("slow manifold: balance has no sign change on the admissible interval");
    }
}

double slow_manifold_u(const AttachmentKinetics& k, double x, double s, double g_at_s) {
    if (!(x >= 0.0)) throw DomainError("slow manifold: x must be nonnegative");
    if (!(s >= 0.0)) throw DomainError("slow manifold: S must be nonnegative");
    return std::visit(
        Overloaded{
            [x](const kinetics::Constant& c) { return c.b * x / (c.a + c.b); },
            [x, s](const kinetics::SubstrateDependent& c) {
                const double al = c.alpha.value(s), be = c.beta.value(s);
                return be * x / (al + be);
            },
            [x](const kinetics::MassAction& c) {
                return x * 2.0 / (1.0 + std::sqrt(1.0 + 4.0 * (c.a / c.b) * x));
            },
            [x](const kinetics::TotalDensity& c) { return c.b * x / (c.b + c.a * x); },
            [&k, x, s, g_at_s](const kinetics::Freter&) {
                return slow_manifold_u_generic(k, x, s, g_at_s);
            },
        },
        k);
}

ReducedModel::ReducedModel(FullModel source) : source_(std::move(source)) {
    source_.validate();
}

bool ReducedModel::fraction_depends_on_substrate() const noexcept {
    return std::holds_alternative<kinetics::SubstrateDependent>(source_.kinetics) ||
           std::holds_alternative<kinetics::Freter>(source_.kinetics);
}

bool ReducedModel::density_dependent_fraction() const noexcept {
    return std::holds_alternative<kinetics::TotalDensity>(source_.kinetics) ||
           std::holds_alternative<kinetics::MassAction>(source_.kinetics);
}

Fraction ReducedModel::fraction(double s, double x) const {
    s = clamp_nonnegative(s, "S");
    x = clamp_nonnegative(x, "x");
    return std::visit(
        Overloaded{
            [](const kinetics::Constant& c) { return Fraction{c.b / (c.a + c.b), 0.0, 0.0}; },
            [s](const kinetics::SubstrateDependent& c) {
                const double al = c.alpha.value(s), be = c.beta.value(s);
                const double sum = al + be;
                const double dp_ds =
                    (c.beta.derivative(s) * al - c.alpha.derivative(s) * be) / (sum * sum);
                return Fraction{be / sum, dp_ds, 0.0};
            },
            [x](const kinetics::MassAction& c) {
                const double ratio = c.a / c.b;
                const double r = std::sqrt(1.0 + 4.0 * ratio * x);
                const double den = 1.0 + r;
                return Fraction{2.0 / den, 0.0, -4.0 * ratio / (r * den * den)};
            },
            [x](const kinetics::TotalDensity& c) {
                const double den = c.b + c.a * x;
                return Fraction{c.b / den, 0.0, -c.a * c.b / (den * den)};
            },
            [this, s, x](const kinetics::Freter& c) {
                const double gs = source_.g.value(s);
                const double p0 = c.b / (c.a + c.b);
                if (x == 0.0) {
                    // First-order expansion of the balance around x = 0.
                    const double w = (1.0 - p0) / c.v_max;
                    const double slope = -c.G.derivative(0.0);
                    const double p1 = w * (c.a * p0 + gs * slope * (1.0 - p0)) / (c.a + c.b);
                    return Fraction{p0, 0.0, p1};
                }
                const double u = slow_manifold_u_generic(source_.kinetics, x, s, gs);
                const double v = x - u;
                const double w = v / c.v_max;
                const double alpha = c.a * (1.0 - w);
                const double beta = c.b + gs * (1.0 - c.G.value(w));
                const double g_prime = c.G.derivative(w);
                const double alpha_u = c.a / c.v_max;
                const double alpha_x = -alpha_u;
                const double beta_u = gs * g_prime / c.v_max;
                const double beta_x = -beta_u;
                const double beta_s = source_.g.derivative(s) * (1.0 - c.G.value(w));
                const double f_u = alpha_u * u + alpha - beta_u * v + beta;
                const double f_x = alpha_x * u - beta_x * v - beta;
                const double f_s = -beta_s * v;
                const double du_dx = -f_x / f_u;
                const double du_ds = -f_s / f_u;
                const double p = u / x;
                return Fraction{p, du_ds / x, (du_dx - p) / x};
            },
        },
        source_.kinetics);
}

double ReducedModel::growth(double s, double x) const {
    const double p = fraction(s, x).p;
    return p * source_.f.value(s) + (1.0 - p) * source_.g.value(s);
}

double ReducedModel::growth_ds(double s, double x) const {
    const Fraction fr = fraction(s, x);
    return fr.dp_ds * (source_.f.value(s) - source_.g.value(s)) +
           fr.p * source_.f.derivative(s) + (1.0 - fr.p) * source_.g.derivative(s);
}

double ReducedModel::growth_dx(double s, double x) const {
    return fraction(s, x).dp_dx * (source_.f.value(s) - source_.g.value(s));
}

double ReducedModel::removal(double s, double x) const {
    const double p = fraction(s, x).p;
    return p * source_.D0 + (1.0 - p) * source_.D1;
}

double ReducedModel::removal_ds(double s, double x) const {
    return fraction(s, x).dp_ds * (source_.D0 - source_.D1);
}

double ReducedModel::removal_dx(double s, double x) const {
    return fraction(s, x).dp_dx * (source_.D0 - source_.D1);
}

std::array<double, 2> ReducedModel::rhs(double s, double x) const {
    s = clamp_nonnegative(s, "S");
    x = clamp_nonnegative(x, "x");
    const Fraction fr = fraction(s, x);
    const double mu = fr.p * source_.f.value(s) + (1.0 - fr.p) * source_.g.value(s);
    const double d = fr.p * source_.D0 + (1.0 - fr.p) * source_.D1;
    return {source_.D * (source_.S_in - s) - mu * x, (mu - d) * x};
}

void ReducedModel::rhs_vec(std::span<const double> y, std::span<double> dy) const {
    const auto d = rhs(y[0], y[1]);
    dy[0] = d[0];
    dy[1] = d[1];
}

ReducedModel reduce(const FullModel& model) { return ReducedModel(model); }

MultiReducedModel::MultiReducedModel(MultiSpeciesModel source) : source_(std::move(source)) {
    source_.validate();
}

std::vector<double> MultiReducedModel::fractions(std::span<const double> x) const {
    const std::size_t n = species();
    if (x.size() != n) throw ConfigError("multi-species reduced model: dimension mismatch");
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        double load = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            load += source_.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * x[j];
        p[i] = source_.b[i] / (source_.b[i] + load);
    }
    return p;
}

std::vector<double> MultiReducedModel::quasi_steady_u(std::span<const double> x) const {
    auto p = fractions(x);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] *= x[i];
    return p;
}

double MultiReducedModel::growth(std::size_t i, double s, std::span<const double> x) const {
    const double p = fractions(x).at(i);
    return p * source_.f[i].value(s) + (1.0 - p) * source_.g[i].value(s);
}

double MultiReducedModel::removal(std::size_t i, std::span<const double> x) const {
    const double p = fractions(x).at(i);
    return p * source_.D0[i] + (1.0 - p) * source_.D1[i];
}

double MultiReducedModel::growth_ds(std::size_t i, double s, std::span<const double> x) const {
    const double p = fractions(x).at(i);
    return p * source_.f[i].derivative(s) + (1.0 - p) * source_.g[i].derivative(s);
}

double MultiReducedModel::growth_dx(std::size_t i, std::size_t j, double s,
                                    std::span<const double> x) const {
    const double p = fractions(x).at(i);
    const double a_ij = source_.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    // dp_i/dx_j = -a_ij p_i^2 / b_i
    const double dp = -a_ij * p * p / source_.b[i];
    return dp * (source_.f[i].value(s) - source_.g[i].value(s));
}

void MultiReducedModel::rhs_vec(std::span<const double> y, std::span<double> dy) const {
    const std::size_t n = species();
    if (y.size() != n + 1) throw ConfigError("multi-species reduced state: dimension mismatch");
    const double s = clamp_nonnegative(y[0], "S");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = clamp_nonnegative(y[1 + i], "x_i");
    const auto p = fractions(x);
    double consumption = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double mu = p[i] * source_.f[i].value(s) + (1.0 - p[i]) * source_.g[i].value(s);
        const double d = p[i] * source_.D0[i] + (1.0 - p[i]) * source_.D1[i];
        dy[1 + i] = (mu - d) * x[i];
        consumption += mu * x[i];
    }
    dy[0] = source_.D * (source_.S_in - s) - consumption;
}

ReducedModel MultiReducedModel::species_model(std::size_t i) const {
    if (i >= species()) throw ConfigError("species index out of range");
    const auto ii = static_cast<Eigen::Index>(i);
    FullModel m;
    m.D = source_.D;
    m.S_in = source_.S_in;
    m.D0 = source_.D0[i];
    m.D1 = source_.D1[i];
    m.f = source_.f[i];
    m.g = source_.g[i];
    m.kinetics = kinetics::TotalDensity{source_.A(ii, ii), source_.b[i]};
    m.epsilon = source_.epsilon;
    return ReducedModel(std::move(m));
}

MultiReducedModel reduce_multi(const MultiSpeciesModel& model) { return MultiReducedModel(model); }

namespace {

void check_sweep(double T, double t0, std::span<const double> epsilons) {
    if (!(t0 > 0.0 && t0 < T)) throw ConfigError("tikhonov sweep requires 0 < t0 < T");
    if (epsilons.empty()) throw ConfigError("tikhonov sweep needs at least one epsilon");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0)) throw ConfigError("epsilons must be positive");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw ConfigError("epsilons must be strictly decreasing");
    }
}

// Runs `row(k)` for every k, fanning out over at most `threads` workers.
template <class Fn>
void for_each_row(std::size_t count, unsigned threads, Fn&& row) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (threads == 1) {
        for (std::size_t k = 0; k < count; ++k) row(k);
        return;
    }
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t k = w; k < count; k += threads) row(k);
        });
}

// Reduced-run samples on the grid; columns (S, x_1..x_n).
std::vector<numerics::State> reduced_samples(const numerics::Rhs& rhs, numerics::State init,
                                             double T, std::span<const double> grid,
                                             const numerics::IntegratorConfig& cfg) {
    const auto traj = numerics::integrate(rhs, init, 0.0, T, cfg);
    return traj.sample(grid);
}

} // namespace

std::string ConvergenceTable::to_csv() const {
    std::ostringstream out;
    out << "epsilon,err_S,err_x,err_u,err_v\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : rows) {
        out << format_double(r.epsilon) << ',' << format_double(r.failed ? nan : r.err_S) << ','
            << format_double(r.failed ? nan : r.err_x) << ','
            << format_double(r.failed ? nan : r.err_u) << ','
            << format_double(r.failed ? nan : r.err_v) << '\n';
    }
    return out.str();
}

ConvergenceTable tikhonov_convergence(const FullModel& model, const FullState& init, double T,
                                      double t0, std::span<const double> epsilons,
                                      const numerics::IntegratorConfig& config, unsigned threads) {
    model.validate();
    check_sweep(T, t0, epsilons);
    if (!(init.u > 0.0)) throw ConfigError("tikhonov sweep requires u0 > 0");
    if (!(init.S >= 0.0 && init.v >= 0.0)) throw ConfigError("initial state must be nonnegative");

    const ReducedModel reduced(model);
    const auto grid = numerics::uniform_grid(0.0, T, config.output_points);
    const numerics::Rhs reduced_rhs = [&reduced](double, std::span<const double> y,
                                                 std::span<double> dy) { reduced.rhs_vec(y, dy); };
    const auto red = reduced_samples(reduced_rhs, {init.S, init.u + init.v}, T, grid, config);

    std::vector<double> u_pred(grid.size()), v_pred(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double x = std::max(0.0, red[k][1]);
        const double p = reduced.fraction(std::max(0.0, red[k][0]), x).p;
        u_pred[k] = p * x;
        v_pred[k] = (1.0 - p) * x;
    }

    ConvergenceTable table;
    table.rows.resize(epsilons.size());
    for_each_row(epsilons.size(), threads, [&](std::size_t r) {
        ConvergenceRow& row = table.rows[r];
        row.epsilon = epsilons[r];
        FullModel m = model;
        m.epsilon = epsilons[r];
        const numerics::Rhs rhs = [&m](double, std::span<const double> y, std::span<double> dy) {
            rhs_full_vec(m, y, dy);
        };
        try {
            const std::array<double, 3> y0{init.S, init.u, init.v};
            const auto full = numerics::integrate(rhs, y0, 0.0, T, config).sample(grid);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const auto& y = full[k];
                row.err_S = std::max(row.err_S, std::abs(y[0] - red[k][0]));
                row.err_x = std::max(row.err_x, std::abs(y[1] + y[2] - red[k][1]));
                const double eu = std::abs(y[1] - u_pred[k]);
                row.err_u_with_layer = std::max(row.err_u_with_layer, eu);
                if (grid[k] >= t0) {
                    row.err_u = std::max(row.err_u, eu);
                    row.err_v = std::max(row.err_v, std::abs(y[2] - v_pred[k]));
                }
            }
        } catch (const NumericError& e) {
            row.failed = true;
            row.failure = e.what();
        }
    });
    return table;
}

ConvergenceTable tikhonov_convergence_multi(const MultiSpeciesModel& model,
                                            const MultiState& init, double T, double t0,
                                            std::span<const double> epsilons,
                                            const numerics::IntegratorConfig& config,
                                            unsigned threads) {
    model.validate();
    check_sweep(T, t0, epsilons);
    const std::size_t n = model.species();
    if (init.u.size() != n || init.v.size() != n)
        throw ConfigError("initial state: dimension mismatch");
    for (std::size_t i = 0; i < n; ++i)
        if (!(init.u[i] > 0.0)) throw ConfigError("tikhonov sweep requires u_i(0) > 0");

    const MultiReducedModel reduced(model);
    const auto grid = numerics::uniform_grid(0.0, T, config.output_points);
    numerics::State x0{init.S};
    for (std::size_t i = 0; i < n; ++i) x0.push_back(init.u[i] + init.v[i]);
    const numerics::Rhs reduced_rhs = [&reduced](double, std::span<const double> y,
                                                 std::span<double> dy) { reduced.rhs_vec(y, dy); };
    const auto red = reduced_samples(reduced_rhs, x0, T, grid, config);

    std::vector<std::vector<double>> u_pred(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = std::max(0.0, red[k][1 + i]);
        u_pred[k] = reduced.quasi_steady_u(x);
    }

    ConvergenceTable table;
    table.rows.resize(epsilons.size());
    for_each_row(epsilons.size(), threads, [&](std::size_t r) {
        ConvergenceRow& row = table.rows[r];
        row.epsilon = epsilons[r];
        MultiSpeciesModel m = model;
        m.epsilon = epsilons[r];
        const numerics::Rhs rhs = [&m](double, std::span<const double> y, std::span<double> dy) {
            rhs_multi_vec(m, y, dy);
        };
        try {
            const auto full = numerics::integrate(rhs, init.pack(), 0.0, T, config).sample(grid);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const auto& y = full[k];
                row.err_S = std::max(row.err_S, std::abs(y[0] - red[k][0]));
                for (std::size_t i = 0; i < n; ++i) {
                    const double u = y[1 + i], v = y[1 + n + i], xbar = red[k][1 + i];
                    row.err_x = std::max(row.err_x, std::abs(u + v - xbar));
                    const double eu = std::abs(u - u_pred[k][i]);
                    row.err_u_with_layer = std::max(row.err_u_with_layer, eu);
                    if (grid[k] >= t0) {
                        row.err_u = std::max(row.err_u, eu);
                        row.err_v = std::max(row.err_v, std::abs(v - (xbar - u_pred[k][i])));
                    }
                }
            }
        } catch (const NumericError& e) {
            row.failed = true;
            row.failure = e.what();
        }
    });
    return table;
}

} // namespace flocsim
