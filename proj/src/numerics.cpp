#include "flocsim/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

namespace flocsim::numerics {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension of order 4 (Hairer, Norsett and Wanner's DOPRI5).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// PI controller constants.
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - 0.75 * kBeta;
constexpr double kMinShrink = 0.2;  // h_new >= 0.2 h
constexpr double kMaxGrow = 10.0;   // h_new <= 10 h
constexpr double kDomainShrink = 0.25;

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Evaluates rhs and reports false if it threw DomainError or produced a
// non-finite value.
bool try_eval(const Rhs& rhs, double t, std::span<const double> y, std::span<double> dy) {
    if (!all_finite(y)) return false;
    try {
        rhs(t, y, dy);
    } catch (const DomainError&) {
        return false;
    }
    return all_finite(dy);
}

double weighted_rms(std::span<const double> v, std::span<const double> scale) {
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double r = v[i] / scale[i];
        sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(v.size()));
}

// Starting step after Hairer, Norsett & Wanner (II.4).
double initial_step(const Rhs& rhs, double t0, std::span<const double> y0,
                    std::span<const double> f0, const IntegratorConfig& cfg, double h_max) {
    const std::size_t n = y0.size();
    State scale(n), y1(n), f1(n);
    for (std::size_t i = 0; i < n; ++i) scale[i] = cfg.abs_tol + cfg.rel_tol * std::abs(y0[i]);
    const double d0 = weighted_rms(y0, scale);
    const double d1 = weighted_rms(f0, scale);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, h_max);
    for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + h0 * f0[i];
    if (!try_eval(rhs, t0 + h0, y1, f1)) return std::min(h0 * 1e-3, h_max);
    for (std::size_t i = 0; i < n; ++i) f1[i] -= f0[i];
    const double d2 = weighted_rms(f1, scale) / h0;
    const double dd = std::max(d1, d2);
    const double h1 = dd <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dd, 0.2);
    return std::min({100.0 * h0, h1, h_max});
}

} // namespace

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-3))
        throw ConfigError("rel_tol must lie in (0, 1e-3]");
    if (!(abs_tol > 0.0)) throw ConfigError("abs_tol must be positive");
    if (!(max_step > 0.0)) throw ConfigError("max_step must be positive");
    if (max_steps == 0) throw ConfigError("max_steps must be positive");
    if (output_points < 2) throw ConfigError("output grid needs at least two points");
}

std::span<const double> Trajectory::state(std::size_t i) const {
    return std::span<const double>(states_).subspan(i * dim_, dim_);
}

std::span<const double> Trajectory::slope(std::size_t i) const {
    return std::span<const double>(slopes_).subspan(i * dim_, dim_);
}

void Trajectory::append(double t, std::span<const double> y, std::span<const double> dy,
                        std::span<const double> extension) {
    if (!times_.empty() && !(t > times_.back()))
        throw NumericError("trajectory times must be strictly increasing");
    if (!extension.empty() && extension.size() != dim_)
        throw NumericError("dense output extension has the wrong dimension");
    times_.push_back(t);
    states_.insert(states_.end(), y.begin(), y.end());
    slopes_.insert(slopes_.end(), dy.begin(), dy.end());
    if (extension.empty())
        extension_.insert(extension_.end(), dim_, 0.0);
    else
        extension_.insert(extension_.end(), extension.begin(), extension.end());
}

State Trajectory::at(double t) const {
    if (times_.empty()) throw NumericError("empty trajectory");
    if (t < times_.front() || t > times_.back())
        throw DomainError("dense output requested outside the integrated span");
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - times_.begin());
    if (k == times_.size()) {
        auto last = back();
        return State(last.begin(), last.end());
    }
    k -= 1;
    const double h = times_[k + 1] - times_[k];
    const double theta = (t - times_[k]) / h;
    const double theta1 = 1.0 - theta;
    auto y0 = state(k), y1 = state(k + 1), f0 = slope(k), f1 = slope(k + 1);
    auto r5 = std::span<const double>(extension_).subspan((k + 1) * dim_, dim_);
    State out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        const double r2 = y1[i] - y0[i];
        const double r3 = h * f0[i] - r2;
        const double r4 = r2 - h * f1[i] - r3;
        out[i] = y0[i] + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5[i])));
    }
    return out;
}

std::vector<State> Trajectory::sample(std::span<const double> grid) const {
    std::vector<State> out;
    out.reserve(grid.size());
    for (double t : grid) out.push_back(at(t));
    return out;
}

Trajectory integrate(const Rhs& rhs, std::span<const double> init, double t0, double t1,
                     const IntegratorConfig& cfg, const StopCondition& stop) {
    cfg.validate();
    if (!(t1 > t0)) throw ConfigError("integration span must satisfy t1 > t0");
    const std::size_t n = init.size();
    if (n == 0) throw ConfigError("empty initial state");

    Trajectory traj(n);
    State y(init.begin(), init.end()), y_new(n), y_stage(n), err(n), scale(n), ext(n);
    std::array<State, 7> k;
    for (auto& ki : k) ki.assign(n, 0.0);

    rhs(t0, y, k[0]);
    if (!all_finite(k[0])) throw NumericError("right-hand side is not finite at the initial state");
    traj.append(t0, y, k[0]);

    const double span = t1 - t0;
    const double h_max = std::min(cfg.max_step, span);
    double h = initial_step(rhs, t0, y, k[0], cfg, h_max);
    double t = t0;
    double err_old = 1e-4;
    bool last_rejected = false;
    std::size_t steps = 0;
    const double eps = std::numeric_limits<double>::epsilon();

    auto stage = [&](int idx, double tc, std::initializer_list<std::pair<int, double>> terms) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (const auto& [j, a] : terms) acc += a * k[static_cast<std::size_t>(j)][i];
            y_stage[i] = y[i] + h * acc;
        }
        return try_eval(rhs, t + tc * h, y_stage, k[static_cast<std::size_t>(idx)]);
    };

    while (t < t1) {
        if (++steps > cfg.max_steps) throw IntegrationError("maximum number of steps exceeded", t);
        if (h < 10.0 * eps * std::max(1.0, std::abs(t)))
            throw IntegrationError("step size underflow", t);
        bool final_step = false;
        if (t + h >= t1 || t + 1.01 * h >= t1) {
            h = t1 - t;
            final_step = true;
        }

        bool ok = stage(1, c2, {{0, a21}}) && stage(2, c3, {{0, a31}, {1, a32}}) &&
                  stage(3, c4, {{0, a41}, {1, a42}, {2, a43}}) &&
                  stage(4, c5, {{0, a51}, {1, a52}, {2, a53}, {3, a54}}) &&
                  stage(5, 1.0, {{0, a61}, {1, a62}, {2, a63}, {3, a64}, {4, a65}});
        if (ok) {
            for (std::size_t i = 0; i < n; ++i)
                y_new[i] = y[i] + h * (a71 * k[0][i] + a73 * k[2][i] + a74 * k[3][i] +
                                       a75 * k[4][i] + a76 * k[5][i]);
            const double t_new = final_step ? t1 : t + h;
            ok = try_eval(rhs, t_new, y_new, k[6]);
        }
        if (!ok) {
            h *= kDomainShrink;
            last_rejected = true;
            continue;
        }

        for (std::size_t i = 0; i < n; ++i) {
            err[i] = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                          e6 * k[5][i] + e7 * k[6][i]);
            scale[i] = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        }
        const double e = weighted_rms(err, scale);
        const double fac_e = std::pow(e, kExpo);

        if (e <= 1.0) {
            double fac = fac_e / std::pow(err_old, kBeta) / kSafety;
            fac = std::clamp(fac, 1.0 / kMaxGrow, 1.0 / kMinShrink);
            double h_new = h / fac;
            if (last_rejected) h_new = std::min(h_new, h);
            err_old = std::max(e, 1e-4);
            for (std::size_t i = 0; i < n; ++i)
                ext[i] = h * (d1 * k[0][i] + d3 * k[2][i] + d4 * k[3][i] + d5 * k[4][i] +
                              d6 * k[5][i] + d7 * k[6][i]);
            t = final_step ? t1 : t + h;
            y.swap(y_new);
            k[0].swap(k[6]);
            traj.append(t, y, k[0], ext);
            last_rejected = false;
            h = std::min(h_new, h_max);
            if (stop && stop(t, y)) {
                if (t < t1) traj.mark_stopped();
                break;
            }
        } else {
            h /= std::min(1.0 / kMinShrink, fac_e / kSafety);
            last_rejected = true;
        }
    }
    return traj;
}

std::vector<double> uniform_grid(double a, double b, std::size_t n) {
    if (n < 2) throw ConfigError("uniform grid needs at least two points");
    std::vector<double> g(n);
    const double step = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = a + step * static_cast<double>(i);
    g.back() = b;
    return g;
}

Root find_root(const std::function<double(double)>& func, double lo, double hi, double tol,
               int max_iterations) {
    if (lo > hi) std::swap(lo, hi);
    const double f_lo = func(lo);
    const double f_hi = func(hi);
    if (!std::isfinite(f_lo) || !std::isfinite(f_hi))
        throw BracketError("function is not finite at the bracket ends");
    if (f_lo == 0.0) return {lo, 0.0, 0};
    if (f_hi == 0.0) return {hi, 0.0, 0};
    if ((f_lo < 0.0) == (f_hi < 0.0))
        throw BracketError("no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                           "]");

    const double eps = std::numeric_limits<double>::epsilon();
    auto done = [tol, eps](double a, double b) {
        return std::abs(b - a) <= std::max(tol, 4.0 * eps * std::max(std::abs(a), std::abs(b)));
    };
    std::uintmax_t iters = static_cast<std::uintmax_t>(max_iterations);
    auto [a, b] = boost::math::tools::toms748_solve(func, lo, hi, f_lo, f_hi, done, iters);
    if (!done(a, b) && static_cast<int>(iters) >= max_iterations) {
        const double fa = func(a), fb = func(b);
        if (fa != 0.0 && fb != 0.0)
            throw NumericError("find_root did not converge within the iteration cap");
    }
    const double fa = func(a);
    const double fb = func(b);
    const bool pick_a = std::abs(fa) <= std::abs(fb);
    double x = pick_a ? a : b;
    x = std::clamp(x, lo, hi);
    return {x, std::abs(pick_a ? fa : fb), static_cast<int>(iters)};
}

namespace {

// Diagonal similarity scaling by powers of two (Parlett & Reinsch) so that
// row and column norms are comparable before the QR iteration.
Eigen::MatrixXd balance(Eigen::MatrixXd a) {
    const Eigen::Index n = a.rows();
    constexpr double radix = 2.0;
    bool converged = false;
    while (!converged) {
        converged = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0.0, r = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                converged = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
    return a;
}

} // namespace

std::vector<Complex> eigenvalues(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw PreconditionError("eigenvalues: matrix must be square");
    if (m.rows() == 0) return {};
    if (m.rows() > 64) throw PreconditionError("eigenvalues: dimension above 64");
    if (!m.allFinite()) throw NumericError("eigenvalues: matrix has non-finite entries");

    std::vector<Complex> out;
    if (m.rows() == 1) {
        out.emplace_back(m(0, 0), 0.0);
    } else if (m.rows() == 2) {
        const double half_tr = 0.5 * (m(0, 0) + m(1, 1));
        const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        // Discriminant written to avoid cancellation for nearly equal diagonals.
        const double half_diff = 0.5 * (m(0, 0) - m(1, 1));
        const double disc = half_diff * half_diff + m(0, 1) * m(1, 0);
        if (disc >= 0.0) {
            const double root = std::sqrt(disc);
            const double big = half_tr + std::copysign(root, half_tr);
            const double small = big != 0.0 ? det / big : half_tr - root;
            out.emplace_back(big, 0.0);
            out.emplace_back(small, 0.0);
        } else {
            const double im = std::sqrt(-disc);
            out.emplace_back(half_tr, im);
            out.emplace_back(half_tr, -im);
        }
    } else {
        Eigen::EigenSolver<Eigen::MatrixXd> solver(balance(m), /*computeEigenvectors=*/false);
        if (solver.info() != Eigen::Success)
            throw NumericError("eigenvalues: QR iteration did not converge");
        const auto& ev = solver.eigenvalues();
        out.assign(ev.data(), ev.data() + ev.size());
    }
    std::sort(out.begin(), out.end(), [](const Complex& x, const Complex& y) {
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    return out;
}

} // namespace flocsim::numerics
