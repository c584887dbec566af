// flocsim: command-line front end for scenario-driven simulations and
// analyses. Exit status 0 on success, 2 on configuration errors, 3 on
// numerical failures.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "flocsim/analysis_multi.hpp"
#include "flocsim/analysis_single.hpp"
#include "flocsim/io.hpp"
#include "flocsim/reduction.hpp"
#include "flocsim/scenario.hpp"
#include "flocsim/svg.hpp"

namespace fs = std::filesystem;
using namespace flocsim;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Options {
    std::string scenario;
    std::string out;
    std::string epsilons;
    std::size_t grid = 0;
    double tol = 0.0;
    std::uint64_t seed = 1;
    bool reduced = false;
};

struct Context {
    Scenario scenario;
    Options opts;
    fs::path out;

    std::size_t grid(std::size_t fallback) const { return opts.grid ? opts.grid : fallback; }
};

unsigned worker_threads() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FLOCSIM_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v < 1) throw ConfigError("FLOCSIM_THREADS must be a positive integer");
            n = static_cast<unsigned>(v);
        } catch (const std::logic_error&) {
            throw ConfigError("FLOCSIM_THREADS must be a positive integer");
        }
    }
    return n;
}

std::vector<double> parse_epsilons(const std::string& list) {
    std::vector<double> out;
    std::stringstream in(list);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw ConfigError("--epsilons: cannot parse '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("--epsilons: empty list");
    return out;
}

Context load(const Options& opts) {
    Context ctx{load_scenario(opts.scenario), opts, {}};
    if (opts.tol > 0.0) {
        ctx.scenario.integrator.rel_tol = opts.tol;
        ctx.scenario.integrator.validate();
    } else if (opts.tol < 0.0) {
        throw ConfigError("--tol must be positive");
    }
    ctx.out = opts.out.empty() ? fs::path(ctx.scenario.output_dir) : fs::path(opts.out);
    return ctx;
}

void emit(const fs::path& path, const std::string& content) {
    io::write_file_atomic(path, content);
    std::cout << "wrote " << path.string() << '\n';
}

std::vector<std::string> indexed(const std::string& stem, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(stem + "_" + std::to_string(i + 1));
    return out;
}

int run_simulate(const Context& ctx) {
    const auto& sc = ctx.scenario;
    const auto grid = numerics::uniform_grid(0.0, sc.horizon, sc.integrator.output_points);
    std::vector<std::string> columns{"S"};
    numerics::Rhs rhs;
    std::vector<double> y0;
    std::optional<MultiReducedModel> multi_reduced;
    std::optional<ReducedModel> single_reduced;

    if (!sc.is_multi()) {
        const auto& m = sc.single_model();
        const auto& init = std::get<FullState>(sc.initial);
        if (ctx.opts.reduced) {
            single_reduced.emplace(m);
            rhs = [&r = *single_reduced](double, std::span<const double> y, std::span<double> dy) {
                r.rhs_vec(y, dy);
            };
            y0 = {init.S, init.u + init.v};
            columns.push_back("x");
        } else {
            rhs = [&m](double, std::span<const double> y, std::span<double> dy) {
                rhs_full_vec(m, y, dy);
            };
            y0 = {init.S, init.u, init.v};
            columns.insert(columns.end(), {"u", "v"});
        }
    } else {
        const auto& m = sc.multi_model();
        const auto& init = std::get<MultiState>(sc.initial);
        const std::size_t n = m.species();
        if (ctx.opts.reduced) {
            multi_reduced.emplace(m);
            rhs = [&r = *multi_reduced](double, std::span<const double> y, std::span<double> dy) {
                r.rhs_vec(y, dy);
            };
            y0 = {init.S};
            for (std::size_t i = 0; i < n; ++i) y0.push_back(init.u[i] + init.v[i]);
            const auto xs = indexed("x", n);
            columns.insert(columns.end(), xs.begin(), xs.end());
        } else {
            rhs = [&m](double, std::span<const double> y, std::span<double> dy) {
                rhs_multi_vec(m, y, dy);
            };
            y0 = init.pack();
            const auto us = indexed("u", n), vs = indexed("v", n);
            columns.insert(columns.end(), us.begin(), us.end());
            columns.insert(columns.end(), vs.begin(), vs.end());
        }
    }
    const auto traj = numerics::integrate(rhs, y0, 0.0, sc.horizon, sc.integrator);
    emit(ctx.out / (ctx.opts.reduced ? "trajectory_reduced.csv" : "trajectory.csv"),
         io::trajectory_csv(traj, columns, grid));
    return 0;
}

int run_reduce_compare(const Context& ctx) {
    const auto& sc = ctx.scenario;
    std::vector<double> eps = !ctx.opts.epsilons.empty() ? parse_epsilons(ctx.opts.epsilons)
                              : !sc.epsilons.empty()     ? sc.epsilons
                                                         : std::vector<double>{1e-1, 1e-2, 1e-3};
    const unsigned threads = worker_threads();
    const ConvergenceTable table =
        sc.is_multi()
            ? tikhonov_convergence_multi(sc.multi_model(), std::get<MultiState>(sc.initial),
                                         sc.horizon, sc.layer_time, eps, sc.integrator, threads)
            : tikhonov_convergence(sc.single_model(), std::get<FullState>(sc.initial), sc.horizon,
                                   sc.layer_time, eps, sc.integrator, threads);
    emit(ctx.out / "convergence.csv", table.to_csv());
    for (const auto& row : table.rows)
        if (row.failed) {
            std::cerr << "epsilon " << row.epsilon << ": " << row.failure << '\n';
            return kExitNumeric;
        }
    return 0;
}

multi::DiagonalMultiModel diagonal_model(const Scenario& sc) {
    return multi::DiagonalMultiModel(MultiReducedModel(sc.multi_model()));
}

int run_multi_equilibrium(const Context& ctx) {
    const auto model = diagonal_model(ctx.scenario);
    const auto eq = multi::solve_positive_equilibrium(model);
    emit(ctx.out / "multi_equilibrium.json", io::multi_equilibrium_json(model, eq));
    if (eq)
        std::cout << "positive equilibrium at S* = " << eq->S_star << '\n';
    else
        std::cout << "no positive equilibrium: H(max lambda0) >= 0\n";
    return 0;
}

int run_equilibria(const Context& ctx) {
    if (ctx.scenario.is_multi()) return run_multi_equilibrium(ctx);
    const ReducedModel model(ctx.scenario.single_model());
    single::ScanOptions scan;
    if (ctx.opts.grid) scan.points = ctx.opts.grid;
    const auto report = single::find_equilibria(model, scan);
    emit(ctx.out / "equilibria.json", io::equilibria_json(report));
    for (const auto& e : report.equilibria)
        std::cout << single::to_string(e.kind) << " (" << e.S << ", " << e.x
                  << "): " << single::to_string(e.classification) << '\n';
    return 0;
}

int run_hypotheses(const Context& ctx) {
    if (ctx.scenario.is_multi()) {
        const auto model = diagonal_model(ctx.scenario);
        const auto report = multi::check_multi_hypotheses(model);
        for (std::size_t i = 0; i < report.species.size(); ++i)
            emit(ctx.out / ("hypotheses_species_" + std::to_string(i + 1) + ".json"),
                 io::hypotheses_json(report.species[i]));
        for (const auto& line : report.violations()) std::cout << "violated: " << line << '\n';
        return 0;
    }
    const ReducedModel model(ctx.scenario.single_model());
    const auto report = single::check_hypotheses(model);
    emit(ctx.out / "hypotheses.json", io::hypotheses_json(report));
    for (std::size_t k = 0; k < report.results.size(); ++k)
        std::cout << 'H' << k << ": " << single::to_string(report[k].status) << '\n';
    return 0;
}

void mark_equilibria(svg::Plot& plot, const single::EquilibriumReport& report, bool s_vertical) {
    for (const auto& e : report.equilibria) {
        const std::string color = e.stable() ? "black" : "#d62728";
        const std::string label = single::to_string(e.classification);
        if (s_vertical)
            plot.add_marker(e.x, e.S, e.stable(), color, label);
        else
            plot.add_marker(e.S, e.x, e.stable(), color, label);
    }
}

int run_nullclines(const Context& ctx) {
    const ReducedModel model(ctx.scenario.single_model());
    const std::size_t points = ctx.grid(400);
    emit(ctx.out / "nullclines.csv", io::nullclines_csv(model, points));

    const auto report = single::find_equilibria(model);
    double x_end = 0.0;
    for (const auto& e : report.equilibria) x_end = std::max(x_end, e.x);
    x_end = std::min(report.x_max, std::max(2.0 * x_end, 0.25 * report.x_max));

    std::vector<std::array<double, 2>> phi_line, gamma_line;
    for (double x : numerics::uniform_grid(0.0, x_end, points)) {
        if (const auto p = single::phi(model, x)) phi_line.push_back({x, *p});
        gamma_line.push_back({x, single::gamma(model, x)});
    }
    svg::Plot plot("Nullclines", "x", "S");
    plot.set_range(0.0, x_end, 0.0, 1.1 * std::max(model.S_in(), report.break_even.lambda0.is_finite()
                                                                    ? report.break_even.lambda0.value()
                                                                    : model.S_in()));
    plot.add_line(phi_line, {kPalette[0], 2.0, false}, "S = phi(x)");
    plot.add_line(gamma_line, {kPalette[1], 2.0, false}, "S = gamma(x)");
    mark_equilibria(plot, report, true);
    emit(ctx.out / "nullclines.svg", plot.render());
    return 0;
}

int run_phase(const Context& ctx) {
    const auto& sc = ctx.scenario;
    const ReducedModel model(sc.single_model());
    const auto report = single::find_equilibria(model);
    double x_end = 0.0;
    for (const auto& e : report.equilibria) x_end = std::max(x_end, e.x);
    x_end = std::min(report.x_max, std::max(2.0 * x_end, 0.25 * report.x_max));
    const double s_end = sc.single_model().S_in * 1.05;

    svg::Plot plot("Phase portrait", "S", "x");
    plot.set_range(0.0, s_end, 0.0, x_end);

    const std::size_t n = ctx.grid(16);
    const double hs = s_end / static_cast<double>(n), hx = x_end / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double s = (static_cast<double>(i) + 0.5) * hs;
            const double x = (static_cast<double>(k) + 0.5) * hx;
            const auto d = model.rhs(s, x);
            const double len = std::hypot(d[0] / hs, d[1] / hx);
            if (len == 0.0) continue;
            plot.add_arrow(s, x, 0.4 * d[0] / len, 0.4 * d[1] / len * hx / hs, "#999999");
        }

    std::mt19937_64 rng(ctx.opts.seed);
    std::uniform_real_distribution<double> us(0.0, s_end), ux(0.0, x_end);
    for (int t = 0; t < 12; ++t) {
        const double s0 = us(rng), x0 = ux(rng);
        const auto traj = single::simulate(model, s0, x0, 100.0, sc.integrator);
        std::vector<std::array<double, 2>> pts;
        for (std::size_t j = 0; j < traj.size(); ++j) pts.push_back({traj.state(j)[0], traj.state(j)[1]});
        plot.add_line(pts, {kPalette[2], 1.0, false});
    }

    for (const auto& e : report.equilibria) {
        if (e.classification != single::Stability::Saddle) continue;
        const auto sep = single::separatrix(model, e, 200.0, sc.integrator);
        emit(ctx.out / "separatrix.csv", io::separatrix_csv(sep));
        for (const auto& branch : sep.branches)
            plot.add_line({branch.begin(), branch.end()}, {"black", 2.0, true});
    }
    mark_equilibria(plot, report, false);
    emit(ctx.out / "phase.svg", plot.render());
    return 0;
}

int run_multispecies(const Context& ctx) {
    const auto model = diagonal_model(ctx.scenario);
    const auto curves = multi::h_curves(model, ctx.grid(512));
    emit(ctx.out / "h_curves.csv", curves.to_csv());

    svg::Plot plot("Consumption curves", "S", "h");
    std::vector<std::array<double, 2>> supply, total;
    for (std::size_t k = 0; k < curves.S.size(); ++k) {
        supply.push_back({curves.S[k], model.D() * (model.S_in() - curves.S[k])});
        total.push_back({curves.S[k], curves.H[k] + supply.back()[1]});
    }
    for (std::size_t i = 0; i < curves.h.size(); ++i) {
        std::vector<std::array<double, 2>> line;
        for (std::size_t k = 0; k < curves.S.size(); ++k) line.push_back({curves.S[k], curves.h[i][k]});
        plot.add_line(line, {kPalette[i % std::size(kPalette)], 1.5, false},
                      "h_" + std::to_string(i + 1));
    }
    plot.add_line(total, {"black", 2.0, false}, "sum h_i");
    plot.add_line(supply, {"black", 1.5, true}, "D (S_in - S)");
    double y_top = model.D() * model.S_in();
    for (const auto& p : total) y_top = std::max(y_top, std::min(p[1], 2.0 * model.D() * model.S_in()));
    plot.set_range(0.0, curves.S.back(), 0.0, 1.05 * y_top);

    const auto eq = multi::solve_positive_equilibrium(model);
    if (eq) plot.add_marker(eq->S_star, model.D() * (model.S_in() - eq->S_star), true, "black", "S*");
    emit(ctx.out / "h_curves.svg", plot.render());
    emit(ctx.out / "multi_equilibrium.json", io::multi_equilibrium_json(model, eq));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"flocsim: chemostat models with flocculation"};
    app.require_subcommand(1);
    Options opts;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", opts.scenario, "scenario JSON file")->required();
        sub->add_option("--out", opts.out, "output directory (overrides the scenario)");
        sub->add_option("--grid", opts.grid, "grid size for scans and plots");
        sub->add_option("--tol", opts.tol, "integrator relative tolerance");
        sub->add_option("--seed", opts.seed, "seed for randomized sampling");
        return sub;
    };

    struct Command {
        CLI::App* app;
        int (*run)(const Context&);
    };
    std::vector<Command> commands;
    auto* simulate = add_common(app.add_subcommand("simulate", "full or reduced trajectory CSV"));
    simulate->add_flag("--reduced", opts.reduced, "integrate the reduced model");
    commands.push_back({simulate, run_simulate});
    auto* compare = add_common(app.add_subcommand("reduce-compare", "full vs reduced error table"));
    compare->add_option("--epsilons", opts.epsilons, "comma-separated epsilons");
    commands.push_back({compare, run_reduce_compare});
    commands.push_back({add_common(app.add_subcommand("equilibria", "equilibrium report JSON")),
                        run_equilibria});
    commands.push_back({add_common(app.add_subcommand("hypotheses", "hypothesis check JSON")),
                        run_hypotheses});
    commands.push_back({add_common(app.add_subcommand("nullclines", "nullcline CSV and SVG")),
                        run_nullclines});
    commands.push_back({add_common(app.add_subcommand("phase", "phase portrait SVG")), run_phase});
    commands.push_back({add_common(app.add_subcommand("multispecies", "h-curves and equilibrium")),
                        run_multispecies});

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        for (const auto& c : commands)
            if (c.app->parsed()) return c.run(load(opts));
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const PreconditionError& e) {
        std::cerr << "unsupported model: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
