#include "flocsim/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "flocsim/format.hpp"

namespace flocsim::io {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kReportSchema = 1;

// JSON has no infinity; thresholds at +inf are written as the string "inf".
ordered_json threshold(const single::Threshold& t) {
    if (t.is_infinite()) return "inf";
    return t.value();
}

ordered_json complex_list(std::span<const numerics::Complex> values) {
    ordered_json out = ordered_json::array();
    for (const auto& v : values) out.push_back({{"re", v.real()}, {"im", v.imag()}});
    return out;
}

ordered_json matrix(const Eigen::MatrixXd& m) {
    ordered_json out = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(row);
    }
    return out;
}

ordered_json header(const char* report) {
    return ordered_json{{"schema", kReportSchema}, {"report", report}};
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

} // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw Error("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string trajectory_csv(const numerics::Trajectory& trajectory,
                           const std::vector<std::string>& columns,
                           const std::vector<double>& grid) {
    if (columns.size() != trajectory.dimension())
        throw ConfigError("trajectory_csv: column count does not match the state dimension");
    std::ostringstream out;
    out << 't';
    for (const auto& c : columns) out << ',' << c;
    out << '\n';
    const auto rows = trajectory.sample(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        out << format_double(grid[k]);
        for (double y : rows[k]) out << ',' << format_double(y);
        out << '\n';
    }
    return out.str();
}

std::string nullclines_csv(const ReducedModel& model, std::size_t points) {
    if (points < 2) throw ConfigError("nullclines need at least two points");
    const auto xs = numerics::uniform_grid(0.0, single::x_upper_bound(model), points);
    std::ostringstream out;
    out << "x,phi,gamma\n";
    for (double x : xs) {
        const auto p = single::phi(model, x);
        out << format_double(x) << ',' << (p ? format_double(*p) : "") << ','
            << format_double(single::gamma(model, x)) << '\n';
    }
    return out.str();
}

std::string separatrix_csv(const single::Separatrix& separatrix) {
    std::ostringstream out;
    out << "branch,S,x\n";
    for (std::size_t b = 0; b < separatrix.branches.size(); ++b)
        for (const auto& p : separatrix.branches[b])
            out << b << ',' << format_double(p[0]) << ',' << format_double(p[1]) << '\n';
    return out.str();
}

std::string equilibria_json(const single::EquilibriumReport& report) {
    ordered_json j = header("equilibria");
    j["lambda0"] = threshold(report.break_even.lambda0);
    j["lambda1"] = threshold(report.break_even.lambda1);
    j["regime"] = single::to_string(report.regime);
    j["x_max"] = report.x_max;
    ordered_json list = ordered_json::array();
    for (const auto& e : report.equilibria) {
        ordered_json item{{"kind", single::to_string(e.kind)},
                          {"S", e.S},
                          {"x", e.x},
                          {"stability", single::to_string(e.classification)},
                          {"stable", e.stable()},
                          {"degenerate", e.degenerate},
                          {"eigenvalues", complex_list(e.eigenvalues)},
                          {"jacobian", matrix(e.jacobian)}};
        if (e.nullcline_slope_gap) item["nullcline_slope_gap"] = *e.nullcline_slope_gap;
        list.push_back(std::move(item));
    }
    j["equilibria"] = std::move(list);
    return dump(j);
}

std::string hypotheses_json(const single::HypothesisReport& report) {
    ordered_json j = header("hypotheses");
    ordered_json list = ordered_json::array();
    for (std::size_t k = 0; k < report.results.size(); ++k) {
        const auto& r = report.results[k];
        ordered_json item{{"name", "H" + std::to_string(k)},
                          {"status", single::to_string(r.status)},
                          {"worst_margin", r.worst_margin}};
        if (r.witness)
            item["witness"] = {{"S", r.witness->S},
                               {"x", r.witness->x},
                               {"residual", r.witness->residual},
                               {"inequality", r.witness->inequality}};
        list.push_back(std::move(item));
    }
    j["hypotheses"] = std::move(list);
    j["holds"] = report.holds();
    return dump(j);
}

std::string multi_equilibrium_json(const multi::DiagonalMultiModel& model,
                                   const std::optional<multi::MultiEquilibrium>& equilibrium) {
    ordered_json j = header("multi_equilibrium");
    ordered_json species = ordered_json::array();
    for (std::size_t i = 0; i < model.species(); ++i)
        species.push_back({{"lambda0", threshold(model.break_even(i).lambda0)},
                           {"lambda1", threshold(model.break_even(i).lambda1)}});
    j["species"] = std::move(species);
    j["lambda0_max"] = threshold(model.lambda0_max());
    j["lambda1_min"] = threshold(model.lambda1_min());
    j["exists"] = equilibrium.has_value();
    if (equilibrium) {
        j["criterion"] = equilibrium->criterion;
        j["S_star"] = equilibrium->S_star;
        j["x_star"] = equilibrium->x_star;
        j["stable"] = equilibrium->stable;
        j["mass_residual"] = equilibrium->mass_residual;
        j["growth_residual"] = equilibrium->growth_residual;
        j["eigenvalues"] = complex_list(equilibrium->eigenvalues);
        j["jacobian"] = matrix(equilibrium->jacobian);
    }
    return dump(j);
}

std::string validate_report_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("report is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("schema") || j["schema"] != kReportSchema)
        throw ConfigError("report: missing or unsupported schema");
    if (!j.contains("report") || !j["report"].is_string())
        throw ConfigError("report: missing report tag");
    const auto tag = j["report"].get<std::string>();
    auto require = [&](std::initializer_list<const char*> keys) {
        for (const char* k : keys)
            if (!j.contains(k)) throw ConfigError("report '" + tag + "': missing field " + k);
    };
    if (tag == "equilibria") {
        require({"lambda0", "lambda1", "regime", "x_max", "equilibria"});
        for (const auto& e : j["equilibria"])
            for (const char* k : {"kind", "S", "x", "stability", "eigenvalues", "jacobian"})
                if (!e.contains(k)) throw ConfigError("equilibrium entry misses field " + std::string(k));
    } else if (tag == "hypotheses") {
        require({"hypotheses", "holds"});
        if (j["hypotheses"].size() != 5) throw ConfigError("hypotheses report needs H0..H4");
    } else if (tag == "multi_equilibrium") {
        require({"species", "lambda0_max", "lambda1_min", "exists"});
        if (j["exists"].get<bool>()) require({"S_star", "x_star", "eigenvalues", "jacobian"});
    } else {
        throw ConfigError("report: unknown tag '" + tag + "'");
    }
    return tag;
}

} // namespace flocsim::io
