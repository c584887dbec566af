#include "flocsim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace flocsim {

namespace {

using nlohmann::json;

const std::vector<std::string> kAnalyses = {"equilibria", "nullclines", "hypotheses",
                                            "tikhonov",   "separatrix", "multispecies"};

void expect_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    expect_object(j, where);
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
            throw ConfigError(where + ": unknown field '" + key + "'");
    }
}

const json& field(const json& j, const std::string& where, const char* key) {
    if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
    return j.at(key);
}

double number(const json& j, const std::string& where, const char* key) {
    const json& v = field(j, where, key);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return v.get<double>();
}

double number_or(const json& j, const std::string& where, const char* key, double fallback) {
    return j.contains(key) ? number(j, where, key) : fallback;
}

std::vector<double> numbers(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError(where + ": expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::string text(const json& j, const std::string& where, const char* key) {
    const json& v = field(j, where, key);
    if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

GrowthLaw parse_law(const json& j, const std::string& where) {
    expect_object(j, where);
    const std::string law = text(j, where, "law");
    if (law == "zero") {
        only_keys(j, where, {"law"});
        return GrowthLaw::zero();
    }
    if (law == "monod") {
        only_keys(j, where, {"law", "mu_max", "K"});
        return GrowthLaw::monod(number(j, where, "mu_max"), number(j, where, "K"));
    }
    throw ConfigError(where + ".law: unknown growth law '" + law + "'");
}

SubstrateRate parse_rate(const json& j, const std::string& where) {
    only_keys(j, where, {"offset", "law"});
    SubstrateRate r;
    r.offset = number_or(j, where, "offset", 0.0);
    if (j.contains("law")) r.law = parse_law(j.at("law"), where + ".law");
    return r;
}

AttachmentKinetics parse_kinetics(const json& j, const std::string& where) {
    expect_object(j, where);
    const std::string type = text(j, where, "type");
    if (type == "constant") {
        only_keys(j, where, {"type", "a", "b"});
        return kinetics::Constant{number(j, where, "a"), number(j, where, "b")};
    }
    if (type == "mass_action") {
        only_keys(j, where, {"type", "a", "b"});
        return kinetics::MassAction{number(j, where, "a"), number(j, where, "b")};
    }
    if (type == "total_density") {
        only_keys(j, where, {"type", "a", "b"});
        return kinetics::TotalDensity{number(j, where, "a"), number(j, where, "b")};
    }
    if (type == "substrate_dependent") {
        only_keys(j, where, {"type", "alpha", "beta"});
        return kinetics::SubstrateDependent{parse_rate(field(j, where, "alpha"), where + ".alpha"),
                                            parse_rate(field(j, where, "beta"), where + ".beta")};
    }
    if (type == "freter") {
        only_keys(j, where, {"type", "a", "b", "v_max", "G"});
        if (j.contains("G") && j.at("G") != "linear")
            throw ConfigError(where + ".G: only \"linear\" is supported");
        return kinetics::Freter{number(j, where, "a"), number(j, where, "b"),
                                number(j, where, "v_max"), DecreasingMap::linear()};
    }
    throw ConfigError(where + ".type: unknown kinetics '" + type + "'");
}

FullModel parse_single(const json& j) {
    const std::string w = "model";
    only_keys(j, w, {"type", "D", "S_in", "D0", "D1", "epsilon", "f", "g", "kinetics"});
    FullModel m;
    m.D = number(j, w, "D");
    m.S_in = number(j, w, "S_in");
    m.D0 = number(j, w, "D0");
    m.D1 = number(j, w, "D1");
    m.epsilon = number_or(j, w, "epsilon", 1e-2);
    m.f = parse_law(field(j, w, "f"), w + ".f");
    m.g = parse_law(field(j, w, "g"), w + ".g");
    m.kinetics = parse_kinetics(field(j, w, "kinetics"), w + ".kinetics");
    m.validate();
    return m;
}

MultiSpeciesModel parse_multi(const json& j) {
    const std::string w = "model";
    only_keys(j, w, {"type", "D", "S_in", "epsilon", "species", "A"});
    MultiSpeciesModel m;
    m.D = number(j, w, "D");
    m.S_in = number(j, w, "S_in");
    m.epsilon = number_or(j, w, "epsilon", 1e-2);
    const json& species = field(j, w, "species");
    if (!species.is_array() || species.empty())
        throw ConfigError("model.species: expected a nonempty array");
    const std::size_t n = species.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::string ws = "model.species[" + std::to_string(i) + "]";
        const json& s = species.at(i);
        only_keys(s, ws, {"f", "g", "D0", "D1", "a", "b"});
        m.f.push_back(parse_law(field(s, ws, "f"), ws + ".f"));
        m.g.push_back(parse_law(field(s, ws, "g"), ws + ".g"));
        m.D0.push_back(number(s, ws, "D0"));
        m.D1.push_back(number(s, ws, "D1"));
        m.b.push_back(number(s, ws, "b"));
    }
    m.A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    if (j.contains("A")) {
        for (std::size_t i = 0; i < n; ++i)
            if (species.at(i).contains("a"))
                throw ConfigError("model: give either A or per-species a, not both");
        const json& a = j.at("A");
        if (!a.is_array() || a.size() != n) throw ConfigError("model.A: expected an n x n array");
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = numbers(a.at(i), "model.A[" + std::to_string(i) + "]");
            if (row.size() != n) throw ConfigError("model.A: expected an n x n array");
            for (std::size_t k = 0; k < n; ++k)
                m.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const std::string ws = "model.species[" + std::to_string(i) + "]";
            m.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
                number(species.at(i), ws, "a");
        }
    }
    m.validate();
    return m;
}

numerics::IntegratorConfig parse_integrator(const json& j) {
    const std::string w = "integrator";
    only_keys(j, w, {"rel_tol", "abs_tol", "max_step", "max_steps", "output_points"});
    numerics::IntegratorConfig c;
    c.rel_tol = number_or(j, w, "rel_tol", c.rel_tol);
    c.abs_tol = number_or(j, w, "abs_tol", c.abs_tol);
    c.max_step = number_or(j, w, "max_step", c.max_step);
    if (j.contains("max_steps")) {
        if (!j.at("max_steps").is_number_unsigned())
            throw ConfigError("integrator.max_steps: expected a positive integer");
        c.max_steps = j.at("max_steps").get<std::size_t>();
    }
    if (j.contains("output_points")) {
        if (!j.at("output_points").is_number_unsigned())
            throw ConfigError("integrator.output_points: expected a positive integer");
        c.output_points = j.at("output_points").get<std::size_t>();
    }
    c.validate();
    return c;
}

} // namespace

const FullModel& Scenario::single_model() const {
    if (is_multi()) throw ConfigError("scenario describes a multi-species model");
    return std::get<FullModel>(model);
}

const MultiSpeciesModel& Scenario::multi_model() const {
    if (!is_multi()) throw ConfigError("scenario describes a single-species model");
    return std::get<MultiSpeciesModel>(model);
}

Scenario parse_scenario(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }
    only_keys(j, "scenario",
              {"schema", "name", "model", "initial", "horizon", "layer_time", "epsilons",
               "analyses", "output", "integrator"});
    const json& schema = field(j, "scenario", "schema");
    if (!schema.is_number_integer() || schema.get<int>() != kScenarioSchema)
        throw ConfigError("scenario.schema: expected " + std::to_string(kScenarioSchema));

    Scenario s;
    if (j.contains("name")) s.name = text(j, "scenario", "name");
    const json& model = field(j, "scenario", "model");
    expect_object(model, "model");
    const std::string type = text(model, "model", "type");
    if (type == "single")
        s.model = parse_single(model);
    else if (type == "multi")
        s.model = parse_multi(model);
    else
        throw ConfigError("model.type: expected \"single\" or \"multi\"");

    const json& init = field(j, "scenario", "initial");
    if (!s.is_multi()) {
        only_keys(init, "initial", {"S", "u", "v"});
        s.initial = FullState{number(init, "initial", "S"), number(init, "initial", "u"),
                              number(init, "initial", "v")};
    } else {
        only_keys(init, "initial", {"S", "u", "v"});
        MultiState ms;
        ms.S = number(init, "initial", "S");
        ms.u = numbers(field(init, "initial", "u"), "initial.u");
        ms.v = numbers(field(init, "initial", "v"), "initial.v");
        const std::size_t n = s.multi_model().species();
        if (ms.u.size() != n || ms.v.size() != n)
            throw ConfigError("initial: u and v need one entry per species");
        s.initial = ms;
    }

    s.horizon = number_or(j, "scenario", "horizon", s.horizon);
    s.layer_time = number_or(j, "scenario", "layer_time", s.layer_time);
    if (!(s.horizon > 0.0)) throw ConfigError("scenario.horizon must be positive");
    if (!(s.layer_time > 0.0 && s.layer_time < s.horizon))
        throw ConfigError("scenario.layer_time must lie in (0, horizon)");
    if (j.contains("epsilons")) s.epsilons = numbers(j.at("epsilons"), "scenario.epsilons");
    if (j.contains("analyses")) {
        const json& a = j.at("analyses");
        if (!a.is_array()) throw ConfigError("scenario.analyses: expected an array of strings");
        for (const auto& e : a) {
            if (!e.is_string()) throw ConfigError("scenario.analyses: expected strings");
            const auto name = e.get<std::string>();
            if (std::find(kAnalyses.begin(), kAnalyses.end(), name) == kAnalyses.end())
                throw ConfigError("scenario.analyses: unknown analysis '" + name + "'");
            s.analyses.push_back(name);
        }
    }
    if (j.contains("output")) s.output_dir = text(j, "scenario", "output");
    if (j.contains("integrator")) s.integrator = parse_integrator(j.at("integrator"));
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

} // namespace flocsim
