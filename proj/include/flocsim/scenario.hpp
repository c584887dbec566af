#pragma once

// Scenario files: versioned JSON (`"schema": 1`) describing a model,
// initial data, time horizon and requested analyses. Unknown fields are
// rejected with ConfigError before any computation starts.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "flocsim/models.hpp"
#include "flocsim/numerics.hpp"

namespace flocsim {

inline constexpr int kScenarioSchema = 1;

struct Scenario {
    std::string name;
    std::variant<FullModel, MultiSpeciesModel> model;
    /// Matches the model type.
    std::variant<FullState, MultiState> initial;
    double horizon = 20.0;
    /// Start of the window used for the u, v errors in reduce-compare.
    double layer_time = 1.0;
    std::vector<double> epsilons;
    std::vector<std::string> analyses;
    std::string output_dir = "out";
    numerics::IntegratorConfig integrator;

    bool is_multi() const noexcept { return model.index() == 1; }
    const FullModel& single_model() const;
    const MultiSpeciesModel& multi_model() const;
};

Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);

} // namespace flocsim
