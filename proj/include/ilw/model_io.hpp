#pragma once

#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

#include "ilw/genveltman.hpp"
#include "ilw/veltman.hpp"

namespace ilw {

struct ModelFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// JSON layout shared by both kinds:
//   {"type": "ordinary" | "generalised",
//    "worlds": [names], "R": [[u, v], ...],
//    "S": {w: [[u, v], ...]}            ordinary
//    "S": {w: [{"u": u, "V": [..]}]}    generalised
//    "valuation": {var: [worlds]},
//    "complete_frame": true}            optional; adds the mandatory pairs
using AnyModel = std::variant<OrdinaryModel, GeneralisedModel>;

auto model_from_json(const nlohmann::json& j) -> AnyModel;
auto ordinary_from_json(const nlohmann::json& j) -> OrdinaryModel;
auto generalised_from_json(const nlohmann::json& j) -> GeneralisedModel;

auto to_json(const OrdinaryModel& m) -> nlohmann::json;
auto to_json(const GeneralisedModel& m) -> nlohmann::json;

auto load_model(const std::string& path) -> AnyModel;

// Graphviz text; R solid, S_w dashed and only where not implied by R or
// reflexivity. Ordered by world index.
auto to_dot(const OrdinaryModel& m, const std::string& name = "model") -> std::string;
auto to_dot(const GeneralisedModel& m, const std::string& name = "model") -> std::string;

}  // namespace ilw
