#pragma once

#include <string>

#include "ccm/model.hpp"

namespace ccm {

// Model file grammar (JSON):
//   name        string
//   nodes       [{name, visibility: observed|latent, sort: classical|quantum, card}]
//   edges       [[from, to], ...]
//   mechanisms  {id: {kind: table, parents, rows}
//                   | {kind: expr, parents, expr}
//                   | {kind: measurement, quantum_parent, factors, setting_parents, outcomes, effects}}
//   exogenous   {id: {dist: [p...]} | {state: {dims, amplitudes | rho}}}
//   semantics   fixed_point | post_select
//   post_select {cut_edges: [[from, to]...], star_prior: uniform | {source: [p...]}}
// Unknown top-level keys (e.g. "expected") are ignored by the parser.
CausalModel parse_model(const std::string& json_text);
CausalModel load_model(const std::string& path);
std::string model_to_json(const CausalModel& m);

std::string read_file(const std::string& path);  // throws InvalidInput when unreadable

}  // namespace ccm
