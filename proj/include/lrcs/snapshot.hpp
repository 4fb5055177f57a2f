#pragma once

#include "lrcs/confidence_core.hpp"

#include <string>

namespace lrcs {

// JSON checkpoint of an LrState:
//   {"format": "lrcs-state", "version": 1,
//    "config": {"model": {...}, "radius", "lambda", "alpha", "weighting",
//               "estimator_uses_weights", "vaw", "solver": {...}},
//    "dim": d,
//    "rounds": [{"x": [...], "y", "w", "theta_hat": [...], "est_nll", "solver_converged"}, ...]}
// Restoring replays the stored rounds without refitting the estimator sequence.
std::string state_to_json(const LrState& state);
LrState state_from_json(const std::string& text);

void save_state(const LrState& state, const std::string& path);
LrState load_state(const std::string& path);

}  // namespace lrcs
