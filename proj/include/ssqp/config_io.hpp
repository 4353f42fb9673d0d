#pragma once

#include <string>

#include "ssqp/config.hpp"

namespace ssqp {

/// Reads a JSON object whose keys are SolverConfig field names (L, Gamma,
/// tau_init, ..., term_tol_c) on top of `base`. beta_schedule is either a
/// number (constant schedule) or {"kind", "beta", "decay"}; step_rule is
/// "suff" or "max". Unknown keys are rejected.
SolverConfig parse_solver_config(const std::string& text, SolverConfig base = {});
SolverConfig load_solver_config(const std::string& path, SolverConfig base = {});

std::string dump_solver_config(const SolverConfig& config);

}  // namespace ssqp
