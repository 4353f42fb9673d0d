#include "ssqp/config_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ssqp/errors.hpp"

namespace ssqp {

namespace {

using nlohmann::json;

template <class T>
void read(const json& j, const char* key, T& field) {
  if (const auto it = j.find(key); it != j.end()) field = it->get<T>();
}

}  // namespace

SolverConfig parse_solver_config(const std::string& text, SolverConfig base) {
  static const char* const kKeys[] = {"L",        "Gamma",    "tau_init", "chi_init",      "zeta_init",
                                      "xi_init",  "omega",    "eps_v",    "sigma",         "eps_tau",
                                      "eps_chi",  "eps_zeta", "eps_xi",   "eta",           "theta",
                                      "beta_schedule", "step_rule", "max_iter", "term_tol_jc", "term_tol_c",
                                      "normal_max_iter", "tangential_tol", "deterministic", "kkt_tol",
                                      "record_true_trial"};
  SolverConfig c = std::move(base);
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw UsageError("solver config must be a JSON object");
    for (const auto& [key, _] : j.items()) {
      if (std::find_if(std::begin(kKeys), std::end(kKeys), [&](const char* k) { return key == k; }) == std::end(kKeys)) {
        throw UsageError("unknown solver config key '" + key + "'");
      }
    }
    read(j, "L", c.L);
    read(j, "Gamma", c.Gamma);
    read(j, "tau_init", c.tau_init);
    read(j, "chi_init", c.chi_init);
    read(j, "zeta_init", c.zeta_init);
    read(j, "xi_init", c.xi_init);
    read(j, "omega", c.omega);
    read(j, "eps_v", c.eps_v);
    read(j, "sigma", c.sigma);
    read(j, "eps_tau", c.eps_tau);
    read(j, "eps_chi", c.eps_chi);
    read(j, "eps_zeta", c.eps_zeta);
    read(j, "eps_xi", c.eps_xi);
    read(j, "eta", c.eta);
    read(j, "theta", c.theta);
    read(j, "max_iter", c.max_iter);
    read(j, "term_tol_jc", c.term_tol_jc);
    read(j, "term_tol_c", c.term_tol_c);
    read(j, "normal_max_iter", c.normal_max_iter);
    read(j, "tangential_tol", c.tangential_tol);
    read(j, "deterministic", c.deterministic);
    read(j, "kkt_tol", c.kkt_tol);
    read(j, "record_true_trial", c.record_true_trial);
    if (const auto it = j.find("step_rule"); it != j.end()) c.step_rule = step_rule_from_string(it->get<std::string>());
    if (const auto it = j.find("beta_schedule"); it != j.end()) {
      if (it->is_number()) {
        c.beta_schedule = BetaSchedule::constant(it->get<double>());
      } else {
        BetaSchedule s = c.beta_schedule;
        if (const auto k = it->find("kind"); k != it->end()) s.kind = beta_kind_from_string(k->get<std::string>());
        read(*it, "beta", s.beta);
        read(*it, "decay", s.decay);
        c.beta_schedule = s;
      }
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("solver config: ") + e.what());
  }
  c.validate();
  return c;
}

SolverConfig load_solver_config(const std::string& path, SolverConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_solver_config(text.str(), std::move(base));
}

std::string dump_solver_config(const SolverConfig& c) {
  const json j = {{"L", c.L},
                  {"Gamma", c.Gamma},
                  {"tau_init", c.tau_init},
                  {"chi_init", c.chi_init},
                  {"zeta_init", c.zeta_init},
                  {"xi_init", c.xi_init},
                  {"omega", c.omega},
                  {"eps_v", c.eps_v},
                  {"sigma", c.sigma},
                  {"eps_tau", c.eps_tau},
                  {"eps_chi", c.eps_chi},
                  {"eps_zeta", c.eps_zeta},
                  {"eps_xi", c.eps_xi},
                  {"eta", c.eta},
                  {"theta", c.theta},
                  {"beta_schedule",
                   {{"kind", to_string(c.beta_schedule.kind)},
                    {"beta", c.beta_schedule.beta},
                    {"decay", c.beta_schedule.decay}}},
                  {"step_rule", to_string(c.step_rule)},
                  {"max_iter", c.max_iter},
                  {"term_tol_jc", c.term_tol_jc},
                  {"term_tol_c", c.term_tol_c},
                  {"normal_max_iter", c.normal_max_iter},
                  {"tangential_tol", c.tangential_tol},
                  {"deterministic", c.deterministic},
                  {"kkt_tol", c.kkt_tol},
                  {"record_true_trial", c.record_true_trial}};
  return j.dump(2) + "\n";
}

}  // namespace ssqp
