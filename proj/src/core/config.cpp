#include "config.hpp"

#include "error.hpp"

#include <json.hpp>

#include <cmath>
#include <set>

namespace anvar {

using nlohmann::json;

StandardConfig RunConfig::standard_for(double noise) const {
  if (standard_configs.empty())
    throw ConfigError("no standard (k, gamma) configuration available");
  auto best = standard_configs.begin();
  double dist = std::abs(best->first - noise);
  for (auto it = standard_configs.begin(); it != standard_configs.end(); ++it) {
    const double d = std::abs(it->first - noise);
    if (d < dist) {
      best = it;
      dist = d;
    }
  }
  return best->second;
}

void RunConfig::validate() const {
  if (dt <= 0.0) throw ConfigError("data.dt must be positive");
  if (integrator_tol <= 0.0) throw ConfigError("data.tolerance must be positive");
  if (warmup < 1 || train_len < 2 || test_len < 1)
    throw ConfigError("data split lengths must be positive");
  if (x0.size() != 3) throw ConfigError("system.x0 must have 3 components");
  if (seeds < 1) throw ConfigError("evaluation.seeds must be >= 1");
  if (horizons.empty()) throw ConfigError("evaluation.horizons must be nonempty");
  for (const Index h : horizons)
    if (h < 1 || h > test_len)
      throw ConfigError("every horizon must lie in [1, test length]");
  for (const double nl : noise_levels)
    if (nl < 0.0) throw ConfigError("noise levels must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("adaptive.dropout must be in [0, 1)");
  if (hidden < 1) throw ConfigError("adaptive.hidden must be >= 1");
  if (adam_epochs < 0 || lbfgs_max_iters < 0) throw ConfigError("training budgets must be >= 0");
  if (adam_lr <= 0.0) throw ConfigError("training.adam_lr must be positive");
  if (grid.k_min < 1 || grid.k_max < grid.k_min) throw ConfigError("grid_search k range invalid");
  if (!(grid.val_fraction > 0.0 && grid.val_fraction < 1.0))
    throw ConfigError("grid_search.val_fraction must be in (0, 1)");
}

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.contains(it.key()))
      throw ConfigError("unknown config key '" + where + it.key() + "'");
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void read_index_list(const json& obj, const char* key, std::vector<Index>& out) {
  if (!obj.contains(key)) return;
  out.clear();
  for (const auto& v : obj.at(key)) out.push_back(v.get<Index>());
}

} // namespace

RunConfig config_from_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");

  RunConfig c;
  reject_unknown(doc,
                 {"system", "data", "noise", "evaluation", "models", "standard", "adaptive",
                  "training", "skip_study", "grid_search", "output_dir", "jobs"},
                 "");
  try {
    if (doc.contains("system")) {
      const json& s = doc["system"];
      reject_unknown(s, {"sigma", "rho", "beta", "x0"}, "system.");
      read(s, "sigma", c.system.sigma);
      read(s, "rho", c.system.rho);
      read(s, "beta", c.system.beta);
      if (s.contains("x0")) c.x0 = s["x0"].get<std::vector<double>>();
    }
    if (doc.contains("data")) {
      const json& d = doc["data"];
      reject_unknown(d, {"dt", "tolerance", "warmup", "train", "test"}, "data.");
      read(d, "dt", c.dt);
      read(d, "tolerance", c.integrator_tol);
      read(d, "warmup", c.warmup);
      read(d, "train", c.train_len);
      read(d, "test", c.test_len);
    }
    if (doc.contains("noise")) {
      const json& n = doc["noise"];
      reject_unknown(n, {"levels", "mode"}, "noise.");
      if (n.contains("levels")) c.noise_levels = n["levels"].get<std::vector<double>>();
      if (n.contains("mode")) {
        const auto mode = n["mode"].get<std::string>();
        if (mode == "absolute")
          c.noise_mode = NoiseMode::Absolute;
        else if (mode == "relative")
          c.noise_mode = NoiseMode::RelativeToStd;
        else
          throw ConfigError("noise.mode must be 'absolute' or 'relative'");
      }
    }
    if (doc.contains("evaluation")) {
      const json& e = doc["evaluation"];
      reject_unknown(e, {"horizons", "seeds", "base_seed"}, "evaluation.");
      read_index_list(e, "horizons", c.horizons);
      read(e, "seeds", c.seeds);
      read(e, "base_seed", c.base_seed);
    }
    if (doc.contains("models")) {
      c.run_standard = false;
      c.run_adaptive = false;
      for (const auto& m : doc["models"]) {
        const auto name = m.get<std::string>();
        if (name == "standard")
          c.run_standard = true;
        else if (name == "adaptive")
          c.run_adaptive = true;
        else
          throw ConfigError("models entries must be 'standard' or 'adaptive'");
      }
    }
    if (doc.contains("standard")) {
      const json& s = doc["standard"];
      reject_unknown(s, {"s", "bias", "configs"}, "standard.");
      read(s, "s", c.standard_s);
      read(s, "bias", c.standard_bias);
      if (s.contains("configs")) {
        c.standard_configs.clear();
        for (const auto& entry : s["configs"]) {
          reject_unknown(entry, {"noise", "k", "gamma"}, "standard.configs.");
          c.standard_configs[entry.at("noise").get<double>()] = {
              entry.at("k").get<Index>(), entry.at("gamma").get<double>()};
        }
      }
    }
    if (doc.contains("adaptive")) {
      const json& a = doc["adaptive"];
      reject_unknown(a, {"k_clean", "k_noisy", "s", "hidden", "m", "dropout"}, "adaptive.");
      read(a, "k_clean", c.adaptive_k_clean);
      read(a, "k_noisy", c.adaptive_k_noisy);
      read(a, "s", c.adaptive_s);
      read(a, "hidden", c.hidden);
      read(a, "m", c.mlp_output);
      read(a, "dropout", c.dropout);
    }
    if (doc.contains("training")) {
      const json& t = doc["training"];
      reject_unknown(t, {"adam_lr", "adam_epochs", "lbfgs_max_iters", "lbfgs_memory"},
                     "training.");
      read(t, "adam_lr", c.adam_lr);
      read(t, "adam_epochs", c.adam_epochs);
      read(t, "lbfgs_max_iters", c.lbfgs_max_iters);
      read(t, "lbfgs_memory", c.lbfgs_memory);
    }
    if (doc.contains("skip_study")) {
      const json& s = doc["skip_study"];
      reject_unknown(s, {"s_values", "noise", "horizons"}, "skip_study.");
      read_index_list(s, "s_values", c.skip_values);
      read(s, "noise", c.skip_noise);
      read_index_list(s, "horizons", c.skip_horizons);
    }
    if (doc.contains("grid_search")) {
      const json& g = doc["grid_search"];
      reject_unknown(g, {"k_min", "k_max", "noise", "val_fraction", "val_horizon", "refine",
                         "gammas"},
                     "grid_search.");
      read(g, "k_min", c.grid.k_min);
      read(g, "k_max", c.grid.k_max);
      read(g, "noise", c.grid.noise);
      read(g, "val_fraction", c.grid.val_fraction);
      read(g, "val_horizon", c.grid.val_horizon);
      read(g, "refine", c.grid.refine);
      if (g.contains("gammas")) c.grid.gammas = g["gammas"].get<std::vector<double>>();
    }
    read(doc, "output_dir", c.output_dir);
    read(doc, "jobs", c.jobs);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

std::string config_to_json(const RunConfig& c) {
  json doc;
  doc["system"] = {{"sigma", c.system.sigma},
                   {"rho", c.system.rho},
                   {"beta", c.system.beta},
                   {"x0", c.x0}};
  doc["data"] = {{"dt", c.dt},
                 {"tolerance", c.integrator_tol},
                 {"warmup", c.warmup},
                 {"train", c.train_len},
                 {"test", c.test_len}};
  doc["noise"] = {{"levels", c.noise_levels},
                  {"mode", c.noise_mode == NoiseMode::Absolute ? "absolute" : "relative"}};
  doc["evaluation"] = {{"horizons", c.horizons}, {"seeds", c.seeds}, {"base_seed", c.base_seed}};
  json models = json::array();
  if (c.run_standard) models.push_back("standard");
  if (c.run_adaptive) models.push_back("adaptive");
  doc["models"] = models;
  json configs = json::array();
  for (const auto& [noise, sc] : c.standard_configs)
    configs.push_back({{"noise", noise}, {"k", sc.k}, {"gamma", sc.gamma}});
  doc["standard"] = {{"s", c.standard_s}, {"bias", c.standard_bias}, {"configs", configs}};
  doc["adaptive"] = {{"k_clean", c.adaptive_k_clean}, {"k_noisy", c.adaptive_k_noisy},
                     {"s", c.adaptive_s},             {"hidden", c.hidden},
                     {"m", c.mlp_output},             {"dropout", c.dropout}};
  doc["training"] = {{"adam_lr", c.adam_lr},
                     {"adam_epochs", c.adam_epochs},
                     {"lbfgs_max_iters", c.lbfgs_max_iters},
                     {"lbfgs_memory", c.lbfgs_memory}};
  doc["skip_study"] = {{"s_values", c.skip_values},
                       {"noise", c.skip_noise},
                       {"horizons", c.skip_horizons}};
  doc["grid_search"] = {{"k_min", c.grid.k_min},
                        {"k_max", c.grid.k_max},
                        {"noise", c.grid.noise},
                        {"val_fraction", c.grid.val_fraction},
                        {"val_horizon", c.grid.val_horizon},
                        {"refine", c.grid.refine},
                        {"gammas", c.grid.gammas}};
  doc["output_dir"] = c.output_dir;
  doc["jobs"] = c.jobs;
  return doc.dump(2);
}

} // namespace anvar
