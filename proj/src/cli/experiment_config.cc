#include "marl/cli/experiment_config.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "marl/common/error.h"

namespace marl::cli {

namespace {

std::string join_path(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

std::string type_name(const Json& v) {
  if (v.is_boolean()) return "boolean";
  if (v.is_number_unsigned()) return "non-negative integer";
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  if (v.is_object()) return "object";
  return "null";
}

bool is_matrix(const Json& v) {
  if (!v.is_array()) return false;
  for (const auto& row : v) {
    if (!row.is_array()) return false;
    for (const auto& x : row) {
      if (!x.is_number()) return false;
    }
  }
  return true;
}

// Copies overlay leaves into `base` where the types agree; every mismatch
// and unknown key lands in `issues`.
void overlay_into(Json& base, const Json& overlay, const std::string& prefix,
                  std::vector<std::string>& issues) {
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    const std::string path = join_path(prefix, it.key());
    if (!base.contains(it.key())) {
      issues.push_back(path + ": unknown key");
      continue;
    }
    Json& slot = base[it.key()];
    const Json& v = it.value();
    bool ok = false;
    if (slot.is_object()) {
      if (v.is_object()) {
        overlay_into(slot, v, path, issues);
        continue;
      }
    } else if (slot.is_boolean() || slot.is_string()) {
      ok = v.type() == slot.type();
    } else if (slot.is_number_unsigned()) {
      ok = v.is_number_unsigned();
    } else if (slot.is_number_integer()) {
      ok = v.is_number_integer();
    } else if (slot.is_number_float()) {
      ok = v.is_number();
      if (ok) {
        slot = v.get<double>();
        continue;
      }
    } else if (slot.is_array()) {
      ok = is_matrix(v);
    }
    if (!ok) {
      issues.push_back(path + ": expected " + type_name(slot) + ", got " + type_name(v));
      continue;
    }
    slot = v;
  }
}

template <typename T, typename Fn>
T decode_enum(const Json& v, Fn parse, T fallback, std::vector<std::string>& issues) {
  try {
    return parse(v.get<std::string>());
  } catch (const ConfigError& e) {
    for (const auto& issue : e.issues()) issues.push_back(issue);
    return fallback;
  }
}

Json env_json(const envs::EnvConfig& env) {
  const auto& pp = env.predator_prey;
  return {{"kind", envs::to_string(env.kind)},
          {"matrix", {{"payoff", env.matrix.payoff}}},
          {"predator_prey",
           {{"width", pp.width},
            {"height", pp.height},
            {"n_predators", pp.n_predators},
            {"n_prey", pp.n_prey},
            {"episode_limit", pp.episode_limit},
            {"capture_reward", pp.capture_reward},
            {"lone_catch_penalty", pp.lone_catch_penalty},
            {"obs_radius", pp.obs_radius}}}};
}

Json trainer_json(const trainers::TrainerConfig& t) {
  return {{"algo", trainers::to_string(t.algo)},
          {"gamma", t.gamma},
          {"lambda", t.lambda},
          {"batch_size", t.batch_size},
          {"online_batch_size", t.online_batch_size},
          {"buffer_capacity", t.buffer_capacity},
          {"target_update_interval", t.target_update_interval},
          {"optimizer", trainers::to_string(t.optimizer)},
          {"lr", t.lr},
          {"critic_lr", t.critic_lr},
          {"clip_norm", t.clip_norm},
          {"entropy_coef", t.entropy_coef},
          {"alpha", t.alpha},
          {"workers", t.workers},
          {"total_env_steps", t.total_env_steps},
          {"hidden", t.hidden},
          {"mixer_embed", t.mixer_embed},
          {"attention_heads", t.attention_heads},
          {"constrain_monotonic", t.constrain_monotonic},
          {"offline_updates", t.offline_updates},
          {"epsilon",
           {{"start", t.epsilon.start},
            {"finish", t.epsilon.finish},
            {"anneal_steps", t.epsilon.anneal_steps}}},
          {"log_wall_clock", t.log_wall_clock}};
}

// `j` has exactly the layout of to_json.
ExperimentConfig decode(const Json& j, std::vector<std::string>& issues) {
  ExperimentConfig c;
  c.seed = j["seed"];
  c.n_seeds = j["n_seeds"];
  c.eval_interval = j["eval_interval"];
  c.test_episodes = j["test_episodes"];
  c.output_dir = j["output_dir"];

  const Json& e = j["env"];
  c.env.kind = decode_enum(e["kind"], envs::env_kind_from_string, envs::EnvKind::kMatrix, issues);
  c.env.matrix.payoff = e["matrix"]["payoff"].get<envs::Payoff>();
  const Json& pp = e["predator_prey"];
  auto& p = c.env.predator_prey;
  p.width = pp["width"];
  p.height = pp["height"];
  p.n_predators = pp["n_predators"];
  p.n_prey = pp["n_prey"];
  p.episode_limit = pp["episode_limit"];
  p.capture_reward = pp["capture_reward"];
  p.lone_catch_penalty = pp["lone_catch_penalty"];
  p.obs_radius = pp["obs_radius"];

  const Json& t = j["trainer"];
  auto& r = c.trainer;
  r.algo = decode_enum(t["algo"], trainers::algo_from_string, trainers::Algo::kQmix, issues);
  r.gamma = t["gamma"];
  r.lambda = t["lambda"];
  r.batch_size = t["batch_size"];
  r.online_batch_size = t["online_batch_size"];
  r.buffer_capacity = t["buffer_capacity"];
  r.target_update_interval = t["target_update_interval"];
  r.optimizer = decode_enum(t["optimizer"], trainers::optimizer_from_string,
                            nets::OptimizerKind::kAdam, issues);
  r.lr = t["lr"];
  r.critic_lr = t["critic_lr"];
  r.clip_norm = t["clip_norm"];
  r.entropy_coef = t["entropy_coef"];
  r.alpha = t["alpha"];
  r.workers = t["workers"];
  r.total_env_steps = t["total_env_steps"];
  r.hidden = t["hidden"];
  r.mixer_embed = t["mixer_embed"];
  r.attention_heads = t["attention_heads"];
  r.constrain_monotonic = t["constrain_monotonic"];
  r.offline_updates = t["offline_updates"];
  r.epsilon.start = t["epsilon"]["start"];
  r.epsilon.finish = t["epsilon"]["finish"];
  r.epsilon.anneal_steps = t["epsilon"]["anneal_steps"];
  r.log_wall_clock = t["log_wall_clock"];
  return c;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> issues;
  if (n_seeds == 0) issues.push_back("n_seeds must be positive");
  if (eval_interval == 0) issues.push_back("eval_interval must be positive");
  if (test_episodes == 0) issues.push_back("test_episodes must be positive");
  if (output_dir.empty()) issues.push_back("output_dir must not be empty");
  for (auto& issue : env.validate()) issues.push_back(std::move(issue));
  for (auto& issue : trainer.validate("trainer")) issues.push_back(std::move(issue));
  return issues;
}

trainers::RunConfig ExperimentConfig::run_config(std::size_t k) const {
  trainers::RunConfig r;
  r.env = env;
  r.trainer = trainer;
  r.seed = seed + k;
  r.eval_interval = eval_interval;
  r.test_episodes = test_episodes;
  r.config_hash = config_hash(*this);
  return r;
}

Json to_json(const ExperimentConfig& cfg) {
  return {{"seed", cfg.seed},
          {"n_seeds", cfg.n_seeds},
          {"eval_interval", cfg.eval_interval},
          {"test_episodes", cfg.test_episodes},
          {"output_dir", cfg.output_dir},
          {"env", env_json(cfg.env)},
          {"trainer", trainer_json(cfg.trainer)}};
}

ExperimentConfig from_json(const Json& overlay) {
  if (!overlay.is_object()) throw ConfigError({"config: top level must be an object"});
  std::vector<std::string> issues;

  ExperimentConfig base;
  auto algo = base.trainer.algo;
  if (overlay.contains("trainer") && overlay["trainer"].is_object() &&
      overlay["trainer"].contains("algo") && overlay["trainer"]["algo"].is_string()) {
    try {
      algo = trainers::algo_from_string(overlay["trainer"]["algo"].get<std::string>());
    } catch (const ConfigError&) {
      // reported again by decode
    }
  }
  base.trainer = trainers::TrainerConfig::defaults(algo);

  Json merged = to_json(base);
  overlay_into(merged, overlay, "", issues);
  ExperimentConfig cfg = decode(merged, issues);
  for (auto& issue : cfg.validate()) issues.push_back(std::move(issue));
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

Json parse_json_text(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    if (const auto pos = what.find("syntax error"); pos != std::string::npos) {
      what = what.substr(pos);
    }
    throw ConfigError({std::string(source) + ":" + std::to_string(line) + ":" +
                       std::to_string(col) + ": " + what});
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({path + ": cannot open"});
  std::ostringstream text;
  text << in.rdbuf();
  return parse_json_text(text.str(), path);
}

void apply_flag(Json& overlay, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError({"flag \"" + std::string(assignment) + "\" is not key=value"});
  }
  const std::vector<std::string> path = split(assignment.substr(0, eq), '.');
  const std::string text(assignment.substr(eq + 1));
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  if (!overlay.is_object()) overlay = Json::object();
  Json* node = &overlay;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (path[i].empty()) throw ConfigError({"flag \"" + std::string(assignment) + "\": empty key"});
    Json& next = (*node)[path[i]];
    if (next.is_null()) next = Json::object();
    if (!next.is_object()) {
      throw ConfigError({"flag \"" + std::string(assignment) + "\": " + path[i] +
                         " is not an object"});
    }
    node = &next;
  }
  if (path.back().empty()) throw ConfigError({"flag \"" + std::string(assignment) + "\": empty key"});
  (*node)[path.back()] = std::move(value);
}

void merge_into(Json& base, const Json& top) {
  if (!base.is_object() || !top.is_object()) {
    base = top;
    return;
  }
  for (auto it = top.begin(); it != top.end(); ++it) {
    if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object()) {
      merge_into(base[it.key()], it.value());
    } else {
      base[it.key()] = it.value();
    }
  }
}

ExperimentConfig parse_config(const Json& preset, const std::string& path,
                              std::span<const std::string> flags) {
  Json overlay = preset.is_object() ? preset : Json::object();
  if (!path.empty()) {
    const Json file = read_json_file(path);
    if (!file.is_object()) throw ConfigError({path + ": top level must be an object"});
    merge_into(overlay, file);
  }
  Json from_flags = Json::object();
  for (const auto& f : flags) apply_flag(from_flags, f);
  merge_into(overlay, from_flags);
  return from_json(overlay);
}

std::string config_hash(const ExperimentConfig& cfg) {
  Json j = to_json(cfg);
  j.erase("output_dir");
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace marl::cli
