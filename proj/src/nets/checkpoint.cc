#include "marl/nets/checkpoint.h"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "marl/common/error.h"

namespace marl::nets {

using nlohmann::json;

std::string checkpoint_to_string(const ParamSet& params) {
  json out;
  out["format"] = "marl-checkpoint";
  out["version"] = kCheckpointVersion;
  json list = json::array();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Tensor& t = params[i];
    list.push_back({{"name", params.name(i)},
                    {"shape", t.shape()},
                    {"values", std::vector<double>(t.values().begin(), t.values().end())}});
  }
  out["params"] = std::move(list);
  return out.dump();
}

void checkpoint_from_string(const std::string& text, ParamSet& params) {
  json in;
  try {
    in = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (in.value("format", "") != "marl-checkpoint") throw Error("not a marl checkpoint");
  if (in.value("version", 0) != kCheckpointVersion) {
    throw Error("unsupported checkpoint version " + in.value("version", json(0)).dump());
  }
  const json& list = in.at("params");
  if (list.size() != params.size()) throw Error("checkpoint parameter count differs");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const json& entry = list[i];
    if (entry.at("name").get<std::string>() != params.name(i)) {
      throw Error("checkpoint parameter " + std::to_string(i) + " is '" +
                  entry.at("name").get<std::string>() + "', expected '" + params.name(i) + "'");
    }
    Tensor t(entry.at("shape").get<ad::Shape>(), entry.at("values").get<std::vector<double>>());
    if (t.shape() != params[i].shape()) {
      throw ShapeError("checkpoint shape mismatch for '" + params.name(i) + "'");
    }
    params[i] = std::move(t);
  }
}

void save_checkpoint(const std::string& path, const ParamSet& params) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint '" + path + "'");
  out << checkpoint_to_string(params) << '\n';
}

void load_checkpoint(const std::string& path, ParamSet& params) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read checkpoint '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  checkpoint_from_string(buffer.str(), params);
}

}  // namespace marl::nets
