#include "acsf/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

namespace acsf {

using nlohmann::json;

void save_checkpoint(const std::filesystem::path& path,
                     const Checkpoint& ckpt) {
  json j;
  j["format"] = "acsf-checkpoint";
  j["version"] = 1;

  json cfg = json::object();
  for (const auto& [k, v] : config_to_kv(ckpt.config)) cfg[k] = v;
  j["config"] = cfg;

  json nets = json::object();
  for (const auto& [name, tensors] : ckpt.networks) {
    json arr = json::array();
    for (const Tensor& t : tensors) {
      json entry;
      entry["shape"] = t.shape();
      entry["values"] =
          std::vector<double>(t.values().begin(), t.values().end());
      arr.push_back(std::move(entry));
    }
    nets[name] = std::move(arr);
  }
  j["networks"] = std::move(nets);

  std::ofstream os(path);
  if (!os) throw IoError("checkpoint: cannot open " + path.string());
  os << j.dump();
  if (!os) throw IoError("checkpoint: write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("checkpoint: cannot open " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw IoError("checkpoint: parse error in " + path.string() + ": " +
                  e.what());
  }
  if (j.value("format", "") != "acsf-checkpoint")
    throw IoError("checkpoint: not a checkpoint file: " + path.string());

  Checkpoint ckpt;
  for (const auto& [k, v] : j.at("config").items())
    apply_kv(ckpt.config, k, v.get<std::string>());
  ckpt.config.resolve_and_validate();

  for (const auto& [name, arr] : j.at("networks").items()) {
    std::vector<Tensor> tensors;
    for (const auto& entry : arr) {
      Shape shape = entry.at("shape").get<Shape>();
      std::vector<double> values =
          entry.at("values").get<std::vector<double>>();
      tensors.push_back(Tensor::from(std::move(shape), std::move(values)));
    }
    ckpt.networks[name] = std::move(tensors);
  }
  return ckpt;
}

}  // namespace acsf
