#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "epswae/errors.hpp"
#include "epswae/mlp.hpp"

namespace epswae {

inline std::string to_string(ActivationKind k) {
  switch (k) {
    case ActivationKind::Identity: return "identity";
    case ActivationKind::ReLU: return "relu";
    case ActivationKind::LeakyReLU: return "leaky_relu";
    case ActivationKind::Sigmoid: return "sigmoid";
  }
  return "?";
}

inline ActivationKind parse_activation(const std::string& s) {
  if (s == "identity") return ActivationKind::Identity;
  if (s == "relu") return ActivationKind::ReLU;
  if (s == "leaky_relu") return ActivationKind::LeakyReLU;
  if (s == "sigmoid") return ActivationKind::Sigmoid;
  throw UsageError("unknown activation '" + s + "'");
}

/// Versioned JSON checkpoint. Doubles are serialized with shortest
/// round-trip formatting, so save/load is lossless for 64-bit values.
inline void save_network(const MlpNetwork& net, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "epswae-mlp";
  j["version"] = 1;
  nlohmann::json layers = nlohmann::json::array();
  for (const Layer& l : net.layers()) {
    nlohmann::json jl;
    jl["in"] = l.weight.rows();
    jl["out"] = l.weight.cols();
    jl["activation"] = to_string(l.activation.kind);
    if (l.activation.kind == ActivationKind::LeakyReLU)
      jl["slope"] = l.activation.slope;
    jl["weight"] = l.weight.raw();
    jl["bias"] = l.bias;
    layers.push_back(std::move(jl));
  }
  j["layers"] = std::move(layers);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << j.dump(2) << '\n';
  if (!f) throw IoError("write failed: " + path.string());
}

inline MlpNetwork load_network(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for reading: " + path.string());
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid checkpoint JSON in " + path.string() + ": " + e.what());
  }
  if (j.value("format", "") != "epswae-mlp")
    throw ParseError("not an epswae-mlp checkpoint: " + path.string());
  if (j.value("version", 0) != 1)
    throw ParseError("unsupported checkpoint version in " + path.string());
  std::vector<Layer> layers;
  for (const auto& jl : j.at("layers")) {
    Layer l;
    const std::size_t in = jl.at("in").get<std::size_t>();
    const std::size_t out = jl.at("out").get<std::size_t>();
    l.weight = DenseMatrix(in, out);
    const auto w = jl.at("weight").get<std::vector<double>>();
    if (w.size() != in * out)
      throw ParseError("weight size mismatch in " + path.string());
    std::copy(w.begin(), w.end(), l.weight.raw().begin());
    l.bias = jl.at("bias").get<std::vector<double>>();
    l.activation.kind = parse_activation(jl.at("activation").get<std::string>());
    if (l.activation.kind == ActivationKind::LeakyReLU)
      l.activation.slope = jl.value("slope", 0.01);
    layers.push_back(std::move(l));
  }
  return MlpNetwork(std::move(layers));
}

}  // namespace epswae
