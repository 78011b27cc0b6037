// Copyright 2026 The winoq Authors
// SPDX-License-Identifier: Apache-2.0

#include "winoq/checkpoint.hpp"

#include <fstream>

#include "json.hpp"
#include "winoq/tensor_io.hpp"

namespace winoq::rsq {
namespace {

using nlohmann::json;

json scheme_json(const FakeQuantParam& p) {
  return {{"bits", p.scheme.storage_bits()},
          {"T", p.scheme.base_T()},
          {"alpha", p.scheme.alpha()},
          {"T_s", p.scheme.T_s()},
          {"scale", p.s}};
}

FakeQuantParam param_from(const json& j) {
  FakeQuantParam p;
  p.scheme = make_scheme(j.at("bits").get<int>(), j.at("T").get<int>(), j.at("alpha").get<double>());
  p.s = j.at("scale").get<double>();
  return p;
}

}  // namespace

void save_checkpoint(const ToyModel& model, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create checkpoint directory " + dir.string());

  json layers = json::array();
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const ToyLayer& layer = model.layers[l];
    const std::string stem = "layer" + std::to_string(l);
    io::write_tensor(dir / (stem + ".weights.f32"), layer.conv.weights);
    std::vector<float> bias = layer.conv.bias;
    if (bias.empty()) bias.assign(layer.conv.c_out(), 0.0f);
    io::write_tensor(dir / (stem + ".bias.f32"), TensorF32(Shape{1, 1, bias.size()}, bias));
    layers.push_back({
        {"index", l},
        {"c_in", layer.conv.c_in()},
        {"c_out", layer.conv.c_out()},
        {"k", layer.conv.kernel()},
        {"stride", layer.conv.stride},
        {"padding", {layer.conv.padding.left, layer.conv.padding.right}},
        {"relu", layer.relu_after},
        {"quantized", layer.quantized},
        {"weights", stem + ".weights.f32"},
        {"bias", stem + ".bias.f32"},
        {"act", scheme_json(layer.act)},
        {"wt", scheme_json(layer.wt)},
    });
  }
  json manifest = {{"in_channels", model.in_channels}, {"layers", layers}};
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write manifest in " + dir.string());
  out << manifest.dump(2) << "\n";
}

ToyModel load_checkpoint(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) fail(ErrorCode::kIo, "missing manifest.json in " + dir.string());
  ToyModel model;
  try {
    json manifest;
    in >> manifest;
    model.in_channels = manifest.at("in_channels").get<std::size_t>();
    for (const auto& j : manifest.at("layers")) {
      ToyLayer layer;
      layer.conv.weights = io::read_tensor_f32(dir / j.at("weights").get<std::string>());
      const TensorF32 bias = io::read_tensor_f32(dir / j.at("bias").get<std::string>());
      layer.conv.bias.assign(bias.data().begin(), bias.data().end());
      layer.conv.stride = j.at("stride").get<std::size_t>();
      layer.conv.padding = Padding{j.at("padding")[0].get<std::size_t>(),
                                   j.at("padding")[1].get<std::size_t>()};
      layer.relu_after = j.at("relu").get<bool>();
      layer.quantized = j.at("quantized").get<bool>();
      layer.act = param_from(j.at("act"));
      layer.wt = param_from(j.at("wt"));
      model.layers.push_back(std::move(layer));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kIo, "malformed checkpoint manifest: " + std::string(e.what()));
  }
  validate_model(model);
  return model;
}

}  // namespace winoq::rsq
