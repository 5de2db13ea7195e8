/* Copyright 2026 The sepq Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "sepq/model.h"

#include <algorithm>
#include <utility>

#include <nlohmann/json.hpp>

#include "sepq/errors.h"
#include "sepq/feature_store.h"

namespace sepq {

const char* LayerKindName(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv2d: return "conv2d";
    case LayerKind::kDense: return "dense";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kGlobalAvgPool: return "global_avgpool";
    case LayerKind::kFlatten: return "flatten";
  }
  return "unknown";
}

namespace {

[[noreturn]] void LayerFail(const Layer& layer, std::size_t index, const std::string& what) {
  const std::string label = layer.name.empty() ? std::to_string(index) : "'" + layer.name + "'";
  throw ShapeError(std::string("layer ") + label + " (" + LayerKindName(layer.kind) +
                   "): " + what);
}

Shape OutputShape(const Layer& layer, std::size_t index, const Shape& in) {
  switch (layer.kind) {
    case LayerKind::kConv2d: {
      if (in.size() != 3) LayerFail(layer, index, "expects [c,h,w] input, got " + ShapeToString(in));
      if (in[0] != layer.in_channels) {
        LayerFail(layer, index, "expects " + std::to_string(layer.in_channels) +
                                    " input channels, got " + std::to_string(in[0]));
      }
      if (layer.kernel < 1 || layer.stride < 1 || layer.padding < 0) {
        LayerFail(layer, index, "invalid kernel/stride/padding");
      }
      const auto oh = (in[1] + 2 * layer.padding - layer.kernel) / layer.stride + 1;
      const auto ow = (in[2] + 2 * layer.padding - layer.kernel) / layer.stride + 1;
      if (in[1] + 2 * layer.padding < layer.kernel || in[2] + 2 * layer.padding < layer.kernel) {
        LayerFail(layer, index, "kernel larger than padded input " + ShapeToString(in));
      }
      const Shape expected{layer.out_channels, layer.in_channels, layer.kernel, layer.kernel};
      if (layer.weight.shape() != expected) {
        LayerFail(layer, index, "weight shape " + ShapeToString(layer.weight.shape()) +
                                    " != " + ShapeToString(expected));
      }
      if (layer.has_bias() && layer.bias.shape() != Shape{layer.out_channels}) {
        LayerFail(layer, index, "bias shape " + ShapeToString(layer.bias.shape()));
      }
      return {layer.out_channels, oh, ow};
    }
    case LayerKind::kDense: {
      if (in.size() != 1) LayerFail(layer, index, "expects flat input, got " + ShapeToString(in));
      if (in[0] != layer.in_channels) {
        LayerFail(layer, index, "expects " + std::to_string(layer.in_channels) +
                                    " inputs, got " + std::to_string(in[0]));
      }
      const Shape expected{layer.out_channels, layer.in_channels};
      if (layer.weight.shape() != expected) {
        LayerFail(layer, index, "weight shape " + ShapeToString(layer.weight.shape()) +
                                    " != " + ShapeToString(expected));
      }
      if (layer.has_bias() && layer.bias.shape() != Shape{layer.out_channels}) {
        LayerFail(layer, index, "bias shape " + ShapeToString(layer.bias.shape()));
      }
      return {layer.out_channels};
    }
    case LayerKind::kRelu:
      return in;
    case LayerKind::kGlobalAvgPool:
      if (in.size() != 3) LayerFail(layer, index, "expects [c,h,w] input, got " + ShapeToString(in));
      return {in[0], 1, 1};
    case LayerKind::kFlatten:
      return {NumElements(in)};
  }
  LayerFail(layer, index, "unknown layer kind");
}

LayerKind ParseKind(const std::string& s) {
  if (s == "conv2d") return LayerKind::kConv2d;
  if (s == "dense") return LayerKind::kDense;
  if (s == "relu") return LayerKind::kRelu;
  if (s == "global_avgpool") return LayerKind::kGlobalAvgPool;
  if (s == "flatten") return LayerKind::kFlatten;
  throw FormatError("unknown layer type '" + s + "'");
}

// Activations for a whole batch: n samples of `shape` each, contiguous.
struct Activation {
  std::size_t n = 0;
  Shape shape;
  std::vector<float> values;

  std::size_t per_sample() const { return static_cast<std::size_t>(NumElements(shape)); }
};

Activation Conv2d(const Layer& layer, const Activation& in, const Shape& out_shape) {
  const auto ic = in.shape[0], ih = in.shape[1], iw = in.shape[2];
  const auto oc = out_shape[0], oh = out_shape[1], ow = out_shape[2];
  const auto k = layer.kernel, s = layer.stride, p = layer.padding;
  const auto w = layer.weight.data();
  const auto b = layer.bias.data();

  Activation out{in.n, out_shape, std::vector<float>(in.n * oc * oh * ow)};
  for (std::size_t img = 0; img < in.n; ++img) {
    const float* x = in.values.data() + img * in.per_sample();
    float* y = out.values.data() + img * out.per_sample();
    for (std::int64_t o = 0; o < oc; ++o) {
      for (std::int64_t oy = 0; oy < oh; ++oy) {
        for (std::int64_t ox = 0; ox < ow; ++ox) {
          double acc = layer.has_bias() ? b[o] : 0.0;
          for (std::int64_t c = 0; c < ic; ++c) {
            for (std::int64_t ky = 0; ky < k; ++ky) {
              const auto iy = oy * s + ky - p;
              if (iy < 0 || iy >= ih) continue;
              for (std::int64_t kx = 0; kx < k; ++kx) {
                const auto ix = ox * s + kx - p;
                if (ix < 0 || ix >= iw) continue;
                acc += static_cast<double>(x[(c * ih + iy) * iw + ix]) *
                       w[((o * ic + c) * k + ky) * k + kx];
              }
            }
          }
          y[(o * oh + oy) * ow + ox] = static_cast<float>(acc);
        }
      }
    }
  }
  return out;
}

Activation Dense(const Layer& layer, const Activation& in, const Shape& out_shape) {
  const auto ic = layer.in_channels, oc = layer.out_channels;
  const auto w = layer.weight.data();
  const auto b = layer.bias.data();
  Activation out{in.n, out_shape, std::vector<float>(in.n * oc)};
  for (std::size_t img = 0; img < in.n; ++img) {
    const float* x = in.values.data() + img * ic;
    for (std::int64_t o = 0; o < oc; ++o) {
      double acc = layer.has_bias() ? b[o] : 0.0;
      for (std::int64_t c = 0; c < ic; ++c) acc += static_cast<double>(x[c]) * w[o * ic + c];
      out.values[img * oc + o] = static_cast<float>(acc);
    }
  }
  return out;
}

Activation GlobalAvgPool(const Activation& in, const Shape& out_shape) {
  const auto c = in.shape[0];
  const auto plane = static_cast<std::size_t>(in.shape[1] * in.shape[2]);
  Activation out{in.n, out_shape, std::vector<float>(in.n * c)};
  for (std::size_t img = 0; img < in.n; ++img) {
    for (std::int64_t ch = 0; ch < c; ++ch) {
      const float* p = in.values.data() + (img * c + ch) * plane;
      double sum = 0.0;
      for (std::size_t i = 0; i < plane; ++i) sum += p[i];
      out.values[img * c + ch] = static_cast<float>(sum / static_cast<double>(plane));
    }
  }
  return out;
}

Tensor ToFeatureTensor(const std::string& name, const Activation& a) {
  Shape shape{static_cast<std::int64_t>(a.n)};
  if (a.shape.size() == 3) {
    shape.insert(shape.end(), a.shape.begin(), a.shape.end());
  } else {
    shape.insert(shape.end(), {a.shape[0], 1, 1});
  }
  return Tensor(name, std::move(shape), a.values);
}

}  // namespace

ModelGraph::ModelGraph(Shape input_shape, std::vector<Layer> layers)
    : input_shape_(std::move(input_shape)), layers_(std::move(layers)) {
  if (input_shape_.size() != 3 ||
      std::any_of(input_shape_.begin(), input_shape_.end(), [](auto d) { return d < 1; })) {
    throw ShapeError("model input shape must be [c,h,w], got " + ShapeToString(input_shape_));
  }
  Shape shape = input_shape_;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    shape = OutputShape(layers_[i], i, shape);
    output_shapes_.push_back(shape);
    if (layers_[i].quantizable()) quantizable_.push_back(i);
  }
  if (shape.size() != 1) {
    throw ShapeError("model must end in a flat [classes] output, got " + ShapeToString(shape));
  }
}

std::vector<std::string> ModelGraph::QuantizableNames() const {
  std::vector<std::string> names;
  for (auto i : quantizable_) names.push_back(layers_[i].name);
  return names;
}

ModelGraph ModelGraph::WithWeights(std::span<const Tensor> weights) const {
  if (weights.size() != quantizable_.size()) {
    throw InvalidArgument("model has " + std::to_string(quantizable_.size()) +
                          " quantizable layers, got " + std::to_string(weights.size()) +
                          " weight tensors");
  }
  std::vector<Layer> layers = layers_;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    layers[quantizable_[k]].weight = weights[k];
  }
  return ModelGraph(input_shape_, std::move(layers));
}

ModelGraph ModelGraph::Load(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ReadFileBytes(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  try {
    const auto weights_path = path.parent_path() / doc.at("weights").get<std::string>();
    const Container weights = ReadContainer(weights_path);
    auto tensor = [&](const nlohmann::json& layer, const char* key) -> Tensor {
      if (!layer.contains(key) || layer.at(key).is_null()) return {};
      return weights.Get(layer.at(key).get<std::string>());
    };

    std::vector<Layer> layers;
    for (const auto& l : doc.at("layers")) {
      Layer layer;
      layer.kind = ParseKind(l.at("type").get<std::string>());
      layer.name = l.value("name", std::string());
      if (layer.kind == LayerKind::kConv2d) {
        layer.in_channels = l.at("in_channels").get<std::int64_t>();
        layer.out_channels = l.at("out_channels").get<std::int64_t>();
        layer.kernel = l.at("kernel").get<std::int64_t>();
        layer.stride = l.value("stride", std::int64_t{1});
        layer.padding = l.value("padding", std::int64_t{0});
      } else if (layer.kind == LayerKind::kDense) {
        layer.in_channels = l.at("in_features").get<std::int64_t>();
        layer.out_channels = l.at("out_features").get<std::int64_t>();
      }
      if (layer.quantizable()) {
        if (layer.name.empty()) throw FormatError("quantizable layers need a name");
        layer.weight = tensor(l, "weight");
        layer.bias = tensor(l, "bias");
      }
      layers.push_back(std::move(layer));
    }
    return ModelGraph(doc.at("input_shape").get<Shape>(), std::move(layers));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": malformed model description: " + e.what());
  }
}

ForwardResult Forward(const ModelGraph& model, const Tensor& input, bool record_features) {
  const Shape& expected = model.input_shape();
  if (input.rank() != 4 || input.dim(1) != expected[0] || input.dim(2) != expected[1] ||
      input.dim(3) != expected[2]) {
    throw ShapeError("forward: input '" + input.name() + "' has shape " +
                     ShapeToString(input.shape()) + ", model expects [n," +
                     ShapeToString(expected).substr(1));
  }
  Activation act{static_cast<std::size_t>(input.dim(0)), expected,
                 std::vector<float>(input.data().begin(), input.data().end())};

  ForwardResult result;
  const auto& layers = model.layers();
  Shape shape = expected;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& layer = layers[i];
    const Shape out_shape = OutputShape(layer, i, shape);
    switch (layer.kind) {
      case LayerKind::kConv2d: act = Conv2d(layer, act, out_shape); break;
      case LayerKind::kDense: act = Dense(layer, act, out_shape); break;
      case LayerKind::kRelu:
        for (auto& v : act.values) v = std::max(v, 0.0f);
        break;
      case LayerKind::kGlobalAvgPool: act = GlobalAvgPool(act, out_shape); break;
      case LayerKind::kFlatten: act.shape = out_shape; break;
    }
    shape = out_shape;

    if (!record_features) continue;
    // Capture after the quantizable layer's activation, if it has one.
    const bool next_is_relu = i + 1 < layers.size() && layers[i + 1].kind == LayerKind::kRelu;
    if (layer.quantizable() && !next_is_relu) {
      result.features.push_back(ToFeatureTensor(layer.name, act));
    } else if (layer.kind == LayerKind::kRelu && i > 0 && layers[i - 1].quantizable()) {
      result.features.push_back(ToFeatureTensor(layers[i - 1].name, act));
    }
  }
  result.output = Tensor("logits", {static_cast<std::int64_t>(act.n), shape[0]},
                         std::move(act.values));
  return result;
}

std::vector<LayerProfile> ProfileModel(const ModelGraph& model, bool pin_first_last) {
  std::vector<LayerProfile> profiles;
  const auto& q = model.quantizable();
  for (std::size_t k = 0; k < q.size(); ++k) {
    const Layer& layer = model.layers_[q[k]];
    const Shape& out = model.output_shapes_[q[k]];
    LayerProfile p;
    p.layer_id = layer.name;
    p.param_count = static_cast<std::int64_t>(layer.weight.size());
    // Every output element costs one MAC per weight of its filter.
    const std::int64_t per_output = p.param_count / layer.out_channels;
    p.mac_count = NumElements(out) * per_output;
    if (pin_first_last && (k == 0 || k + 1 == q.size())) p.pinned_bits = kPinnedLayerBits;
    profiles.push_back(std::move(p));
  }
  return profiles;
}

std::vector<std::int64_t> ArgMax(const Tensor& logits) {
  if (logits.rank() != 2) throw ShapeError("argmax: logits must be [n, classes]");
  const auto n = static_cast<std::size_t>(logits.dim(0));
  const auto classes = static_cast<std::size_t>(logits.dim(1));
  std::vector<std::int64_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = logits.data().subspan(i * classes, classes);
    out[i] = std::max_element(row.begin(), row.end()) - row.begin();
  }
  return out;
}

}  // namespace sepq
