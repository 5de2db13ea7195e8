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
#include "sepq/evaluate.h"

#include <cmath>

#include "sepq/allocator.h"
#include "sepq/errors.h"
#include "sepq/quantizer.h"

namespace sepq {

double TopOneAccuracy(const Tensor& logits, const Tensor& labels) {
  const auto predicted = ArgMax(logits);
  if (labels.rank() != 1 || static_cast<std::size_t>(labels.dim(0)) != predicted.size()) {
    throw ShapeError("accuracy: labels shape " + ShapeToString(labels.shape()) +
                     " does not match " + std::to_string(predicted.size()) + " predictions");
  }
  if (predicted.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == std::llround(labels.data()[i])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

EvalReport EvaluateConfig(const ModelGraph& model, std::span<const int> bits,
                          const Tensor& images, const Tensor& labels, int activation_bits) {
  const auto& q = model.quantizable();
  if (bits.size() != q.size()) {
    throw InvalidArgument("evaluate: bit config has " + std::to_string(bits.size()) +
                          " layers but the model has " + std::to_string(q.size()) +
                          " quantizable layers");
  }
  EvalReport report;
  report.activation_bits = activation_bits;
  std::vector<Tensor> weights;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const Layer& layer = model.layers()[q[k]];
    auto fq = QuantizeDequantize(layer.weight, bits[k]);
    report.layers.push_back({layer.name, bits[k], LayerMse(layer.weight, fq.dequantized)});
    weights.push_back(std::move(fq.dequantized));
  }
  const ModelGraph quantized = model.WithWeights(weights);
  const auto logits = Forward(quantized, images).output;
  report.top1 = TopOneAccuracy(logits, labels);
  report.samples = static_cast<std::size_t>(images.dim(0));

  const auto profiles = ProfileModel(model, false);
  report.size_bytes = ModelSizeBytes(bits, profiles);
  report.bops = Bops(bits, profiles, activation_bits);
  return report;
}

double EvaluateFloat(const ModelGraph& model, const Tensor& images, const Tensor& labels) {
  return TopOneAccuracy(Forward(model, images).output, labels);
}

}  // namespace sepq
