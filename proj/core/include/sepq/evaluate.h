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
#ifndef SEPQ_EVALUATE_H_
#define SEPQ_EVALUATE_H_

#include <span>
#include <string>
#include <vector>

#include "sepq/model.h"
#include "sepq/tensor.h"

namespace sepq {

struct LayerError {
  std::string layer_id;
  int bits = 0;
  double mse = 0.0;
};

struct EvalReport {
  std::vector<LayerError> layers;
  double top1 = 0.0;
  double size_bytes = 0.0;
  double bops = 0.0;
  int activation_bits = 8;
  std::size_t samples = 0;
};

// Fraction of rows whose argmax equals the label. Labels are stored as
// float class indices, shape [n].
double TopOneAccuracy(const Tensor& logits, const Tensor& labels);

// Fake-quantizes each quantizable layer's weights at bits[k] (biases and
// activations stay in float), runs the forward pass over `images` and
// scores against `labels`. Size and BOPs come from ProfileModel.
// Throws InvalidArgument if bits.size() differs from the quantizable
// layer count.
EvalReport EvaluateConfig(const ModelGraph& model, std::span<const int> bits,
                          const Tensor& images, const Tensor& labels,
                          int activation_bits = 8);

// Full-precision accuracy of the unmodified model.
double EvaluateFloat(const ModelGraph& model, const Tensor& images, const Tensor& labels);

}  // namespace sepq

#endif  // SEPQ_EVALUATE_H_
