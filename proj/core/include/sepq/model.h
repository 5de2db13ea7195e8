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
#ifndef SEPQ_MODEL_H_
#define SEPQ_MODEL_H_

// A small sequential CNN description and a reference forward pass.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sepq/allocator.h"
#include "sepq/tensor.h"

namespace sepq {

enum class LayerKind { kConv2d, kDense, kRelu, kGlobalAvgPool, kFlatten };

const char* LayerKindName(LayerKind kind);

struct Layer {
  LayerKind kind = LayerKind::kRelu;
  std::string name;
  // conv2d: out_channels x in_channels x kernel x kernel weight.
  // dense: out_channels x in_channels weight.
  std::int64_t in_channels = 0;
  std::int64_t out_channels = 0;
  std::int64_t kernel = 1;
  std::int64_t stride = 1;
  std::int64_t padding = 0;
  Tensor weight;
  // Empty (size 0) when the layer has no bias.
  Tensor bias;

  bool quantizable() const {
    return kind == LayerKind::kConv2d || kind == LayerKind::kDense;
  }
  bool has_bias() const { return bias.size() > 0; }
};

class ModelGraph {
 public:
  // input_shape is the per-sample shape, [c, h, w]. Validates that every
  // layer is compatible with the activation it receives and throws
  // ShapeError naming the offending layer otherwise.
  ModelGraph(Shape input_shape, std::vector<Layer> layers);

  // Reads the JSON model description; weight tensors are looked up in the
  // `.fmap` container named by its "weights" field (relative to the model
  // file).
  static ModelGraph Load(const std::filesystem::path& path);

  const Shape& input_shape() const { return input_shape_; }
  const std::vector<Layer>& layers() const { return layers_; }
  // Indices into layers() of the conv2d / dense layers, in order.
  const std::vector<std::size_t>& quantizable() const { return quantizable_; }
  std::vector<std::string> QuantizableNames() const;

  // Copy with the weights of the k-th quantizable layer replaced.
  ModelGraph WithWeights(std::span<const Tensor> weights) const;

 private:
  Shape input_shape_;
  std::vector<Layer> layers_;
  std::vector<std::size_t> quantizable_;
  // Per-sample activation shape after each layer.
  std::vector<Shape> output_shapes_;

  friend std::vector<LayerProfile> ProfileModel(const ModelGraph&, bool);
};

struct ForwardResult {
  Tensor output;
  // One [n, c, h, w] tensor per quantizable layer, named after the layer,
  // taken after the layer's ReLU when one follows it directly. Dense
  // outputs are reported as [n, c, 1, 1]. Empty unless requested.
  std::vector<Tensor> features;
};

// Input is [n, c, h, w] matching input_shape(); output is [n, classes].
ForwardResult Forward(const ModelGraph& model, const Tensor& input,
                      bool record_features = false);

// Weight parameter counts (bias excluded) and MAC counts per quantizable
// layer. With pin_first_last the first and last are pinned to 8 bits.
std::vector<LayerProfile> ProfileModel(const ModelGraph& model, bool pin_first_last);

// Index of the largest logit per row; ties go to the lower class index.
std::vector<std::int64_t> ArgMax(const Tensor& logits);

}  // namespace sepq

#endif  // SEPQ_MODEL_H_
