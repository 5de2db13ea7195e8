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
#include "sepq/quantizer.h"

#include <algorithm>
#include <cmath>

#include "sepq/errors.h"

namespace sepq {

FakeQuantized QuantizeDequantize(const Tensor& w, int bits) {
  if (bits < kMinQuantBits || bits > kMaxQuantBits) {
    throw InvalidArgument("quantize: bits must be in [" + std::to_string(kMinQuantBits) +
                          ", " + std::to_string(kMaxQuantBits) + "], got " +
                          std::to_string(bits));
  }
  const auto values = w.data();
  float max_abs = 0.0f;
  for (float v : values) {
    if (!std::isfinite(v)) {
      throw InvalidArgument("quantize: tensor '" + w.name() + "' has non-finite values");
    }
    max_abs = std::max(max_abs, std::abs(v));
  }

  QuantizedTensor qt;
  qt.bits = bits;
  const std::int32_t qmax = qt.qmax();
  // Scale in double; q * scale at the extreme code rounds back to max|w|.
  qt.scale = max_abs > 0.0f ? static_cast<double>(max_abs) / qmax : 1.0;
  qt.q.resize(values.size());

  std::vector<float> deq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    // std::round rounds halfway cases away from zero.
    const double r = std::round(static_cast<double>(values[i]) / qt.scale);
    const auto q = static_cast<std::int32_t>(
        std::clamp(r, static_cast<double>(-qmax), static_cast<double>(qmax)));
    qt.q[i] = q;
    deq[i] = static_cast<float>(q * qt.scale);
  }
  return {Tensor(w.name(), w.shape(), std::move(deq)), std::move(qt)};
}

double LayerMse(const Tensor& original, const Tensor& dequantized) {
  if (original.shape() != dequantized.shape()) {
    throw ShapeError("layer_mse: shape " + ShapeToString(original.shape()) + " vs " +
                     ShapeToString(dequantized.shape()));
  }
  const auto a = original.data();
  const auto b = dequantized.data();
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    ss += d * d;
  }
  return a.empty() ? 0.0 : ss / static_cast<double>(a.size());
}

}  // namespace sepq
