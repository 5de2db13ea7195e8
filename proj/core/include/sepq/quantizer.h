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
#ifndef SEPQ_QUANTIZER_H_
#define SEPQ_QUANTIZER_H_

#include <cstdint>
#include <vector>

#include "sepq/tensor.h"

namespace sepq {

inline constexpr int kMinQuantBits = 2;
inline constexpr int kMaxQuantBits = 8;

// Symmetric per-tensor integer representation: value ~= q * scale with
// |q| <= 2^(bits-1) - 1.
struct QuantizedTensor {
  std::vector<std::int32_t> q;
  double scale = 1.0;
  int bits = 8;

  std::int32_t qmax() const { return (1 << (bits - 1)) - 1; }
};

struct FakeQuantized {
  Tensor dequantized;
  QuantizedTensor quantized;
};

// scale = max|w| / (2^(bits-1) - 1), q = clamp(round_half_away(w / scale)),
// dequantized = q * scale rounded to float. An all-zero tensor gets scale 1.
// Throws InvalidArgument when bits is outside [2, 8] or w is not finite.
FakeQuantized QuantizeDequantize(const Tensor& w, int bits);

// Mean squared elementwise difference; throws ShapeError on shape mismatch.
double LayerMse(const Tensor& original, const Tensor& dequantized);

}  // namespace sepq

#endif  // SEPQ_QUANTIZER_H_
