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
#include "sepq/tensor.h"

#include <cstring>
#include <sstream>
#include <utility>

#include "sepq/errors.h"

namespace sepq {

std::int64_t NumElements(const Shape& shape) {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

static void ValidateShape(const std::string& name, const Shape& shape) {
  if (shape.empty() || shape.size() > 4) {
    throw ShapeError("tensor '" + name + "': rank must be 1-4, got shape " +
                     ShapeToString(shape));
  }
  for (auto d : shape) {
    if (d < 1) {
      throw ShapeError("tensor '" + name +
                       "': dimensions must be positive, got " +
                       ShapeToString(shape));
    }
  }
}

Tensor::Tensor(std::string name, Shape shape, std::vector<float> data)
    : name_(std::move(name)), shape_(std::move(shape)), data_(std::move(data)) {
  ValidateShape(name_, shape_);
  if (NumElements(shape_) != static_cast<std::int64_t>(data_.size())) {
    throw ShapeError("tensor '" + name_ + "': shape " + ShapeToString(shape_) +
                     " needs " + std::to_string(NumElements(shape_)) +
                     " values, got " + std::to_string(data_.size()));
  }
}

Tensor Tensor::Zeros(std::string name, Shape shape) {
  ValidateShape(name, shape);
  std::vector<float> data(static_cast<std::size_t>(NumElements(shape)), 0.0f);
  return Tensor(std::move(name), std::move(shape), std::move(data));
}

Tensor Tensor::WithName(std::string name) const {
  Tensor t = *this;
  t.name_ = std::move(name);
  return t;
}

Tensor Tensor::Reshaped(Shape shape) const {
  return Tensor(name_, std::move(shape), data_);
}

bool operator==(const Tensor& a, const Tensor& b) {
  return a.name_ == b.name_ && a.shape_ == b.shape_ &&
         a.data_.size() == b.data_.size() &&
         (a.data_.empty() ||
          std::memcmp(a.data_.data(), b.data_.data(),
                      a.data_.size() * sizeof(float)) == 0);
}

}  // namespace sepq
