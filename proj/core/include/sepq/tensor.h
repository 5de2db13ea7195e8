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
#ifndef SEPQ_TENSOR_H_
#define SEPQ_TENSOR_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sepq {

using Shape = std::vector<std::int64_t>;

std::int64_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

// Dense float32 array, row-major, 1 to 4 dimensions.
class Tensor {
 public:
  Tensor() = default;
  // Throws ShapeError if the shape is invalid or does not match data.size().
  Tensor(std::string name, Shape shape, std::vector<float> data);

  static Tensor Zeros(std::string name, Shape shape);

  const std::string& name() const { return name_; }
  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::int64_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return data_.size(); }

  std::span<const float> data() const { return data_; }
  std::span<float> mutable_data() { return data_; }

  Tensor WithName(std::string name) const;
  Tensor Reshaped(Shape shape) const;

  // Bit-exact comparison of name, shape and payload.
  friend bool operator==(const Tensor& a, const Tensor& b);

 private:
  std::string name_;
  Shape shape_;
  std::vector<float> data_;
};

}  // namespace sepq

#endif  // SEPQ_TENSOR_H_
