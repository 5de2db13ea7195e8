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
#ifndef SEPQ_SEPARABILITY_H_
#define SEPQ_SEPARABILITY_H_

// Per-layer class separability from pooled feature maps.
//
// Each sampled image is a "document" and each output channel a candidate
// "word". A channel becomes a word of an image when its pooled activation
// deviates from that image's mean activation by at least one (population)
// standard deviation. Word-masked term frequencies are weighted by a
// smoothed inverse document frequency and averaged over all word
// occurrences to give the layer score alpha.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sepq/tensor.h"

namespace sepq {

// Dense row-major double matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  std::span<const double> values() const { return values_; }

  double Sum() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// Globally average-pooled activations of one layer: one row per channel
// (feature), one column per image. Pooling is carried out and stored in
// double precision.
struct PooledFeatures {
  std::string layer_id;
  Matrix values;
  std::vector<std::int64_t> image_ids;
  std::vector<std::int64_t> class_ids;

  std::size_t features() const { return values.rows(); }
  std::size_t images() const { return values.cols(); }
};

// members[i] lists (ascending) the images in which feature i is a word.
struct WordSets {
  std::vector<std::vector<std::size_t>> members;
  std::size_t document_count = 0;

  bool Contains(std::size_t feature, std::size_t image) const;
  std::size_t TotalWords() const;
};

struct LayerScore {
  std::string layer_id;
  Matrix tf;
  std::vector<double> idf;
  Matrix tfidf;
  WordSets words;
  double alpha = 0.0;
};

inline constexpr double kTermFrequencyEpsilon = 1e-12;
// Slack on the >= std test, relative to the column's largest magnitude.
inline constexpr double kWordSelectionTolerance = 1e-12;

// Input is [n, c, h, w]; result is c x n. Throws ShapeError for other ranks.
PooledFeatures PoolFeatures(const Tensor& feature_map, std::string layer_id = {});

// Feature i is a word of image j when |A(i,j) - mean_j| >= std_j, with the
// population mean and standard deviation taken over image j's features.
// Throws ShapeError on empty or non-finite input.
WordSets SelectWords(const PooledFeatures& pooled);

// tf(i, j) = A(i, j) * [j in N_i] / (sum_k A(k, j) + eps); the denominator
// runs over every feature of image j, masked or not.
Matrix TermFrequency(const PooledFeatures& pooled, const WordSets& words);

// idf(i) = ln((1 + |S|) / (1 + |N_i|)).
std::vector<double> InverseDocumentFrequency(const WordSets& words);

Matrix LayerTfIdf(const Matrix& tf, std::span<const double> idf);

// Sum of all tf-idf entries divided by max(1, total word occurrences).
double LayerSeparability(const Matrix& tfidf, const WordSets& words);

// Chains SelectWords -> TermFrequency -> InverseDocumentFrequency ->
// LayerTfIdf -> LayerSeparability.
LayerScore ScoreLayer(const PooledFeatures& pooled);

// Textbook TF-IDF over an n_terms x n_docs count matrix:
//   tf(i, j) = n_ij / sum_k n_kj
//   idf(i)   = log10(|D| / (1 + |{j : n_ij > 0}|))
// Throws InvalidArgument for negative counts or a document with no terms.
Matrix ClassicTfIdf(const Matrix& term_counts);

}  // namespace sepq

#endif  // SEPQ_SEPARABILITY_H_
