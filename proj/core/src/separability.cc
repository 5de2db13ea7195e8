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
#include "sepq/separability.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sepq/errors.h"

namespace sepq {

double Matrix::Sum() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

bool WordSets::Contains(std::size_t feature, std::size_t image) const {
  const auto& m = members.at(feature);
  return std::binary_search(m.begin(), m.end(), image);
}

std::size_t WordSets::TotalWords() const {
  std::size_t total = 0;
  for (const auto& m : members) total += m.size();
  return total;
}

PooledFeatures PoolFeatures(const Tensor& feature_map, std::string layer_id) {
  if (feature_map.rank() != 4) {
    throw ShapeError("pool_features: '" + feature_map.name() +
                     "' must be [n, c, h, w], got " +
                     ShapeToString(feature_map.shape()));
  }
  const auto n = static_cast<std::size_t>(feature_map.dim(0));
  const auto c = static_cast<std::size_t>(feature_map.dim(1));
  const auto plane = static_cast<std::size_t>(feature_map.dim(2) * feature_map.dim(3));

  PooledFeatures pooled;
  pooled.layer_id = layer_id.empty() ? feature_map.name() : std::move(layer_id);
  pooled.values = Matrix(c, n);
  const auto data = feature_map.data();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < c; ++i) {
      const float* p = data.data() + (j * c + i) * plane;
      double sum = 0.0;
      for (std::size_t k = 0; k < plane; ++k) sum += p[k];
      pooled.values(i, j) = sum / static_cast<double>(plane);
    }
  }
  return pooled;
}

WordSets SelectWords(const PooledFeatures& pooled) {
  const std::size_t c = pooled.features();
  const std::size_t n = pooled.images();
  if (c == 0 || n == 0) {
    throw ShapeError("select_words: layer '" + pooled.layer_id + "' is empty");
  }
  const Matrix& a = pooled.values;
  WordSets words;
  words.document_count = n;
  words.members.resize(c);
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0, max_abs = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      const double v = a(i, j);
      if (!std::isfinite(v)) {
        throw ShapeError("select_words: layer '" + pooled.layer_id +
                         "' has a non-finite value at feature " + std::to_string(i) +
                         ", image " + std::to_string(j));
      }
      sum += v;
      max_abs = std::max(max_abs, std::abs(v));
    }
    const double mean = sum / static_cast<double>(c);
    double ss = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      const double d = a(i, j) - mean;
      ss += d * d;
    }
    const double stddev = std::sqrt(ss / static_cast<double>(c));
    // Exact ties count as words.
    const double threshold = stddev - kWordSelectionTolerance * max_abs;
    for (std::size_t i = 0; i < c; ++i) {
      if (std::abs(a(i, j) - mean) >= threshold) words.members[i].push_back(j);
    }
  }
  return words;
}

Matrix TermFrequency(const PooledFeatures& pooled, const WordSets& words) {
  const std::size_t c = pooled.features();
  const std::size_t n = pooled.images();
  if (words.members.size() != c || words.document_count != n) {
    throw ShapeError("term_frequency: word sets do not match layer '" +
                     pooled.layer_id + "'");
  }
  const Matrix& a = pooled.values;
  Matrix tf(c, n);
  for (std::size_t j = 0; j < n; ++j) {
    double column_sum = 0.0;
    for (std::size_t i = 0; i < c; ++i) column_sum += a(i, j);
    const double denom = column_sum + kTermFrequencyEpsilon;
    for (std::size_t i = 0; i < c; ++i) {
      if (words.Contains(i, j)) tf(i, j) = a(i, j) / denom;
    }
  }
  return tf;
}

std::vector<double> InverseDocumentFrequency(const WordSets& words) {
  std::vector<double> idf;
  idf.reserve(words.members.size());
  const double docs = static_cast<double>(words.document_count);
  for (const auto& m : words.members) {
    idf.push_back(std::log((1.0 + docs) / (1.0 + static_cast<double>(m.size()))));
  }
  return idf;
}

Matrix LayerTfIdf(const Matrix& tf, std::span<const double> idf) {
  if (idf.size() != tf.rows()) {
    throw ShapeError("layer_tfidf: tf has " + std::to_string(tf.rows()) +
                     " rows but idf has " + std::to_string(idf.size()) + " entries");
  }
  Matrix out(tf.rows(), tf.cols());
  for (std::size_t i = 0; i < tf.rows(); ++i) {
    for (std::size_t j = 0; j < tf.cols(); ++j) out(i, j) = tf(i, j) * idf[i];
  }
  return out;
}

double LayerSeparability(const Matrix& tfidf, const WordSets& words) {
  if (words.members.size() != tfidf.rows()) {
    throw ShapeError("layer_separability: word sets do not match tf-idf rows");
  }
  const double total_words = static_cast<double>(words.TotalWords());
  return tfidf.Sum() / std::max(1.0, total_words);
}

LayerScore ScoreLayer(const PooledFeatures& pooled) {
  LayerScore score;
  score.layer_id = pooled.layer_id;
  score.words = SelectWords(pooled);
  score.tf = TermFrequency(pooled, score.words);
  score.idf = InverseDocumentFrequency(score.words);
  score.tfidf = LayerTfIdf(score.tf, score.idf);
  score.alpha = LayerSeparability(score.tfidf, score.words);
  return score;
}

Matrix ClassicTfIdf(const Matrix& term_counts) {
  const std::size_t terms = term_counts.rows();
  const std::size_t docs = term_counts.cols();
  if (terms == 0 || docs == 0) throw InvalidArgument("classic_tfidf: empty corpus");

  std::vector<double> doc_length(docs, 0.0);
  std::vector<double> doc_frequency(terms, 0.0);
  for (std::size_t i = 0; i < terms; ++i) {
    for (std::size_t j = 0; j < docs; ++j) {
      const double v = term_counts(i, j);
      if (v < 0.0 || !std::isfinite(v)) {
        throw InvalidArgument("classic_tfidf: counts must be finite and nonnegative");
      }
      doc_length[j] += v;
      if (v > 0.0) doc_frequency[i] += 1.0;
    }
  }
  for (std::size_t j = 0; j < docs; ++j) {
    if (doc_length[j] == 0.0) {
      throw InvalidArgument("classic_tfidf: document " + std::to_string(j) +
                            " has no terms");
    }
  }

  Matrix out(terms, docs);
  for (std::size_t i = 0; i < terms; ++i) {
    const double idf = std::log10(static_cast<double>(docs) / (1.0 + doc_frequency[i]));
    for (std::size_t j = 0; j < docs; ++j) {
      out(i, j) = term_counts(i, j) / doc_length[j] * idf;
    }
  }
  return out;
}

}  // namespace sepq
