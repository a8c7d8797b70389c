// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "erm/metrics.hpp"

#include <cmath>
#include <numeric>

#include "erm/errors.hpp"

namespace erm {

std::size_t WindowCounts::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

double rhetorical_density(const AnnotationVector& vec,
                          std::size_t sentence_count) {
  if (sentence_count < 1) {
    throw Error(ErrorCode::ShapeError, "sentence count must be >= 1");
  }
  const std::size_t devices = vec.l1a.sum() + vec.l1b.sum() + vec.l1c.sum();
  return static_cast<double>(devices) / static_cast<double>(sentence_count);
}

std::pair<double, double> epistemic_densities(const AnnotationVector& vec,
                                              std::size_t sentence_count) {
  if (sentence_count < 1) {
    throw Error(ErrorCode::ShapeError, "sentence count must be >= 1");
  }
  const double m = static_cast<double>(sentence_count);
  return {static_cast<double>(vec.l2a.sum()) / m,
          static_cast<double>(vec.l2b.sum()) / m};
}

DensityBundle density_bundle(const AnnotationVector& vec,
                             std::size_t sentence_count) {
  DensityBundle bundle;
  bundle.sentence_count = sentence_count;
  bundle.rho = rhetorical_density(vec, sentence_count);
  std::tie(bundle.eps_g, bundle.eps_p) =
      epistemic_densities(vec, sentence_count);
  return bundle;
}

double form_meaning_divergence(const DensityBundle& d) {
  return d.rho * d.eps_p / (d.eps_g + 1.0);
}

double genuine_performed_ratio(const DensityBundle& d) {
  return d.eps_g / (d.eps_p + 1.0);
}

WindowCounts window_device_counts(const AnnotationVector& vec,
                                  const SentenceSequence& sentences,
                                  const ChunkSequence& chunks,
                                  const WindowPartition& windows) {
  const std::size_t m = sentences.size();
  if (vec.l1a.rows() != m) {
    throw Error(ErrorCode::ShapeError,
                "lambda_1a rows do not match sentence count");
  }
  if (vec.l1b.rows() != chunks.size()) {
    throw Error(ErrorCode::ShapeError,
                "lambda_1b rows do not match chunk count");
  }
  WindowCounts out;
  out.counts.assign(windows.count(), 0);
  if (windows.count() == 0) {
    throw Error(ErrorCode::ShapeError, "window partition is empty");
  }

  // Prefix word positions once; anchor each device at its unit's first word.
  std::vector<std::size_t> first_word(m, 0);
  for (std::size_t i = 1; i < m; ++i) {
    first_word[i] = first_word[i - 1] + sentences.sentences[i - 1].word_count;
  }

  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t hits = vec.l1a.row_sum(i);
    if (hits > 0) out.counts[windows.window_of(first_word[i])] += hits;
  }
  for (const Chunk& c : chunks.chunks) {
    const std::size_t hits = vec.l1b.row_sum(c.index);
    if (hits > 0) {
      out.counts[windows.window_of(first_word[c.begin_sentence])] += hits;
    }
  }
  return out;
}

std::optional<double> normalized_device_entropy(const WindowCounts& counts) {
  const std::size_t total = counts.total();
  if (total == 0) return std::nullopt;
  const std::size_t k = counts.window_count();
  if (k == 1) return 1.0;

  double entropy = 0.0;
  for (std::size_t w : counts.counts) {
    if (w == 0) continue;
    const double p = static_cast<double>(w) / static_cast<double>(total);
    entropy -= p * std::log2(p);
  }
  return entropy / std::log2(static_cast<double>(k));
}

DocumentFeatures extract_features(const AnnotationVector& vec,
                                  const SentenceSequence& sentences,
                                  const ChunkSequence& chunks,
                                  const WindowPartition& windows) {
  validate_shapes(vec, sentences.size(), chunks.size());
  DocumentFeatures features;
  features.densities = density_bundle(vec, sentences.size());
  features.delta = form_meaning_divergence(features.densities);
  features.gamma = genuine_performed_ratio(features.densities);
  features.eta_norm = normalized_device_entropy(
      window_device_counts(vec, sentences, chunks, windows));

  // lambda_3 column order is the L3 inventory order:
  // [aporetic_endpoint, synthetic_closure, premature_closure,
  //  speculative_depth].
  features.alpha = vec.l3.at(0, 0);
  features.sigma = vec.l3.at(0, 1);
  features.pi = vec.l3.at(0, 2);
  features.varsigma = vec.l3.at(0, 3);
  return features;
}

std::map<std::string, double> level3_proportions(
    std::span<const DocumentFeatures> docs) {
  if (docs.empty()) {
    throw Error(ErrorCode::EmptyGroup, "no documents in group");
  }
  const double n = static_cast<double>(docs.size());
  std::size_t aporetic = 0;
  std::size_t synthetic = 0;
  std::size_t premature = 0;
  std::size_t speculative = 0;
  for (const DocumentFeatures& f : docs) {
    aporetic += f.alpha;
    synthetic += f.sigma;
    premature += f.pi;
    speculative += f.varsigma;
  }
  return {
      {"aporetic_endpoint", static_cast<double>(aporetic) / n},
      {"synthetic_closure", static_cast<double>(synthetic) / n},
      {"premature_closure", static_cast<double>(premature) / n},
      {"speculative_depth", static_cast<double>(speculative) / n},
  };
}

}  // namespace erm
