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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "erm/annotation.hpp"
#include "erm/segmentation.hpp"

namespace erm {

// Per-sentence densities of the annotation layers. rho aggregates all three
// rhetorical sub-levels; eps_g / eps_p are the genuine and performed
// epistemic marker densities.
struct DensityBundle {
  double rho = 0.0;
  double eps_g = 0.0;
  double eps_p = 0.0;
  std::size_t sentence_count = 0;
};

// The per-document feature tuple: delta (form-meaning divergence), gamma
// (genuine-to-performed ratio), eta_norm (normalized device-distribution
// entropy, absent when the document holds no localizable devices), and the
// four document-level structure indicators in taxonomy column order
// (alpha = aporetic endpoint, sigma = synthetic closure, pi = premature
// closure, varsigma = speculative depth).
struct DocumentFeatures {
  double delta = 0.0;
  double gamma = 0.0;
  std::optional<double> eta_norm;
  std::uint8_t sigma = 0;
  std::uint8_t alpha = 0;
  std::uint8_t pi = 0;
  std::uint8_t varsigma = 0;
  DensityBundle densities;
};

// Per-window counts of localizable rhetorical devices.
struct WindowCounts {
  std::vector<std::size_t> counts;

  std::size_t window_count() const { return counts.size(); }
  std::size_t total() const;
};

double rhetorical_density(const AnnotationVector& vec,
                          std::size_t sentence_count);

// (eps_g, eps_p)
std::pair<double, double> epistemic_densities(const AnnotationVector& vec,
                                              std::size_t sentence_count);

DensityBundle density_bundle(const AnnotationVector& vec,
                             std::size_t sentence_count);

// delta = rho * eps_p / (eps_g + 1). Multiplicative: zero iff rho or eps_p
// is zero; genuine grounding in the denominator attenuates the score.
double form_meaning_divergence(const DensityBundle& densities);

// gamma = eps_g / (eps_p + 1).
double genuine_performed_ratio(const DensityBundle& densities);

// Assigns each sentence-level device to the window holding the first word
// of its host sentence and each chunk-level device to the window holding
// the first word of its chunk's first sentence. Document-global devices
// have no position and are excluded.
WindowCounts window_device_counts(const AnnotationVector& vec,
                                  const SentenceSequence& sentences,
                                  const ChunkSequence& chunks,
                                  const WindowPartition& windows);

// Normalized Shannon entropy of the device distribution over windows, log
// base 2, with 0*log(0) = 0. Returns nullopt when no devices are
// localizable (excluded from group statistics); a single window is
// vacuously uniform and scores 1.
std::optional<double> normalized_device_entropy(const WindowCounts& counts);

// Composes the individual metric operations into the feature tuple; no
// hidden state beyond its inputs.
DocumentFeatures extract_features(const AnnotationVector& vec,
                                  const SentenceSequence& sentences,
                                  const ChunkSequence& chunks,
                                  const WindowPartition& windows);

// Sub-corpus proportion of each document-level structure marker, keyed by
// canonical marker name. Throws EmptyGroup on an empty document list.
std::map<std::string, double> level3_proportions(
    std::span<const DocumentFeatures> docs);

}  // namespace erm
