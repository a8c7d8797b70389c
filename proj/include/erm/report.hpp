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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "erm/corpus.hpp"
#include "erm/stats.hpp"

namespace erm {

// Per-document count of every marker: column sums for sentence- and
// chunk-level markers, the 0/1 bit for document-level ones.
std::map<std::string, std::size_t> marker_counts(const AnnotationVector& vec);

// Composite metrics and densities first, then per-marker counts for every
// level except the document-structure markers (those are compared as
// proportions, not ranks).
std::vector<std::string> default_metric_plan();

// Group samples per metric in the plan, in HE/HN/LG order. Documents with
// undefined eta_norm are dropped from that metric's sample. Marker-count
// metrics require counts_by_doc; they are skipped when it lacks a document.
std::vector<MetricSamples> collect_metric_samples(
    const std::vector<FeatureRecord>& features,
    const std::map<std::string, std::map<std::string, std::size_t>>&
        counts_by_doc,
    const std::vector<std::string>& plan);

struct Level3Result {
  std::string marker;
  std::vector<ProportionCount> counts;  // HE/HN/LG order
  std::optional<ChiSquaredResult> chi2;
  std::string note;
};

std::vector<Level3Result> level3_comparison(
    const std::vector<FeatureRecord>& features);

struct ModelPanel {
  // Per composite metric and model: n, mean, sd.
  struct Cell {
    std::string metric;
    std::string model;
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
  };
  std::vector<Cell> cells;
  std::vector<OmnibusRow> omnibus;  // Kruskal-Wallis per metric when >= 3 models
  std::string note;
};

// Breakdown of the composite metrics across generator models within LG.
ModelPanel model_panel(const std::vector<FeatureRecord>& features);

struct ReportBundle {
  std::vector<MetricSamples> samples;
  SubcorpusComparison comparison;
  std::vector<Level3Result> level3;
  ModelPanel panel;
  bool group_comparison_done = false;
  std::vector<std::string> notices;
};

ReportBundle build_report(
    const std::vector<FeatureRecord>& features,
    const std::map<std::string, std::map<std::string, std::size_t>>&
        counts_by_doc);

// ---------------------------------------------------------------------------
// Emitters. All output is deterministic for fixed inputs.
// ---------------------------------------------------------------------------

std::string comparison_csv(const SubcorpusComparison& comparison);
std::string comparison_markdown(const ReportBundle& bundle);
std::string level3_csv(const std::vector<Level3Result>& level3);
std::string models_csv(const ModelPanel& panel);
// Plot-ready per-document data: (eps_g, eps_p) scatter and long-format
// metric values.
std::string scatter_csv(const std::vector<FeatureRecord>& features);
std::string metric_values_csv(const std::vector<FeatureRecord>& features);
// Raw per-document marker counts and the per-group mean-count table.
std::string device_counts_csv(
    const std::vector<FeatureRecord>& features,
    const std::map<std::string, std::map<std::string, std::size_t>>&
        counts_by_doc);
std::string device_means_markdown(
    const std::vector<FeatureRecord>& features,
    const std::map<std::string, std::map<std::string, std::size_t>>&
        counts_by_doc);

}  // namespace erm
