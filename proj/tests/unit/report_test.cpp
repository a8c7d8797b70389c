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

#include "erm/report.hpp"

#include "doctest.h"

using namespace erm;

namespace {

FeatureRecord record(std::string doc_id, Group group,
                     std::optional<std::string> model, double delta,
                     double gamma, std::optional<double> eta,
                     std::uint8_t alpha = 0) {
  FeatureRecord r;
  r.doc_id = std::move(doc_id);
  r.group = group;
  r.model = std::move(model);
  r.features.delta = delta;
  r.features.gamma = gamma;
  r.features.eta_norm = eta;
  r.features.alpha = alpha;
  r.features.densities = {delta * 2.0, gamma, delta, 10};
  return r;
}

std::vector<FeatureRecord> three_group_features() {
  return {
      record("he-1", Group::HE, std::nullopt, 0.1, 0.9, 0.5),
      record("he-2", Group::HE, std::nullopt, 0.2, 0.8, 0.6),
      record("hn-1", Group::HN, std::nullopt, 0.3, 0.4, std::nullopt),
      record("hn-2", Group::HN, std::nullopt, 0.4, 0.5, 0.7),
      record("hn-3", Group::HN, std::nullopt, 0.35, 0.45, 0.75, 1),
      record("lg-1", Group::LG, "m-a", 0.8, 0.2, 0.9, 1),
      record("lg-2", Group::LG, "m-a", 0.9, 0.1, 0.95, 1),
      record("lg-3", Group::LG, "m-b", 0.85, 0.15, 0.92),
  };
}

}  // namespace

TEST_CASE("marker_counts sums matrix columns by marker name") {
  AnnotationVector vec;
  vec.l1a = BinaryMatrix(3, 5);
  vec.l1b = BinaryMatrix(2, 3);
  vec.l1c = BinaryMatrix(1, 2);
  vec.l2a = BinaryMatrix(3, 4);
  vec.l2b = BinaryMatrix(3, 2);
  vec.l3 = BinaryMatrix(1, 4);
  vec.l1a.set(0, 0, 1);
  vec.l1a.set(2, 0, 1);
  vec.l1a.set(1, 3, 1);
  vec.l1b.set(1, 2, 1);
  vec.l1c.set(0, 1, 1);
  vec.l2b.set(0, 0, 1);
  vec.l3.set(0, 0, 1);

  auto counts = marker_counts(vec);
  CHECK(counts["tricolon"] == 2);
  CHECK(counts["erotema"] == 1);
  CHECK(counts["auxesis"] == 1);
  CHECK(counts["evr"] == 1);
  CHECK(counts["complexity_tokens"] == 1);
  CHECK(counts["aporetic_endpoint"] == 1);
  CHECK(counts["chiasmus"] == 0);
  CHECK(counts.size() == 20);
}

TEST_CASE("metric samples: group order, undefined values dropped") {
  auto features = three_group_features();
  std::map<std::string, std::map<std::string, std::size_t>> counts;
  for (const FeatureRecord& r : features) counts[r.doc_id] = {{"tricolon", 2}};

  auto samples = collect_metric_samples(features, counts,
                                        {"delta", "eta_norm", "tricolon"});
  REQUIRE(samples.size() == 3);
  CHECK(samples[0].metric == "delta");
  REQUIRE(samples[0].groups.size() == 3);
  CHECK(samples[0].groups[0].group_id == "HE");
  CHECK(samples[0].groups[1].group_id == "HN");
  CHECK(samples[0].groups[2].group_id == "LG");
  CHECK(samples[0].groups[1].size() == 3);

  // hn-1 has undefined eta_norm and is dropped from that metric only.
  CHECK(samples[1].metric == "eta_norm");
  CHECK(samples[1].groups[1].size() == 2);

  CHECK(samples[2].metric == "tricolon");
  CHECK(samples[2].groups[0].values == std::vector<double>{2.0, 2.0});
}

TEST_CASE("metric samples skip count metrics when counts are missing") {
  auto features = three_group_features();
  std::map<std::string, std::map<std::string, std::size_t>> empty;
  auto samples = collect_metric_samples(features, empty, {"delta", "tricolon"});
  REQUIRE(samples.size() == 1);
  CHECK(samples[0].metric == "delta");
}

TEST_CASE("level3 comparison counts positives per group") {
  auto features = three_group_features();
  auto level3 = level3_comparison(features);
  REQUIRE(level3.size() == 4);
  const Level3Result& aporetic = level3[0];
  CHECK(aporetic.marker == "aporetic_endpoint");
  REQUIRE(aporetic.counts.size() == 3);
  CHECK(aporetic.counts[0].positives == 0);  // HE
  CHECK(aporetic.counts[1].positives == 1);  // HN
  CHECK(aporetic.counts[2].positives == 2);  // LG
  CHECK(aporetic.chi2.has_value());

  // A marker nobody set has a zero marginal: surfaced as a note.
  const Level3Result& premature = level3[2];
  CHECK(premature.marker == "premature_closure");
  CHECK_FALSE(premature.chi2.has_value());
  CHECK_FALSE(premature.note.empty());
}

TEST_CASE("model panel: omnibus requires three models with n >= 2") {
  SUBCASE("two models: note, no omnibus") {
    ModelPanel panel = model_panel(three_group_features());
    CHECK(panel.omnibus.empty());
    CHECK_FALSE(panel.note.empty());
    CHECK_FALSE(panel.cells.empty());
  }

  SUBCASE("three models with enough documents run Kruskal-Wallis") {
    std::vector<FeatureRecord> features;
    int i = 0;
    for (const char* model : {"m-a", "m-b", "m-c"}) {
      for (int k = 0; k < 3; ++k) {
        features.push_back(record("lg-" + std::to_string(++i), Group::LG,
                                  model, 0.1 * i, 0.2 * i, 0.05 * i));
      }
    }
    ModelPanel panel = model_panel(features);
    CHECK(panel.cells.size() == 9);  // 3 metrics x 3 models
    REQUIRE(panel.omnibus.size() == 3);
    for (const OmnibusRow& row : panel.omnibus) {
      CHECK(row.p.has_value());
    }
  }

  SUBCASE("no model metadata") {
    auto features = three_group_features();
    for (FeatureRecord& r : features) r.model.reset();
    ModelPanel panel = model_panel(features);
    CHECK(panel.cells.empty());
    CHECK(panel.note == "no model metadata in the LG sub-corpus");
  }
}

TEST_CASE("build_report: single-group corpus skips group comparison") {
  std::vector<FeatureRecord> lg_only = {
      record("lg-1", Group::LG, "m-a", 0.8, 0.2, 0.9),
      record("lg-2", Group::LG, "m-a", 0.9, 0.1, 0.95),
      record("lg-3", Group::LG, "m-b", 0.85, 0.15, 0.92),
  };
  ReportBundle bundle = build_report(lg_only, {});
  CHECK_FALSE(bundle.group_comparison_done);
  CHECK(bundle.comparison.rows.empty());
  REQUIRE_FALSE(bundle.notices.empty());
  CHECK(bundle.notices.front().find("skipped") != std::string::npos);
  // The model panel still renders.
  CHECK_FALSE(bundle.panel.cells.empty());
  const std::string md = comparison_markdown(bundle);
  CHECK(md.find("skipped") != std::string::npos);
}

TEST_CASE("emitters are deterministic and well-formed") {
  auto features = three_group_features();
  std::map<std::string, std::map<std::string, std::size_t>> counts;
  for (const FeatureRecord& r : features) {
    counts[r.doc_id] = {{"tricolon", 1}, {"erotema", 2}};
  }
  ReportBundle bundle = build_report(features, counts);
  CHECK(bundle.group_comparison_done);

  const std::string csv = comparison_csv(bundle.comparison);
  CHECK(csv.rfind("metric,group_a,group_b,", 0) == 0);
  CHECK(csv == comparison_csv(bundle.comparison));

  const std::string md = comparison_markdown(bundle);
  CHECK(md.find("| delta |") != std::string::npos);
  CHECK(md.find("HE vs LG") != std::string::npos);
  CHECK(md.find("## Discourse-structure proportions") != std::string::npos);

  const std::string l3 = level3_csv(bundle.level3);
  CHECK(l3.rfind("marker,group,positives,n,proportion", 0) == 0);

  const std::string scatter = scatter_csv(features);
  CHECK(scatter.find("he-1,HE,,") != std::string::npos);
  CHECK(scatter.find("lg-1,LG,m-a,") != std::string::npos);

  // Long-format metric values omit undefined eta rows.
  const std::string values = metric_values_csv(features);
  CHECK(values.find("hn-1,HN,,delta,") != std::string::npos);
  CHECK(values.find("hn-1,HN,,eta_norm") == std::string::npos);

  const std::string device_csv = device_counts_csv(features, counts);
  CHECK(device_csv.find("he-1,HE,tricolon,1") != std::string::npos);
  CHECK(device_csv.find("he-1,HE,chiasmus,0") != std::string::npos);

  const std::string device_md = device_means_markdown(features, counts);
  CHECK(device_md.find("| tricolon | 1a |") != std::string::npos);
}
