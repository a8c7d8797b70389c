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

#include <algorithm>
#include <array>
#include <set>
#include <sstream>

#include "erm/errors.hpp"
#include "erm/json_io.hpp"

namespace erm {

namespace {

constexpr std::array<Group, 3> kGroupOrder = {Group::HE, Group::HN, Group::LG};

constexpr std::array<std::string_view, 3> kCompositeMetrics = {
    "delta", "gamma", "eta_norm"};

std::optional<double> feature_value(const FeatureRecord& record,
                                    const std::string& metric) {
  if (metric == "delta") return record.features.delta;
  if (metric == "gamma") return record.features.gamma;
  if (metric == "eta_norm") return record.features.eta_norm;
  if (metric == "rho") return record.features.densities.rho;
  if (metric == "eps_g") return record.features.densities.eps_g;
  if (metric == "eps_p") return record.features.densities.eps_p;
  return std::nullopt;
}

bool is_feature_metric(const std::string& metric) {
  return metric == "delta" || metric == "gamma" || metric == "eta_norm" ||
         metric == "rho" || metric == "eps_g" || metric == "eps_p";
}

std::string fmt(double value) { return format_double(value); }

std::string fmt3(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", value);
  return buf;
}

std::string fmt_p(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", value);
  return buf;
}

}  // namespace

std::map<std::string, std::size_t> marker_counts(const AnnotationVector& vec) {
  std::map<std::string, std::size_t> counts;
  auto add_level = [&](Level level, const BinaryMatrix& m) {
    const auto markers = marker_inventory(level);
    for (std::size_t c = 0; c < markers.size(); ++c) {
      counts[std::string(markers[c].name)] = m.column_sum(c);
    }
  };
  add_level(Level::L1a, vec.l1a);
  add_level(Level::L1b, vec.l1b);
  add_level(Level::L1c, vec.l1c);
  add_level(Level::L2a, vec.l2a);
  add_level(Level::L2b, vec.l2b);
  add_level(Level::L3, vec.l3);
  return counts;
}

std::vector<std::string> default_metric_plan() {
  std::vector<std::string> plan = {"delta", "gamma",  "eta_norm",
                                   "rho",   "eps_g", "eps_p"};
  for (Level level :
       {Level::L1a, Level::L1b, Level::L1c, Level::L2a, Level::L2b}) {
    for (const MarkerInfo& m : marker_inventory(level)) {
      plan.emplace_back(m.name);
    }
  }
  return plan;
}

std::vector<MetricSamples> collect_metric_samples(
    const std::vector<FeatureRecord>& features,
    const std::map<std::string, std::map<std::string, std::size_t>>&
        counts_by_doc,
    const std::vector<std::string>& plan) {
  std::vector<MetricSamples> out;
  for (const std::string& metric : plan) {
    MetricSamples samples;
    samples.metric = metric;
    const bool from_features = is_feature_metric(metric);
    bool counts_complete = true;
    for (Group group : kGroupOrder) {
      GroupSample sample;
      sample.group_id = std::string(to_string(group));
      for (const FeatureRecord& record : features) {
        if (record.group != group) continue;
        if (from_features) {
          std::optional<double> value = feature_value(record, metric);
          if (value) sample.values.push_back(*value);
        } else {
          auto doc = counts_by_doc.find(record.doc_id);
          if (doc == counts_by_doc.end()) {
            counts_complete = false;
            break;
          }
          auto hit = doc->second.find(metric);
          sample.values.push_back(
              hit == doc->second.end() ? 0.0
                                       : static_cast<double>(hit->second));
        }
      }
      if (!sample.values.empty()) samples.groups.push_back(std::move(sample));
    }
    if (!from_features && !counts_complete) continue;
    if (!samples.groups.empty()) out.push_back(std::move(samples));
  }
  return out;
}

std::vector<Level3Result> level3_comparison(
    const std::vector<FeatureRecord>& features) {
  struct MarkerBit {
    std::string_view name;
    std::uint8_t DocumentFeatures::* member;
  };
  static constexpr std::array<MarkerBit, 4> kBits = {{
      {"aporetic_endpoint", &DocumentFeatures::alpha},
      {"synthetic_closure", &DocumentFeatures::sigma},
      {"premature_closure", &DocumentFeatures::pi},
      {"speculative_depth", &DocumentFeatures::varsigma},
  }};

  std::vector<Level3Result> out;
  for (const MarkerBit& bit : kBits) {
    Level3Result result;
    result.marker = std::string(bit.name);
    for (Group group : kGroupOrder) {
      ProportionCount count;
      count.group_id = std::string(to_string(group));
      for (const FeatureRecord& record : features) {
        if (record.group != group) continue;
        ++count.n;
        count.positives += record.features.*(bit.member);
      }
      if (count.n > 0) result.counts.push_back(std::move(count));
    }
    if (result.counts.size() < 2) {
      result.note = "fewer than two groups";
      out.push_back(std::move(result));
      continue;
    }
    try {
      result.chi2 = chi_squared_proportions(result.counts);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroMarginal) throw;
      result.note = "zero marginal: test undefined";
    }
    out.push_back(std::move(result));
  }
  return out;
}

ModelPanel model_panel(const std::vector<FeatureRecord>& features) {
  ModelPanel panel;
  std::set<std::string> model_names;
  for (const FeatureRecord& record : features) {
    if (record.group == Group::LG && record.model) {
      model_names.insert(*record.model);
    }
  }
  if (model_names.empty()) {
    panel.note = "no model metadata in the LG sub-corpus";
    return panel;
  }

  for (std::string_view metric : kCompositeMetrics) {
    std::vector<GroupSample> eligible;
    for (const std::string& model : model_names) {
      GroupSample sample;
      sample.group_id = model;
      for (const FeatureRecord& record : features) {
        if (record.group != Group::LG || !record.model ||
            *record.model != model) {
          continue;
        }
        std::optional<double> value =
            feature_value(record, std::string(metric));
        if (value) sample.values.push_back(*value);
      }
      if (sample.values.empty()) continue;
      ModelPanel::Cell cell;
      cell.metric = std::string(metric);
      cell.model = model;
      cell.n = sample.size();
      cell.mean = sample_mean(sample.values);
      cell.sd = sample_sd(sample.values);
      panel.cells.push_back(cell);
      if (sample.size() >= 2) eligible.push_back(std::move(sample));
    }
    if (eligible.size() >= 3) {
      OmnibusRow row;
      row.metric = std::string(metric);
      try {
        KruskalWallisResult kw = kruskal_wallis(eligible);
        row.h = kw.h;
        row.df = kw.df;
        row.p = kw.p;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateVariance) throw;
        row.note = "degenerate variance";
      }
      panel.omnibus.push_back(std::move(row));
    }
  }
  if (panel.omnibus.empty()) {
    panel.note = "fewer than three models with n >= 2; omnibus test skipped";
  }
  return panel;
}

ReportBundle build_report(
    const std::vector<FeatureRecord>& features,
    const std::map<std::string, std::map<std::string, std::size_t>>&
        counts_by_doc) {
  ReportBundle bundle;
  bundle.samples =
      collect_metric_samples(features, counts_by_doc, default_metric_plan());

  std::set<Group> groups;
  for (const FeatureRecord& record : features) groups.insert(record.group);
  if (groups.size() >= 2) {
    bundle.comparison = compare_subcorpora(bundle.samples);
    bundle.level3 = level3_comparison(features);
    bundle.group_comparison_done = true;
  } else {
    bundle.notices.push_back(
        "group comparison skipped: fewer than two sub-corpora present");
  }
  bundle.panel = model_panel(features);
  if (!bundle.panel.note.empty()) {
    bundle.notices.push_back("model panel: " + bundle.panel.note);
  }
  return bundle;
}

// ---------------------------------------------------------------------------
// Emitters
// ---------------------------------------------------------------------------

std::string comparison_csv(const SubcorpusComparison& comparison) {
  std::ostringstream out;
  out << "metric,group_a,group_b,mean_a,sd_a,mean_b,sd_b,statistic,p_raw,"
         "p_adjusted,cohens_d\n";
  for (const ComparisonRow& row : comparison.rows) {
    out << row.metric << ',' << row.group_a << ',' << row.group_b << ','
        << fmt(row.mean_a) << ',' << fmt(row.sd_a) << ',' << fmt(row.mean_b)
        << ',' << fmt(row.sd_b) << ','
        << (row.statistic ? fmt(*row.statistic) : "") << ','
        << (row.p_raw ? fmt(*row.p_raw) : "") << ','
        << (row.p_adjusted ? fmt(*row.p_adjusted) : "") << ','
        << (row.cohens_d ? fmt(*row.cohens_d) : "") << '\n';
  }
  return out.str();
}

std::string comparison_markdown(const ReportBundle& bundle) {
  std::ostringstream out;
  out << "# Sub-corpus comparison\n\n";
  for (const std::string& notice : bundle.notices) {
    out << "> " << notice << "\n\n";
  }
  if (!bundle.group_comparison_done) {
    return out.str();
  }

  out << "## Metrics by sub-corpus\n\n"
      << "Values are mean (SD); |d| is Cohen's effect size for the HE vs LG "
         "pair; stars mark the Holm-adjusted HE vs LG p-value "
         "(p < .05 *, p < .01 **, p < .001 ***).\n\n";
  out << "| Metric | HE | HN | LG | abs d (HE-LG) | p adj (HE-LG) |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const MetricSamples& ms : bundle.samples) {
    std::map<std::string, const GroupSample*> by_id;
    for (const GroupSample& g : ms.groups) by_id[g.group_id] = &g;
    auto cell = [&](const char* id) -> std::string {
      auto it = by_id.find(id);
      if (it == by_id.end() || it->second->values.empty()) return "-";
      return fmt3(sample_mean(it->second->values)) + " (" +
             fmt3(sample_sd(it->second->values)) + ")";
    };
    const ComparisonRow* he_lg = nullptr;
    for (const ComparisonRow& row : bundle.comparison.rows) {
      if (row.metric == ms.metric && row.group_a == "HE" &&
          row.group_b == "LG") {
        he_lg = &row;
        break;
      }
    }
    out << "| " << ms.metric << " | " << cell("HE") << " | " << cell("HN")
        << " | " << cell("LG") << " | ";
    if (he_lg != nullptr && he_lg->cohens_d) {
      out << fmt3(std::abs(*he_lg->cohens_d));
    } else {
      out << "-";
    }
    out << " | ";
    if (he_lg != nullptr && he_lg->p_adjusted) {
      out << fmt_p(*he_lg->p_adjusted) << significance_stars(*he_lg->p_adjusted);
    } else {
      out << "-";
    }
    out << " |\n";
  }

  out << "\n## Pairwise rank tests\n\n"
      << "| Metric | Pair | U | p raw | p adjusted | abs d |\n"
      << "|---|---|---|---|---|---|\n";
  for (const ComparisonRow& row : bundle.comparison.rows) {
    out << "| " << row.metric << " | " << row.group_a << " vs " << row.group_b
        << " | " << (row.statistic ? fmt3(*row.statistic) : "-") << " | "
        << (row.p_raw ? fmt_p(*row.p_raw) : "-") << " | ";
    if (row.p_adjusted) {
      out << fmt_p(*row.p_adjusted) << significance_stars(*row.p_adjusted);
    } else {
      out << "-";
    }
    out << " | " << (row.cohens_d ? fmt3(std::abs(*row.cohens_d)) : "-")
        << " |";
    if (!row.note.empty()) out << " <!-- " << row.note << " -->";
    out << "\n";
  }

  if (!bundle.comparison.omnibus.empty()) {
    out << "\n## Omnibus (Kruskal-Wallis)\n\n"
        << "| Metric | H | df | p |\n|---|---|---|---|\n";
    for (const OmnibusRow& row : bundle.comparison.omnibus) {
      out << "| " << row.metric << " | " << fmt3(row.h) << " | " << row.df
          << " | " << (row.p ? fmt_p(*row.p) + significance_stars(*row.p)
                             : std::string("-"));
      if (!row.note.empty()) out << " (" << row.note << ")";
      out << " |\n";
    }
  }

  if (!bundle.level3.empty()) {
    out << "\n## Discourse-structure proportions\n\n"
        << "| Marker | HE | HN | LG | chi2 | p |\n|---|---|---|---|---|---|\n";
    for (const Level3Result& result : bundle.level3) {
      std::map<std::string, const ProportionCount*> by_id;
      for (const ProportionCount& c : result.counts) by_id[c.group_id] = &c;
      auto cell = [&](const char* id) -> std::string {
        auto it = by_id.find(id);
        if (it == by_id.end()) return "-";
        const ProportionCount& c = *it->second;
        const double share =
            static_cast<double>(c.positives) / static_cast<double>(c.n);
        return fmt3(share) + " (" + std::to_string(c.positives) + "/" +
               std::to_string(c.n) + ")";
      };
      out << "| " << result.marker << " | " << cell("HE") << " | "
          << cell("HN") << " | " << cell("LG") << " | ";
      if (result.chi2) {
        out << fmt3(result.chi2->chi2) << " | " << fmt_p(result.chi2->p)
            << significance_stars(result.chi2->p);
      } else {
        out << "- | " << result.note;
      }
      out << " |\n";
    }
  }

  if (!bundle.panel.cells.empty()) {
    out << "\n## Within-LG model panel\n\n"
        << "| Metric | Model | n | mean | SD |\n|---|---|---|---|---|\n";
    for (const ModelPanel::Cell& cell : bundle.panel.cells) {
      out << "| " << cell.metric << " | " << cell.model << " | " << cell.n
          << " | " << fmt3(cell.mean) << " | " << fmt3(cell.sd) << " |\n";
    }
    if (!bundle.panel.omnibus.empty()) {
      out << "\nKruskal-Wallis across models: ";
      bool first = true;
      for (const OmnibusRow& row : bundle.panel.omnibus) {
        if (!first) out << "; ";
        first = false;
        out << row.metric << " p = "
            << (row.p ? fmt_p(*row.p) : std::string("-"));
      }
      out << "\n";
    }
  }
  return out.str();
}

std::string level3_csv(const std::vector<Level3Result>& level3) {
  std::ostringstream out;
  out << "marker,group,positives,n,proportion,chi2,df,p\n";
  for (const Level3Result& result : level3) {
    for (const ProportionCount& c : result.counts) {
      out << result.marker << ',' << c.group_id << ',' << c.positives << ','
          << c.n << ','
          << fmt(static_cast<double>(c.positives) / static_cast<double>(c.n))
          << ',';
      if (result.chi2) {
        out << fmt(result.chi2->chi2) << ',' << result.chi2->df << ','
            << fmt(result.chi2->p);
      } else {
        out << ",,";
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string models_csv(const ModelPanel& panel) {
  std::ostringstream out;
  out << "metric,model,n,mean,sd,kw_h,kw_df,kw_p\n";
  for (const ModelPanel::Cell& cell : panel.cells) {
    const OmnibusRow* omnibus = nullptr;
    for (const OmnibusRow& row : panel.omnibus) {
      if (row.metric == cell.metric) {
        omnibus = &row;
        break;
      }
    }
    out << cell.metric << ',' << cell.model << ',' << cell.n << ','
        << fmt(cell.mean) << ',' << fmt(cell.sd) << ',';
    if (omnibus != nullptr && omnibus->p) {
      out << fmt(omnibus->h) << ',' << omnibus->df << ',' << fmt(*omnibus->p);
    } else {
      out << ",,";
    }
    out << '\n';
  }
  return out.str();
}

std::string scatter_csv(const std::vector<FeatureRecord>& features) {
  std::ostringstream out;
  out << "doc_id,group,model,eps_g,eps_p\n";
  for (const FeatureRecord& record : features) {
    out << record.doc_id << ',' << to_string(record.group) << ','
        << (record.model ? *record.model : "") << ','
        << fmt(record.features.densities.eps_g) << ','
        << fmt(record.features.densities.eps_p) << '\n';
  }
  return out.str();
}

std::string metric_values_csv(const std::vector<FeatureRecord>& features) {
  std::ostringstream out;
  out << "doc_id,group,model,metric,value\n";
  for (const FeatureRecord& record : features) {
    for (std::string_view metric : kCompositeMetrics) {
      std::optional<double> value =
          feature_value(record, std::string(metric));
      if (!value) continue;  // undefined eta_norm rows are omitted
      out << record.doc_id << ',' << to_string(record.group) << ','
          << (record.model ? *record.model : "") << ',' << metric << ','
          << fmt(*value) << '\n';
    }
  }
  return out.str();
}

std::string device_counts_csv(
    const std::vector<FeatureRecord>& features,
    const std::map<std::string, std::map<std::string, std::size_t>>&
        counts_by_doc) {
  std::ostringstream out;
  out << "doc_id,group,marker,count\n";
  for (const FeatureRecord& record : features) {
    auto doc = counts_by_doc.find(record.doc_id);
    if (doc == counts_by_doc.end()) continue;
    for (const MarkerInfo& marker : all_markers()) {
      auto hit = doc->second.find(std::string(marker.name));
      const std::size_t count = hit == doc->second.end() ? 0 : hit->second;
      out << record.doc_id << ',' << to_string(record.group) << ','
          << marker.name << ',' << count << '\n';
    }
  }
  return out.str();
}

std::string device_means_markdown(
    const std::vector<FeatureRecord>& features,
    const std::map<std::string, std::map<std::string, std::size_t>>&
        counts_by_doc) {
  std::ostringstream out;
  out << "# Per-device mean counts\n\n"
      << "Mean occurrences per document, by sub-corpus.\n\n"
      << "| Marker | Level | HE | HN | LG |\n|---|---|---|---|---|\n";
  for (const MarkerInfo& marker : all_markers()) {
    out << "| " << marker.name << " | " << to_string(marker.level) << " |";
    for (Group group : kGroupOrder) {
      double total = 0.0;
      std::size_t n = 0;
      for (const FeatureRecord& record : features) {
        if (record.group != group) continue;
        auto doc = counts_by_doc.find(record.doc_id);
        if (doc == counts_by_doc.end()) continue;
        auto hit = doc->second.find(std::string(marker.name));
        total += hit == doc->second.end()
                     ? 0.0
                     : static_cast<double>(hit->second);
        ++n;
      }
      if (n == 0) {
        out << " - |";
      } else {
        out << ' ' << fmt3(total / static_cast<double>(n)) << " |";
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace erm
