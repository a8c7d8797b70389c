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
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace erm {

// One group's per-document values for a metric; undefined values are
// dropped before construction.
struct GroupSample {
  std::string group_id;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

double sample_mean(std::span<const double> values);
// Sample standard deviation (n - 1 denominator).
double sample_sd(std::span<const double> values);

// Cohen's d with the equal-weight pooled SD sqrt((sd_a^2 + sd_b^2) / 2).
// Positive when group b exceeds group a; summary tables report |d|.
// Throws DegenerateVariance when the pooled SD is zero.
double cohens_d(const GroupSample& a, const GroupSample& b);
double cohens_d_from_summary(double mean_a, double sd_a, double mean_b,
                             double sd_b);

struct RankTestResult {
  double u = 0.0;  // U statistic of group a
  double p = 1.0;  // two-sided
  bool exact = false;
};

// Two-sided Mann-Whitney U with average ranks for ties. Uses exact
// enumeration of all group assignments when n_a + n_b <= 12, otherwise the
// normal approximation with tie-corrected variance and continuity
// correction. Throws DegenerateVariance when all pooled values are
// identical.
RankTestResult mann_whitney_u(const GroupSample& a, const GroupSample& b);

// The two computation paths, exposed for calibration checks.
RankTestResult mann_whitney_exact(const GroupSample& a, const GroupSample& b);
RankTestResult mann_whitney_normal(const GroupSample& a, const GroupSample& b);

struct KruskalWallisResult {
  double h = 0.0;
  std::size_t df = 0;
  double p = 1.0;
};

// Tie-corrected Kruskal-Wallis H; p from the chi-squared distribution with
// (g - 1) degrees of freedom.
KruskalWallisResult kruskal_wallis(std::span<const GroupSample> groups);

struct ProportionCount {
  std::string group_id;
  std::size_t positives = 0;
  std::size_t n = 0;
};

struct ChiSquaredResult {
  double chi2 = 0.0;
  std::size_t df = 0;
  double p = 1.0;
};

// Contingency chi-squared over the 2 x g table of (positive, negative)
// counts. Throws ZeroMarginal when a row or column of the table sums to 0.
ChiSquaredResult chi_squared_proportions(std::span<const ProportionCount> counts);

// Holm step-down adjustment; output is pointwise >= input, capped at 1.
std::vector<double> holm_adjust(std::span<const double> p_values);

double normal_cdf(double z);
// Upper tail of the chi-squared distribution.
double chi_squared_survival(double x, std::size_t df);

// One pairwise comparison of a metric across two groups.
struct ComparisonRow {
  std::string metric;
  std::string group_a;
  std::string group_b;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  double mean_a = 0.0;
  double sd_a = 0.0;
  double mean_b = 0.0;
  double sd_b = 0.0;
  std::optional<double> statistic;  // Mann-Whitney U
  std::optional<double> p_raw;
  std::optional<double> p_adjusted;
  std::optional<double> cohens_d;
  std::string note;  // degeneracy notices; not a CSV column
};

struct OmnibusRow {
  std::string metric;
  double h = 0.0;
  std::size_t df = 0;
  std::optional<double> p;
  std::string note;
};

struct MetricSamples {
  std::string metric;
  std::vector<GroupSample> groups;
};

struct SubcorpusComparison {
  std::vector<ComparisonRow> rows;
  std::vector<OmnibusRow> omnibus;
};

// For each metric: group means/SDs, all pairwise rank tests with Holm
// adjustment within the metric family, Cohen's d per pair, and a
// Kruskal-Wallis omnibus when three or more groups qualify. Groups with
// fewer than two defined values are left out of testing; degenerate
// variance is surfaced in the row note rather than aborting the run.
SubcorpusComparison compare_subcorpora(std::span<const MetricSamples> metrics);

// "***" below .001, "**" below .01, "*" below .05, empty otherwise.
std::string significance_stars(double p);

}  // namespace erm
