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

#include "erm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "erm/errors.hpp"

namespace erm {

namespace {

constexpr std::size_t kExactEnumerationLimit = 12;

void require_sample(const GroupSample& g) {
  if (g.size() < 2) {
    throw Error(ErrorCode::EmptyGroup,
                "group '" + g.group_id + "' needs n >= 2, has " +
                    std::to_string(g.size()));
  }
  for (double v : g.values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::SchemaError,
                  "non-finite value in group '" + g.group_id + "'");
    }
  }
}

// Average ranks (midranks) of `values` within the pooled ordering,
// doubled so that ties at .5 stay integral. Also accumulates the tie
// correction term sum(t^3 - t).
struct RankInfo {
  std::vector<long long> doubled_ranks;  // aligned with input order
  double tie_term = 0.0;
  bool all_identical = false;
};

RankInfo pooled_ranks(std::span<const double> pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });

  RankInfo info;
  info.doubled_ranks.assign(n, 0);
  std::size_t i = 0;
  std::size_t distinct = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && pooled[order[j]] == pooled[order[i]]) ++j;
    // Ranks i+1 .. j averaged; doubled average = (i + 1 + j).
    const long long doubled = static_cast<long long>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      info.doubled_ranks[order[k]] = doubled;
    }
    const double t = static_cast<double>(j - i);
    info.tie_term += t * t * t - t;
    ++distinct;
    i = j;
  }
  info.all_identical = (distinct <= 1);
  return info;
}

double doubled_u_statistic(std::span<const long long> doubled_ranks,
                           std::size_t n_a) {
  long long doubled_rank_sum = 0;
  for (std::size_t i = 0; i < n_a; ++i) doubled_rank_sum += doubled_ranks[i];
  return static_cast<double>(doubled_rank_sum) -
         static_cast<double>(n_a * (n_a + 1));
}

RankInfo pooled_ranks_of(const GroupSample& a, const GroupSample& b) {
  std::vector<double> pooled;
  pooled.reserve(a.size() + b.size());
  pooled.insert(pooled.end(), a.values.begin(), a.values.end());
  pooled.insert(pooled.end(), b.values.begin(), b.values.end());
  RankInfo info = pooled_ranks(pooled);
  if (info.all_identical) {
    throw Error(ErrorCode::DegenerateVariance,
                "all pooled values identical");
  }
  return info;
}

}  // namespace

double sample_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mu = sample_mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double cohens_d(const GroupSample& a, const GroupSample& b) {
  require_sample(a);
  require_sample(b);
  return cohens_d_from_summary(sample_mean(a.values), sample_sd(a.values),
                               sample_mean(b.values), sample_sd(b.values));
}

double cohens_d_from_summary(double mean_a, double sd_a, double mean_b,
                             double sd_b) {
  const double pooled = std::sqrt((sd_a * sd_a + sd_b * sd_b) / 2.0);
  if (pooled == 0.0) {
    throw Error(ErrorCode::DegenerateVariance, "pooled SD is zero");
  }
  return (mean_b - mean_a) / pooled;
}

RankTestResult mann_whitney_exact(const GroupSample& a, const GroupSample& b) {
  require_sample(a);
  require_sample(b);
  const std::size_t n_a = a.size();
  const std::size_t n_b = b.size();
  const std::size_t n = n_a + n_b;

  RankInfo info = pooled_ranks_of(a, b);
  const long long doubled_u_obs = static_cast<long long>(
      std::llround(doubled_u_statistic(info.doubled_ranks, n_a)));
  const double u_obs = static_cast<double>(doubled_u_obs) / 2.0;

  // Enumerate every assignment of n_a pooled positions to group a. Ranks
  // are fixed by the pooled multiset, so each assignment's U depends only
  // on which positions are chosen. Deviations are measured from the exact
  // center n_a * n_b / 2 in doubled units to keep the comparison integral.
  const long long doubled_center = static_cast<long long>(n_a * n_b);
  const long long doubled_obs_dev = std::llabs(doubled_u_obs - doubled_center);

  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(n_a), true);
  std::sort(pick.begin(), pick.end());  // lexicographically first arrangement

  std::size_t total = 0;
  std::size_t at_least_as_extreme = 0;
  do {
    long long doubled_rank_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pick[i]) doubled_rank_sum += info.doubled_ranks[i];
    }
    const long long doubled_u =
        doubled_rank_sum - static_cast<long long>(n_a * (n_a + 1));
    if (std::llabs(doubled_u - doubled_center) >= doubled_obs_dev) {
      ++at_least_as_extreme;
    }
    ++total;
  } while (std::next_permutation(pick.begin(), pick.end()));

  RankTestResult result;
  result.u = u_obs;
  result.p = static_cast<double>(at_least_as_extreme) /
             static_cast<double>(total);
  result.exact = true;
  return result;
}

RankTestResult mann_whitney_normal(const GroupSample& a, const GroupSample& b) {
  require_sample(a);
  require_sample(b);
  const double n_a = static_cast<double>(a.size());
  const double n_b = static_cast<double>(b.size());
  const double n = n_a + n_b;

  RankInfo info = pooled_ranks_of(a, b);
  const double u = doubled_u_statistic(info.doubled_ranks, a.size()) / 2.0;
  const double mean_u = n_a * n_b / 2.0;
  const double variance =
      n_a * n_b / 12.0 * ((n + 1.0) - info.tie_term / (n * (n - 1.0)));
  if (variance <= 0.0) {
    throw Error(ErrorCode::DegenerateVariance, "zero rank variance");
  }
  double deviation = std::abs(u - mean_u) - 0.5;  // continuity correction
  if (deviation < 0.0) deviation = 0.0;
  const double z = deviation / std::sqrt(variance);

  RankTestResult result;
  result.u = u;
  result.p = std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
  result.exact = false;
  return result;
}

RankTestResult mann_whitney_u(const GroupSample& a, const GroupSample& b) {
  if (a.size() + b.size() <= kExactEnumerationLimit) {
    return mann_whitney_exact(a, b);
  }
  return mann_whitney_normal(a, b);
}

KruskalWallisResult kruskal_wallis(std::span<const GroupSample> groups) {
  if (groups.size() < 2) {
    throw Error(ErrorCode::EmptyGroup, "need at least two groups");
  }
  std::vector<double> pooled;
  for (const GroupSample& g : groups) {
    require_sample(g);
    pooled.insert(pooled.end(), g.values.begin(), g.values.end());
  }
  const double n = static_cast<double>(pooled.size());
  RankInfo info = pooled_ranks(pooled);
  if (info.all_identical) {
    throw Error(ErrorCode::DegenerateVariance, "all pooled values identical");
  }

  double h = 0.0;
  std::size_t offset = 0;
  for (const GroupSample& g : groups) {
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      rank_sum += static_cast<double>(info.doubled_ranks[offset + i]) / 2.0;
    }
    offset += g.size();
    h += rank_sum * rank_sum / static_cast<double>(g.size());
  }
  h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);

  const double correction = 1.0 - info.tie_term / (n * n * n - n);
  if (correction <= 0.0) {
    throw Error(ErrorCode::DegenerateVariance, "tie correction is zero");
  }
  h /= correction;

  KruskalWallisResult result;
  result.h = h;
  result.df = groups.size() - 1;
  result.p = chi_squared_survival(h, result.df);
  return result;
}

ChiSquaredResult chi_squared_proportions(
    std::span<const ProportionCount> counts) {
  if (counts.size() < 2) {
    throw Error(ErrorCode::EmptyGroup, "need at least two groups");
  }
  double positives = 0.0;
  double negatives = 0.0;
  for (const ProportionCount& c : counts) {
    if (c.n < 1) {
      throw Error(ErrorCode::EmptyGroup,
                  "group '" + c.group_id + "' has n = 0");
    }
    if (c.positives > c.n) {
      throw Error(ErrorCode::SchemaError,
                  "positives exceed n in group '" + c.group_id + "'");
    }
    positives += static_cast<double>(c.positives);
    negatives += static_cast<double>(c.n - c.positives);
  }
  if (positives == 0.0 || negatives == 0.0) {
    throw Error(ErrorCode::ZeroMarginal,
                "a row of the contingency table sums to zero");
  }
  const double total = positives + negatives;

  double chi2 = 0.0;
  for (const ProportionCount& c : counts) {
    const double col = static_cast<double>(c.n);
    const double expected_pos = col * positives / total;
    const double expected_neg = col * negatives / total;
    const double obs_pos = static_cast<double>(c.positives);
    const double obs_neg = static_cast<double>(c.n - c.positives);
    chi2 += (obs_pos - expected_pos) * (obs_pos - expected_pos) / expected_pos;
    chi2 += (obs_neg - expected_neg) * (obs_neg - expected_neg) / expected_neg;
  }

  ChiSquaredResult result;
  result.chi2 = chi2;
  result.df = counts.size() - 1;
  result.p = chi_squared_survival(chi2, result.df);
  return result;
}

std::vector<double> holm_adjust(std::span<const double> p_values) {
  const std::size_t m = p_values.size();
  std::vector<double> adjusted(m, 0.0);
  if (m == 0) return adjusted;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return p_values[a] < p_values[b];
  });

  double running_max = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double scaled =
        static_cast<double>(m - k) * p_values[order[k]];
    running_max = std::max(running_max, scaled);
    adjusted[order[k]] = std::min(1.0, running_max);
  }
  return adjusted;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

// Regularized incomplete gamma, series and continued-fraction forms.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_continued_fraction(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / 1e-30;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double frac = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    frac *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return frac * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi_squared_survival(double x, std::size_t df) {
  if (x <= 0.0) return 1.0;
  const double a = static_cast<double>(df) / 2.0;
  const double half_x = x / 2.0;
  if (half_x < a + 1.0) {
    return 1.0 - gamma_p_series(a, half_x);
  }
  return gamma_q_continued_fraction(a, half_x);
}

SubcorpusComparison compare_subcorpora(
    std::span<const MetricSamples> metrics) {
  SubcorpusComparison out;
  for (const MetricSamples& ms : metrics) {
    std::vector<const GroupSample*> eligible;
    for (const GroupSample& g : ms.groups) {
      if (g.size() >= 2) eligible.push_back(&g);
    }
    if (eligible.size() < 2) continue;

    std::vector<std::size_t> row_index_with_p;
    std::vector<double> family_p;
    for (std::size_t i = 0; i < eligible.size(); ++i) {
      for (std::size_t j = i + 1; j < eligible.size(); ++j) {
        const GroupSample& a = *eligible[i];
        const GroupSample& b = *eligible[j];
        ComparisonRow row;
        row.metric = ms.metric;
        row.group_a = a.group_id;
        row.group_b = b.group_id;
        row.n_a = a.size();
        row.n_b = b.size();
        row.mean_a = sample_mean(a.values);
        row.sd_a = sample_sd(a.values);
        row.mean_b = sample_mean(b.values);
        row.sd_b = sample_sd(b.values);
        try {
          RankTestResult test = mann_whitney_u(a, b);
          row.statistic = test.u;
          row.p_raw = test.p;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::DegenerateVariance) throw;
          row.note = "degenerate variance: rank test undefined";
        }
        try {
          row.cohens_d = cohens_d(a, b);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::DegenerateVariance) throw;
          if (row.note.empty()) row.note = "degenerate variance";
        }
        if (row.p_raw) {
          row_index_with_p.push_back(out.rows.size());
          family_p.push_back(*row.p_raw);
        }
        out.rows.push_back(std::move(row));
      }
    }
    // Holm within this metric's family of pairwise tests.
    std::vector<double> adjusted = holm_adjust(family_p);
    for (std::size_t k = 0; k < row_index_with_p.size(); ++k) {
      out.rows[row_index_with_p[k]].p_adjusted = adjusted[k];
    }

    if (eligible.size() >= 3) {
      OmnibusRow omni;
      omni.metric = ms.metric;
      std::vector<GroupSample> groups;
      for (const GroupSample* g : eligible) groups.push_back(*g);
      try {
        KruskalWallisResult kw = kruskal_wallis(groups);
        omni.h = kw.h;
        omni.df = kw.df;
        omni.p = kw.p;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateVariance) throw;
        omni.note = "degenerate variance: omnibus undefined";
      }
      out.omnibus.push_back(std::move(omni));
    }
  }
  return out;
}

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

}  // namespace erm
