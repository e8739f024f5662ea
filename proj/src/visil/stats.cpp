// Copyright 2026 The visil Authors.
//
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

#include "visil/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <thread>

#include "visil/rng.hpp"

namespace visil {
namespace {

void check_pair(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) fail(ErrorCode::kInvalidArgument, "x and y differ in length");
  if (x.size() < 3) fail(ErrorCode::kInvalidArgument, "need at least 3 paired samples");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      fail(ErrorCode::kInvalidArgument, "samples must be finite");
    }
  }
}

std::vector<double> centered(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - mean;
  return out;
}

double sum_sq(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return s;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Correlation of already-centred vectors with a fixed normaliser.
double centred_r(const std::vector<double>& xc, const std::vector<double>& yc, double norm) {
  return std::clamp(dot(xc, yc) / norm, -1.0, 1.0);
}

double normal_two_sided_p(double z) {
  const double p = std::erfc(std::fabs(z) / std::sqrt(2.0));
  return std::clamp(p, std::numeric_limits<double>::min(), 1.0);
}

double log_likelihood(const std::vector<double>& x, const std::vector<double>& y, double b0,
                      double b1) {
  // log(1 + exp(t)) evaluated without overflow.
  auto softplus = [](double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); };
  double ll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double eta = b0 + b1 * x[i];
    ll += y[i] * eta - softplus(eta);
  }
  return ll;
}

}  // namespace

double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
  check_pair(x, y);
  const auto xc = centered(x);
  const auto yc = centered(y);
  const double sxx = sum_sq(xc);
  const double syy = sum_sq(yc);
  if (sxx == 0.0 || syy == 0.0) {
    fail(ErrorCode::kDegenerateInput, "Pearson correlation of a constant vector");
  }
  return centred_r(xc, yc, std::sqrt(sxx) * std::sqrt(syy));
}

PermutationResult permutation_test(const std::vector<double>& x, const std::vector<double>& y,
                                   int n_shuffles, std::int64_t seed, int threads) {
  if (n_shuffles < 1) fail(ErrorCode::kInvalidArgument, "n_shuffles must be positive");
  const double r_obs = pearson_r(x, y);
  const auto xc = centered(x);
  const auto yc = centered(y);
  const double norm = std::sqrt(sum_sq(xc)) * std::sqrt(sum_sq(yc));
  // Ties within rounding of |r_obs| count as extreme.
  const double threshold = std::fabs(r_obs) * (1.0 - 1e-12);

  auto count_range = [&](int begin, int end) {
    std::size_t hits = 0;
    std::vector<double> perm;
    for (int k = begin; k < end; ++k) {
      perm = yc;
      Rng rng(substream_seed(static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(k)));
      rng.shuffle(perm);
      if (std::fabs(centred_r(xc, perm, norm)) >= threshold) ++hits;
    }
    return hits;
  };

  std::size_t hits = 0;
  const int n_threads = std::clamp(threads, 1, n_shuffles);
  if (n_threads == 1) {
    hits = count_range(0, n_shuffles);
  } else {
    std::vector<std::size_t> partial(static_cast<std::size_t>(n_threads), 0);
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) {
      const int begin = static_cast<int>(static_cast<long long>(n_shuffles) * t / n_threads);
      const int end = static_cast<int>(static_cast<long long>(n_shuffles) * (t + 1) / n_threads);
      pool.emplace_back([&, t, begin, end] { partial[static_cast<std::size_t>(t)] = count_range(begin, end); });
    }
    for (auto& th : pool) th.join();
    hits = std::accumulate(partial.begin(), partial.end(), std::size_t{0});
  }
  PermutationResult out;
  out.r_obs = r_obs;
  out.p_value = static_cast<double>(1 + hits) / static_cast<double>(1 + n_shuffles);
  out.n_shuffles = n_shuffles;
  out.seed = seed;
  return out;
}

bool is_separable(const std::vector<double>& x, const std::vector<double>& y) {
  double max0 = -INFINITY, min0 = INFINITY, max1 = -INFINITY, min1 = INFINITY;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] > 0.5) {
      max1 = std::max(max1, x[i]);
      min1 = std::min(min1, x[i]);
    } else {
      max0 = std::max(max0, x[i]);
      min0 = std::min(min0, x[i]);
    }
  }
  return max0 <= min1 || max1 <= min0;
}

LogisticFit logistic_fit(const std::vector<double>& x, const std::vector<double>& y) {
  check_pair(x, y);
  double n1 = 0.0;
  for (double v : y) {
    if (v != 0.0 && v != 1.0) fail(ErrorCode::kInvalidArgument, "logistic y must be 0 or 1");
    n1 += v;
  }
  const double n = static_cast<double>(y.size());
  if (n1 == 0.0 || n1 == n) {
    fail(ErrorCode::kDegenerateInput, "logistic fit needs both classes in y");
  }
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) {
    fail(ErrorCode::kDegenerateInput, "logistic fit needs a non-constant x");
  }

  LogisticFit fit;
  const bool separable = is_separable(x, y);
  double b0 = std::log(n1 / (n - n1));
  double b1 = 0.0;
  double ll = log_likelihood(x, y, b0, b1);
  double h00 = 0, h01 = 0, h11 = 0;
  bool diverged = false;

  auto information = [&](double c0, double c1) {
    h00 = h01 = h11 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double p = 1.0 / (1.0 + std::exp(-(c0 + c1 * x[i])));
      const double w = p * (1.0 - p);
      h00 += w;
      h01 += w * x[i];
      h11 += w * x[i] * x[i];
    }
  };

  for (int iter = 1; iter <= 100; ++iter) {
    fit.iterations = iter;
    double g0 = 0.0, g1 = 0.0;
    h00 = h01 = h11 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double p = 1.0 / (1.0 + std::exp(-(b0 + b1 * x[i])));
      const double w = p * (1.0 - p);
      g0 += y[i] - p;
      g1 += (y[i] - p) * x[i];
      h00 += w;
      h01 += w * x[i];
      h11 += w * x[i] * x[i];
    }
    const double det = h00 * h11 - h01 * h01;
    if (!(det > 0.0) || !std::isfinite(det)) {
      diverged = true;
      break;
    }
    b0 += (h11 * g0 - h01 * g1) / det;
    b1 += (h00 * g1 - h01 * g0) / det;
    if (std::hypot(b0, b1) > 1e3 || !std::isfinite(b0) || !std::isfinite(b1)) {
      diverged = true;
      break;
    }
    const double ll_new = log_likelihood(x, y, b0, b1);
    const bool done = std::fabs(ll_new - ll) < 1e-8;
    ll = ll_new;
    if (done) {
      fit.converged = true;
      break;
    }
  }

  fit.beta0 = b0;
  fit.beta1 = b1;
  fit.log_likelihood = ll;
  information(b0, b1);
  const double det = h00 * h11 - h01 * h01;
  if (det > 0.0 && std::isfinite(det)) {
    fit.se0 = std::sqrt(h11 / det);
    fit.se1 = std::sqrt(h00 / det);
    fit.wald_p = normal_two_sided_p(b1 / fit.se1);
  } else {
    fit.se0 = fit.se1 = INFINITY;
    fit.wald_p = 1.0;
  }
  if (separable || diverged) {
    fit.converged = false;
    fit.warnings.push_back("Separation: classes are (quasi-)separable along x; the MLE does not exist");
  } else if (!fit.converged) {
    fit.warnings.push_back("IRLS did not converge within 100 iterations");
  }
  return fit;
}

std::vector<CorrectnessLabel> parse_correctness(std::string_view json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kParseError, std::string("correctness file: ") + e.what());
  }
  if (!j.is_array()) fail(ErrorCode::kParseError, "correctness file must be a JSON array");
  std::vector<CorrectnessLabel> out;
  for (const auto& item : j) {
    try {
      for (const auto& [key, _] : item.items()) {
        if (key != "video_id" && key != "summary_id" && key != "correct") {
          fail(ErrorCode::kParseError, "correctness entry: unknown field '" + key + "'");
        }
      }
      const auto& c = item.at("correct");
      int v = c.is_boolean() ? static_cast<int>(c.get<bool>()) : c.get<int>();
      if (v != 0 && v != 1) fail(ErrorCode::kParseError, "correct must be 0/1 or a boolean");
      out.push_back({item.at("video_id").get<std::string>(),
                     item.at("summary_id").get<std::string>(), v});
    } catch (const Json::exception& e) {
      fail(ErrorCode::kParseError, std::string("correctness entry: ") + e.what());
    }
  }
  return out;
}

Json to_json(const CorrectnessLabel& l) {
  return Json{{"video_id", l.video_id}, {"summary_id", l.summary_id}, {"correct", l.correct}};
}

PairedSample pool_records(const std::vector<ScoreRecord>& records,
                          const std::vector<CorrectnessLabel>& labels, bool force) {
  std::set<std::string> models;
  for (const auto& r : records) models.insert(r.evaluator_model);
  if (models.size() > 1 && !force) {
    std::string names;
    for (const auto& m : models) names += (names.empty() ? "" : ", ") + m;
    fail(ErrorCode::kEvaluatorMismatch,
         "score records come from several evaluator models (" + names +
             "); scores are not comparable across models");
  }
  std::multimap<std::pair<std::string, std::string>, int> by_key;
  for (const auto& l : labels) by_key.emplace(std::make_pair(l.video_id, l.summary_id), l.correct);

  PairedSample out;
  if (models.size() == 1) out.evaluator_model = *models.begin();
  else if (!models.empty()) out.evaluator_model = "mixed";
  for (const auto& r : records) {
    auto key = std::make_pair(r.video_id, r.summary_id);
    auto [lo, hi] = by_key.equal_range(key);
    if (lo == hi) {
      ++out.dropped;
      continue;
    }
    for (auto it = lo; it != hi; ++it) {
      out.x.push_back(r.visil);
      out.y.push_back(it->second);
      out.keys.push_back(key);
    }
  }
  return out;
}

PairedSample trim_extremes(const PairedSample& sample) {
  if (sample.x.size() < 3) return sample;
  // First occurrence of each extreme.
  const auto i_min = static_cast<std::size_t>(
      std::min_element(sample.x.begin(), sample.x.end()) - sample.x.begin());
  const auto i_max = static_cast<std::size_t>(
      std::max_element(sample.x.begin(), sample.x.end()) - sample.x.begin());
  // Constant scores: still remove two samples.
  const auto i_drop = i_min == i_max ? sample.x.size() - 1 : i_max;
  PairedSample out;
  out.evaluator_model = sample.evaluator_model;
  out.dropped = sample.dropped;
  for (std::size_t i = 0; i < sample.x.size(); ++i) {
    if (i == i_min || i == i_drop) continue;
    out.x.push_back(sample.x[i]);
    out.y.push_back(sample.y[i]);
    out.keys.push_back(sample.keys[i]);
  }
  return out;
}

StatReport build_report(const PairedSample& sample, int n_shuffles, std::int64_t seed,
                        int threads) {
  StatReport r;
  r.n = sample.x.size();
  r.evaluator_model = sample.evaluator_model;
  r.dropped = sample.dropped;
  auto fit = logistic_fit(sample.x, sample.y);
  r.beta0 = fit.beta0;
  r.beta1 = fit.beta1;
  r.se1 = fit.se1;
  r.wald_p = fit.wald_p;
  r.converged = fit.converged;
  r.warnings = fit.warnings;
  auto perm = permutation_test(sample.x, sample.y, n_shuffles, seed, threads);
  r.pearson_r = perm.r_obs;
  r.perm_p = perm.p_value;
  r.n_shuffles = n_shuffles;
  r.seed = seed;
  return r;
}

Json to_json(const StatReport& r) {
  return Json{{"n", r.n},
              {"beta0", r.beta0},
              {"beta1", r.beta1},
              {"se1", std::isfinite(r.se1) ? Json(r.se1) : Json()},
              {"wald_p", r.wald_p},
              {"pearson_r", r.pearson_r},
              {"perm_p", r.perm_p},
              {"n_shuffles", r.n_shuffles},
              {"seed", r.seed},
              {"converged", r.converged},
              {"evaluator_model", r.evaluator_model},
              {"dropped", r.dropped},
              {"warnings", r.warnings}};
}

std::string format_report_table(const std::vector<std::pair<std::string, StatReport>>& rows,
                                 int n_shuffles) {
  auto stars = [](double p) { return p < 0.01 ? "**" : (p < 0.05 ? "*" : ""); };
  std::size_t name_w = 7;
  for (const auto& [name, _] : rows) name_w = std::max(name_w, name.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "Permutation test results (N_shuffles = %d)\n", n_shuffles);
  out += buf;
  std::snprintf(buf, sizeof buf, "%-*s  %11s  %11s  %-9s  %9s  %9s\n", static_cast<int>(name_w),
                "Dataset", "Sample Size", "Pearson's r", "p-value", "beta1", "Wald p");
  out += buf;
  for (const auto& [name, r] : rows) {
    char p[32];
    if (r.perm_p < 0.001) {
      std::snprintf(p, sizeof p, "<0.001%s", stars(r.perm_p));
    } else {
      std::snprintf(p, sizeof p, "%.3f%s", r.perm_p, stars(r.perm_p));
    }
    std::snprintf(buf, sizeof buf, "%-*s  %11zu  %11.3f  %-9s  %9.3f  %9.3f\n",
                  static_cast<int>(name_w), name.c_str(), r.n, r.pearson_r, p, r.beta1,
                  r.wald_p);
    out += buf;
  }
  out += "* p < 0.05, ** p < 0.01.\n";
  return out;
}

}  // namespace visil
