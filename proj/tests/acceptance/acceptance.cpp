// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "defr/classifier.hpp"
#include "defr/dataio.hpp"
#include "defr/harness.hpp"
#include "defr/losses.hpp"
#include "defr/metrics.hpp"
#include "defr/sampler.hpp"
#include "defr/synth.hpp"

using namespace defr;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
  Outcome out;
  try {
    out = check();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  if (!out.pass) ++failures;
  std::printf("%s %s: %s\n", out.pass ? "PASS" : "FAIL", name.c_str(), out.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

void random_instance(std::mt19937_64& rng, std::size_t max_c, double range,
                     std::vector<double>& s, std::vector<std::int8_t>& y) {
  std::size_t c = std::uniform_int_distribution<std::size_t>(1, max_c)(rng);
  std::uniform_real_distribution<double> logit(-range, range);
  std::bernoulli_distribution coin(0.5);
  s.resize(c);
  y.resize(c);
  for (std::size_t i = 0; i < c; ++i) {
    s[i] = logit(rng);
    y[i] = coin(rng) ? 1 : -1;
  }
}

// O(N^2) AP with higher-score-first ranking and ties broken by lower index.
std::optional<double> brute_force_ap(const std::vector<double>& s,
                                     const std::vector<std::int8_t>& y) {
  std::vector<std::pair<std::size_t, std::size_t>> rank_hits;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] <= 0) continue;
    std::size_t rank = 1, hits = 1;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (j == i) continue;
      if (s[j] > s[i] || (s[j] == s[i] && j < i)) {
        ++rank;
        hits += y[j] > 0;
      }
    }
    rank_hits.emplace_back(rank, hits);
  }
  if (rank_hits.empty()) return std::nullopt;
  std::sort(rank_hits.begin(), rank_hits.end());
  double sum = 0.0;
  for (auto [rank, hits] : rank_hits) sum += static_cast<double>(hits) / static_cast<double>(rank);
  return sum / static_cast<double>(rank_hits.size());
}

Outcome gradient_oracle() {
  auto start = Clock::now();
  GradcheckOptions options;  // 100 trials, C <= 16, epsilon 1e-5
  double lse = gradcheck(LossKind::kLseSign, options).max_rel_error;
  double worst_other = 0.0;
  for (auto kind : {LossKind::kBce, LossKind::kWeightedBce, LossKind::kFocal}) {
    worst_other = std::max(worst_other, gradcheck(kind, options).max_rel_error);
  }
  double elapsed = seconds_since(start);
  bool pass = lse < 1e-6 && worst_other < 1e-5 && elapsed < 5.0;
  return {pass, fmt("lse-sign max rel err %.2e (< 1e-6), bce/wbce/focal %.2e (< 1e-5), %.2f s",
                    lse, worst_other, elapsed)};
}

Outcome gradient_identity() {
  std::mt19937_64 rng(2);
  std::vector<double> s;
  std::vector<std::int8_t> y;
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    random_instance(rng, 64, 20.0, s, y);
    double loss = lse_sign_loss(s, y);
    auto g = lse_sign_grad(s, y);
    double total = 0.0;
    for (double v : g) total += std::abs(v);
    worst = std::max(worst, std::abs(total - (1.0 - std::exp(-loss))));
  }
  return {worst <= 1e-9, fmt("max |sum|g| - (1 - e^-L)| = %.2e over 10^4 instances", worst)};
}

Outcome loss_bounds() {
  std::mt19937_64 rng(3);
  std::vector<double> s;
  std::vector<std::int8_t> y;
  double min_loss = INFINITY;
  for (int trial = 0; trial < 10000; ++trial) {
    random_instance(rng, 64, 50.0, s, y);
    min_loss = std::min(min_loss, lse_sign_loss(s, y));
  }
  std::size_t inexact = 0;
  for (std::size_t c = 1; c <= 1000; ++c) {
    std::vector<double> zeros(c, 0.0);
    std::vector<std::int8_t> labels(c, -1);
    labels[0] = 1;
    if (lse_sign_loss(zeros, labels) != std::log(1.0 + static_cast<double>(c))) ++inexact;
  }
  bool finite = true;
  for (int trial = 0; trial < 1000; ++trial) {
    random_instance(rng, 64, 1.0, s, y);
    for (auto& v : s) v = v < 0 ? -1e4 : 1e4;
    double loss = lse_sign_loss(s, y);
    auto g = lse_sign_grad(s, y);
    finite = finite && std::isfinite(loss) &&
             std::all_of(g.begin(), g.end(), [](double v) { return std::isfinite(v); });
  }
  bool pass = min_loss >= 0.0 && inexact == 0 && finite;
  return {pass, fmt("min loss %.3e (>= 0); %.0f of 1000 C values differ from log(1+C); "
                    "|s| = 1e4 finite: ",
                    min_loss, static_cast<double>(inexact)) +
                    (finite ? "yes" : "no")};
}

Outcome logit_bound() {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  double worst_excess = -INFINITY;
  double worst_rescale = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::size_t c = std::uniform_int_distribution<std::size_t>(1, 16)(rng);
    std::size_t d = std::uniform_int_distribution<std::size_t>(1, 64)(rng);
    double gamma = std::uniform_real_distribution<double>(1.0, 500.0)(rng);
    ClassifierWeights w{Matrix(c, d), gamma};
    for (auto& v : w.w.data()) v = normal(rng) * scale(rng);
    std::vector<double> x(d);
    for (auto& v : x) v = normal(rng) * scale(rng);
    auto logits = forward(x, w.w, gamma);
    for (double v : logits) worst_excess = std::max(worst_excess, std::abs(v) - gamma);
    double a = scale(rng);
    std::vector<double> ax(x);
    for (auto& v : ax) v *= a;
    auto scaled = forward(ax, w.w, gamma);
    for (std::size_t i = 0; i < c; ++i) {
      worst_rescale = std::max(worst_rescale, std::abs(scaled[i] - logits[i]) / gamma);
    }
  }
  bool pass = worst_excess <= 0.0 && worst_rescale < 1e-12;
  return {pass, fmt("max(|s| - gamma) = %.2e over 10^4 draws; max rescale change / gamma = %.2e",
                    worst_excess, worst_rescale)};
}

Outcome map_oracle() {
  std::mt19937_64 rng(5);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
    std::vector<double> s(n);
    std::vector<std::int8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = trial % 2 ? std::uniform_int_distribution<int>(0, 3)(rng) * 0.5
                       : std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
      y[i] = std::bernoulli_distribution(0.4)(rng) ? 1 : -1;
    }
    auto got = average_precision(s, y);
    auto want = brute_force_ap(s, y);
    if (got.has_value() != want.has_value() || (got && *got != *want)) ++mismatches;
  }
  return {mismatches == 0,
          fmt("%.0f of 1000 instances (N <= 12, half with ties) differ from brute force",
              static_cast<double>(mismatches))};
}

Outcome sampler_guarantee() {
  std::mt19937_64 rng(6);
  std::size_t coverage_violations = 0, leaks = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(50, 600)(rng);
    std::size_t c = std::uniform_int_distribution<std::size_t>(2, 40)(rng);
    std::size_t floor = std::uniform_int_distribution<std::size_t>(1, 60)(rng);
    std::vector<double> freq(c);
    for (std::size_t k = 0; k < c; ++k) freq[k] = std::pow(k + 1.0, -1.3);
    std::discrete_distribution<std::size_t> cls(freq.begin(), freq.end());
    LabelMatrix labels(n, c);
    for (std::size_t r = 0; r < n; ++r) {
      labels.set(r, cls(rng), true);
      while (std::bernoulli_distribution(0.25)(rng)) labels.set(r, cls(rng), true);
    }
    auto sp = split(n, 0.1, trial);
    auto plan = plan_epoch(labels, sp.train, floor, trial);
    std::set<std::size_t> val(sp.val.begin(), sp.val.end());
    for (auto r : plan.indices) leaks += val.count(r);
    for (std::size_t k = 0; k < c; ++k) {
      bool has_positive = false;
      for (auto r : sp.train) has_positive = has_positive || labels(r, k) == 1;
      std::size_t count = 0;
      for (auto r : plan.indices) count += labels(r, k) == 1;
      if (count < (has_positive ? floor : 0)) ++coverage_violations;
    }
  }
  return {coverage_violations == 0 && leaks == 0,
          fmt("%.0f class coverage violations, %.0f validation rows in epoch plans (100 matrices)",
              static_cast<double>(coverage_violations), static_cast<double>(leaks))};
}

Outcome determinism(const fs::path& root) {
  auto dir = root / "determinism";
  SynthConfig sc;
  sc.seed = 1;
  write_synth(make_synth(sc), dir.string());
  auto cfg = benchmark_config(1);
  cfg.features_path = (dir / "features.bin").string();
  cfg.labels_path = (dir / "labels.bin").string();
  cfg.classes_path = (dir / "classes.txt").string();
  cfg.embeddings_path = (dir / "embeddings.bin").string();
  cfg.init = InitKind::kEmbeddings;
  cfg.checkpoint_path = (dir / "weights.bin").string();
  auto first = train(cfg);
  auto first_bytes = read_file(cfg.checkpoint_path);
  auto first_meta = read_file(sidecar_path(cfg.checkpoint_path));
  auto second = train(cfg);
  bool same_record = first.record.to_json(false) == second.record.to_json(false);
  bool same_ckpt = first_bytes == read_file(cfg.checkpoint_path) &&
                   first_meta == read_file(sidecar_path(cfg.checkpoint_path));
  return {same_record && same_ckpt,
          std::string("run records ") + (same_record ? "identical" : "differ") +
              ", checkpoints " + (same_ckpt ? "identical" : "differ") + " (sha256 " +
              sha256_hex(first_bytes).substr(0, 16) + ")"};
}

struct SeedCells {
  std::uint64_t seed;
  AblationCell emb_lse, emb_bce, rand_lse;
};

std::vector<SeedCells> run_benchmark(double& elapsed) {
  auto start = Clock::now();
  std::vector<SeedCells> out;
  for (std::uint64_t seed : {1, 2, 3}) {
    SynthConfig sc;
    sc.seed = seed;
    auto data = make_synth(sc);
    TrainInputs in{data.features, data.labels, data.classes, data.embeddings, std::nullopt,
                   std::nullopt};
    auto cells = ablate(in, benchmark_config(seed));
    SeedCells sc_out{seed, {}, {}, {}};
    for (const auto& cell : cells) {
      if (cell.init == InitKind::kEmbeddings && cell.loss == LossKind::kLseSign) sc_out.emb_lse = cell;
      if (cell.init == InitKind::kEmbeddings && cell.loss == LossKind::kBce) sc_out.emb_bce = cell;
      if (cell.init == InitKind::kRandom && cell.loss == LossKind::kLseSign) sc_out.rand_lse = cell;
    }
    out.push_back(sc_out);
  }
  elapsed = seconds_since(start);
  return out;
}

Outcome directional(const std::vector<SeedCells>& runs, double elapsed) {
  int wins = 0;
  std::ostringstream detail;
  for (const auto& r : runs) {
    double over_bce = 100.0 * (r.emb_lse.final_val_map - r.emb_bce.final_val_map);
    double over_rand = 100.0 * (r.emb_lse.final_val_map - r.rand_lse.final_val_map);
    bool win = over_bce >= 2.0 && over_rand >= 2.0;
    wins += win;
    detail << fmt("seed %.0f: +%.2f vs bce, +%.2f vs random; ", static_cast<double>(r.seed),
                  over_bce, over_rand);
  }
  detail << wins << "/3 seeds, " << fmt("%.1f s", elapsed);
  return {wins >= 2 && elapsed < 120.0, detail.str()};
}

Outcome drift(const std::vector<SeedCells>& runs) {
  int wins = 0;
  std::ostringstream detail;
  for (const auto& r : runs) {
    wins += r.emb_lse.nn_overlap > r.rand_lse.nn_overlap;
    detail << fmt("seed %.0f: %.3f vs %.3f; ", static_cast<double>(r.seed), r.emb_lse.nn_overlap,
                  r.rand_lse.nn_overlap);
  }
  detail << wins << "/3 seeds (embedding-init vs random-init nn_overlap@5)";
  return {wins >= 2, detail.str()};
}

Outcome separable() {
  auto data = make_separable(0);
  TrainInputs in{data.features, data.labels, data.classes, data.embeddings, std::nullopt,
                 std::nullopt};
  TrainConfig cfg;  // defaults: random init, lse-sign, lr 1e-4, 10 epochs
  auto result = train(in, cfg);
  double best_train = 0.0;
  for (const auto& e : result.record.epochs) best_train = std::max(best_train, e.train_map);
  return {std::abs(best_train - 1.0) <= 1e-6,
          fmt("train mAP %.6f after %.0f epochs with default config (best %.6f)",
              result.record.final_train_map(), static_cast<double>(result.record.epochs.size()),
              best_train)};
}

}  // namespace

int main() {
  auto root = fs::temp_directory_path() / "defr_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);

  report("gradient-oracle", gradient_oracle);
  report("gradient-identity", gradient_identity);
  report("loss-bounds", loss_bounds);
  report("logit-bound", logit_bound);
  report("map-oracle", map_oracle);
  report("sampler-guarantee", sampler_guarantee);
  report("determinism", [&] { return determinism(root); });

  double elapsed = 0.0;
  std::vector<SeedCells> runs;
  std::string bench_error;
  try {
    runs = run_benchmark(elapsed);
  } catch (const std::exception& e) {
    bench_error = e.what();
  }
  auto need_runs = [&](auto f) {
    return [&, f] {
      if (!bench_error.empty()) return Outcome{false, "benchmark failed: " + bench_error};
      return f();
    };
  };
  report("directional-init-and-loss", need_runs([&] { return directional(runs, elapsed); }));
  report("separable-sanity", separable);
  report("structure-drift", need_runs([&] { return drift(runs); }));

  fs::remove_all(root);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
