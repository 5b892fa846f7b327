// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>

#include "defr/optim.hpp"
#include "doctest.h"

using namespace defr;

namespace {

// Scalar textbook Adam used as an oracle.
struct ScalarAdam {
  double m = 0.0, v = 0.0;
  int t = 0;
  double step(double w, double g, double lr) {
    ++t;
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    double mh = m / (1.0 - std::pow(0.9, t));
    double vh = v / (1.0 - std::pow(0.999, t));
    return w - lr * mh / (std::sqrt(vh) + 1e-8);
  }
};

}  // namespace

TEST_CASE("first adam step has magnitude lr") {
  Matrix w(1, 2);
  Matrix g(1, 2);
  g(0, 0) = 1.0;
  g(0, 1) = -3.0;
  AdamState state(1, 2);
  adam_step(w, g, state, 0.1);
  CHECK(state.t == 1);
  CHECK(w(0, 0) == doctest::Approx(-0.1 / (1.0 + 1e-8)).epsilon(1e-15));
  CHECK(w(0, 0) == doctest::Approx(-0.0999999990).epsilon(1e-10));
  CHECK(w(0, 1) == doctest::Approx(0.1 * 3.0 / (3.0 + 1e-8)).epsilon(1e-15));
}

TEST_CASE("zero gradient leaves weights unchanged") {
  Matrix w(2, 3);
  w(1, 2) = 0.7;
  Matrix g(2, 3);
  AdamState state(2, 3);
  for (int i = 0; i < 10; ++i) adam_step(w, g, state, 0.5);
  CHECK(w(1, 2) == 0.7);
  CHECK(w(0, 0) == 0.0);
}

TEST_CASE("adam matches a scalar reference over many steps") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> normal;
  Matrix w(3, 4);
  for (auto& v : w.data()) v = normal(rng);
  std::vector<double> ref(w.data().begin(), w.data().end());
  std::vector<ScalarAdam> oracle(ref.size());
  AdamState state(3, 4);
  for (int step = 0; step < 500; ++step) {
    Matrix g(3, 4);
    for (auto& v : g.data()) v = normal(rng);
    double lr = 1e-2 * (1.0 + 0.5 * std::sin(step));
    adam_step(w, g, state, lr);
    for (std::size_t i = 0; i < ref.size(); ++i) ref[i] = oracle[i].step(ref[i], g.data()[i], lr);
  }
  for (std::size_t i = 0; i < ref.size(); ++i) {
    CHECK(w.data()[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
}

TEST_CASE("adam is deterministic and nearly invariant to gradient scale") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  Matrix a(2, 2), b(2, 2), c(2, 2);
  AdamState sa(2, 2), sb(2, 2), sc(2, 2);
  for (int step = 0; step < 1000; ++step) {
    Matrix g(2, 2);
    for (auto& v : g.data()) v = normal(rng);
    Matrix g10 = g;
    for (auto& v : g10.data()) v *= 10.0;
    adam_step(a, g, sa, 1e-3);
    adam_step(b, g, sb, 1e-3);
    adam_step(c, g10, sc, 1e-3);
  }
  CHECK(a == b);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(a.data()[i] - c.data()[i]) < 1e-6);
}

TEST_CASE("adam rejects bad inputs") {
  Matrix w(2, 2);
  Matrix g(2, 3);
  AdamState state(2, 2);
  CHECK_THROWS_AS(adam_step(w, g, state, 0.1), DimensionError);
  Matrix g2(2, 2);
  CHECK_THROWS_AS(adam_step(w, g2, state, 0.0), ConfigError);
  AdamState wrong(3, 2);
  CHECK_THROWS_AS(adam_step(w, g2, wrong, 0.1), DimensionError);
}

TEST_CASE("cosine schedule with warm restarts") {
  Schedule s{1e-3, 1e-5, 5, 20};
  REQUIRE(s.period_steps() == 100);
  CHECK(lr_at(s, 0) == 1e-3);
  CHECK(lr_at(s, 50) == doctest::Approx(0.5 * (1e-3 + 1e-5)).epsilon(1e-14));
  CHECK(lr_at(s, 100) == 1e-3);
  CHECK(lr_at(s, 99) < lr_at(s, 98));
  CHECK(lr_at(s, 99) > 1e-5);
  for (std::uint64_t k = 0; k < 1000; ++k) {
    double lr = lr_at(s, k);
    CHECK(lr == lr_at(s, k + 100));
    CHECK(lr <= 1e-3);
    CHECK(lr >= 1e-5);
    double u = static_cast<double>(k % 100) / 100.0;
    CHECK(lr == doctest::Approx(1e-5 + 0.5 * (1e-3 - 1e-5) * (1.0 + std::cos(std::numbers::pi * u)))
                    .epsilon(1e-14));
    if (k % 100 != 99) CHECK(lr_at(s, k + 1) < lr);
  }
}

TEST_CASE("schedule validation") {
  Schedule bad{1e-4, 1e-3, 5, 10};
  CHECK_THROWS_AS(lr_at(bad, 0), ConfigError);
  Schedule zero{1e-4, 0.0, 0, 10};
  CHECK_THROWS_AS(lr_at(zero, 0), ConfigError);
}
