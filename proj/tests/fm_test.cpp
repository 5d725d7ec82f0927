#include <gtest/gtest.h>

#include <functional>
#include <numeric>
#include <random>

#include "spnet/fm.hpp"

namespace {

using spnet::fm_feasible;
using spnet::fm_feasible_lazy;
using spnet::Inequality;
using spnet::InequalitySystem;
using spnet::LinearForm;
using spnet::Rational;

Inequality row(std::vector<std::int64_t> c, bool strict) {
  LinearForm f(c.size());
  f.coefficients = std::move(c);
  return {f, strict};
}

InequalitySystem random_system(std::mt19937_64& rng, std::size_t vars, std::size_t rows, int span) {
  std::uniform_int_distribution<int> coef(-span, span);
  InequalitySystem s;
  s.variables = vars;
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<std::int64_t> c(vars);
    for (auto& x : c) x = coef(rng);
    s.add(row(std::move(c), rng() % 2 == 0));
  }
  return s;
}

// Independent certificate check over the input plus x_i > 0.
void expect_certificate(const InequalitySystem& s, const spnet::FmResult& r) {
  if (r.feasible) {
    ASSERT_TRUE(r.witness);
    for (const auto& d : r.witness->durations()) EXPECT_GT(d, 0);
    EXPECT_TRUE(s.satisfied_by(r.witness->durations()));
    return;
  }
  std::vector<Rational> sum(s.variables, 0);
  bool strict = false;
  for (auto [i, m] : r.refutation) {
    ASSERT_GT(m, 0);
    if (i < s.inequalities.size()) {
      strict = strict || s.inequalities[i].strict;
      for (std::size_t v = 0; v < s.variables; ++v) sum[v] += Rational(m) * s.inequalities[i].form.coefficients[v];
    } else {
      const std::size_t v = i - s.inequalities.size();
      ASSERT_LT(v, s.variables);
      strict = true;
      sum[v] += m;
    }
  }
  EXPECT_TRUE(strict);
  for (const auto& x : sum) EXPECT_EQ(x, 0);
}

bool grid_feasible(const InequalitySystem& s, int k) {
  std::vector<Rational> p(s.variables, 1);
  std::function<bool(std::size_t)> rec = [&](std::size_t v) {
    if (v == s.variables) return s.satisfied_by(p);
    for (int x = 1; x <= k; ++x) {
      p[v] = x;
      if (rec(v + 1)) return true;
    }
    return false;
  };
  return rec(0);
}

TEST(FourierMotzkin, TextbookCases) {
  InequalitySystem s;
  s.variables = 2;
  s.add(row({1, -1}, true));
  s.add(row({-1, 1}, false));
  auto r = fm_feasible(s);
  EXPECT_FALSE(r.feasible);
  expect_certificate(s, r);

  InequalitySystem t;
  t.variables = 3;
  t.add(row({1, -1, 0}, true));
  t.add(row({0, 1, -1}, true));
  auto q = fm_feasible(t);
  EXPECT_TRUE(q.feasible);
  expect_certificate(t, q);

  InequalitySystem eq;
  eq.variables = 2;
  eq.add(row({1, -1}, false));
  eq.add(row({-1, 1}, false));
  EXPECT_TRUE(fm_feasible(eq).feasible);

  InequalitySystem neg;
  neg.variables = 1;
  neg.add(row({-1}, false));
  auto nr = fm_feasible(neg);
  EXPECT_FALSE(nr.feasible);
  expect_certificate(neg, nr);
}

TEST(FourierMotzkin, CertificatesAndGridAgree) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t vars = 1 + rng() % 3;
    auto s = random_system(rng, vars, 1 + rng() % 6, 3);
    auto r = fm_feasible(s);
    expect_certificate(s, r);
    if (grid_feasible(s, 6)) {
      EXPECT_TRUE(r.feasible);
    }
  }
}

TEST(FourierMotzkin, LargerRandomSystemsCarryValidCertificates) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 60; ++trial) {
    auto s = random_system(rng, 6, 12, 4);
    expect_certificate(s, fm_feasible(s));
  }
}

TEST(FourierMotzkin, LazyAgreesWithEager) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = random_system(rng, 2 + rng() % 4, 2 + rng() % 10, 3);
    auto eager = fm_feasible(s);
    auto lazy = fm_feasible_lazy(s, {0});
    EXPECT_EQ(eager.feasible, lazy.feasible);
    expect_certificate(s, lazy);
  }
}

TEST(FourierMotzkin, VerdictInvariantUnderRowScalingAndVariableOrder) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t vars = 2 + rng() % 3;
    auto s = random_system(rng, vars, 2 + rng() % 6, 3);
    const bool base = fm_feasible(s).feasible;

    InequalitySystem scaled = s;
    for (auto& q : scaled.inequalities) {
      const std::int64_t f = 1 + static_cast<std::int64_t>(rng() % 5);
      for (auto& c : q.form.coefficients) c *= f;
    }
    EXPECT_EQ(fm_feasible(scaled).feasible, base);

    std::vector<std::size_t> perm(vars);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    InequalitySystem permuted = s;
    for (std::size_t i = 0; i < s.inequalities.size(); ++i)
      for (std::size_t v = 0; v < vars; ++v)
        permuted.inequalities[i].form.coefficients[perm[v]] = s.inequalities[i].form.coefficients[v];
    EXPECT_EQ(fm_feasible(permuted).feasible, base);
  }
}

TEST(FourierMotzkin, RejectsArityMismatch) {
  InequalitySystem s;
  s.variables = 2;
  s.add(row({1, 2, 3}, true));
  EXPECT_THROW(fm_feasible(s), std::invalid_argument);
  EXPECT_THROW(fm_feasible_lazy(s, {4}), std::out_of_range);
}

}  // namespace
