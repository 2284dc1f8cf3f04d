#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "fibrank/error.hpp"
#include "fibrank/io.hpp"
#include "fibrank/rng.hpp"
#include "fibrank/stats.hpp"

using namespace fibrank;

namespace {

// Independent CvM statistic straight from the ECDF definition; agrees with
// the rank form only on tie-free data, which is all the oracle needs.
double ecdf_at(const std::vector<double>& sample, double t) {
  std::size_t c = 0;
  for (const double v : sample)
    if (v <= t) ++c;
  return static_cast<double>(c) / static_cast<double>(sample.size());
}

double cvm_ecdf(const std::vector<double>& x, const std::vector<double>& y) {
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  const double n = nx + ny;
  double s = 0.0;
  for (const double v : x) {
    const double d = ecdf_at(x, v) - ecdf_at(y, v);
    s += d * d;
  }
  for (const double v : y) {
    const double d = ecdf_at(x, v) - ecdf_at(y, v);
    s += d * d;
  }
  return nx * ny / (n * n) * s;
}

// Visits every split of `pooled` into sizes (nx, rest).
void for_each_split(const std::vector<double>& pooled, std::size_t nx,
                    const std::function<void(const std::vector<double>&,
                                             const std::vector<double>&)>& fn) {
  std::vector<std::size_t> idx(nx);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start,
                                                          std::size_t chosen) {
    if (chosen == nx) {
      std::vector<char> mark(pooled.size(), 0);
      for (const std::size_t i : idx) mark[i] = 1;
      std::vector<double> px, py;
      for (std::size_t i = 0; i < pooled.size(); ++i)
        (mark[i] ? px : py).push_back(pooled[i]);
      fn(px, py);
      return;
    }
    for (std::size_t i = start; i + (nx - chosen) <= pooled.size(); ++i) {
      idx[chosen] = i;
      rec(i + 1, chosen + 1);
    }
  };
  rec(0, 0);
}

double cvm_exact_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> pooled(x);
  pooled.insert(pooled.end(), y.begin(), y.end());
  std::sort(pooled.begin(), pooled.end());
  const double obs = cvm_ecdf(x, y);
  std::size_t ge = 0;
  std::size_t total = 0;
  for_each_split(pooled, x.size(),
                 [&](const std::vector<double>& px, const std::vector<double>& py) {
                   ++total;
                   if (cvm_ecdf(px, py) >= obs - 1e-12) ++ge;
                 });
  return static_cast<double>(ge) / static_cast<double>(total);
}

// U of x by direct pair counting, the textbook definition.
double mwu_pairs(const std::vector<double>& x, const std::vector<double>& y) {
  double u = 0.0;
  for (const double a : x)
    for (const double b : y) {
      if (a > b)
        u += 1.0;
      else if (a == b)
        u += 0.5;
    }
  return u;
}

struct MwuOracle {
  double u = 0.0;
  double two_sided = 0.0;
  double less = 0.0;
  double greater = 0.0;
};

MwuOracle mwu_exact_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> pooled(x);
  pooled.insert(pooled.end(), y.begin(), y.end());
  std::sort(pooled.begin(), pooled.end());
  MwuOracle o;
  o.u = mwu_pairs(x, y);
  std::size_t le = 0;
  std::size_t ge = 0;
  std::size_t total = 0;
  for_each_split(pooled, x.size(),
                 [&](const std::vector<double>& px, const std::vector<double>& py) {
                   ++total;
                   const double u = mwu_pairs(px, py);
                   if (u <= o.u + 1e-9) ++le;
                   if (u >= o.u - 1e-9) ++ge;
                 });
  o.less = static_cast<double>(le) / static_cast<double>(total);
  o.greater = static_cast<double>(ge) / static_cast<double>(total);
  o.two_sided = std::min(1.0, 2.0 * std::min(o.less, o.greater));
  return o;
}

DismantlingCurve curve_from_strengths(const std::vector<std::uint64_t>& strengths,
                                      std::uint64_t total) {
  DismantlingCurve c;
  c.total_weight = total;
  c.points.push_back(CurvePoint{0, 0, 1.0});
  std::uint64_t prefix = 0;
  for (std::size_t k = 0; k < strengths.size(); ++k) {
    prefix += strengths[k];
    c.points.push_back(CurvePoint{
        k + 1, prefix,
        static_cast<double>(total - prefix) / static_cast<double>(total)});
  }
  c.residual_floor = c.points.back().remaining;
  return c;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
    sab += (a[i] - ma) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

std::filesystem::path stats_tmp(const std::string& stem) {
  return std::filesystem::temp_directory_path() / ("fibrank_stats_" + stem);
}

} // namespace

TEST_SUITE("stats") {

TEST_CASE("midranks") {
  const std::vector<double> v = {10, 20, 20, 30};
  CHECK(midranks(v) == std::vector<double>{1.0, 2.5, 2.5, 4.0});
  const std::vector<double> unsorted = {20, 10, 20, 30};
  CHECK(midranks(unsorted) == std::vector<double>{2.5, 1.0, 2.5, 4.0});
  const std::vector<double> equal = {7, 7, 7};
  CHECK(midranks(equal) == std::vector<double>{2.0, 2.0, 2.0});
  CHECK(midranks({}).empty());
}

// Reference values below are frozen from scipy 1.15.3.

TEST_CASE("cvm exact: separated samples") {
  const std::vector<double> x = {1, 2, 3};
  const std::vector<double> y = {10, 11, 12};
  const auto res = cvm_two_sample(x, y);
  CHECK(res.method == PMethod::exact_permutation);
  CHECK(res.n1 == 3);
  CHECK(res.n2 == 3);
  CHECK(res.statistic == doctest::Approx(0.5277777777777778).epsilon(1e-12));
  CHECK(res.p_value == 0.1);
}

TEST_CASE("cvm exact: mixed samples") {
  const std::vector<double> x = {3.0, 1.0, 4.0, 1.5};
  const std::vector<double> y = {2.0, 5.0, 0.5};
  const auto res = cvm_two_sample(x, y);
  CHECK(res.statistic == doctest::Approx(0.0714285714285714).epsilon(1e-12));
  CHECK(res.p_value == doctest::Approx(0.9142857142857143).epsilon(1e-15));
}

TEST_CASE("cvm exact matches a from-scratch enumeration oracle") {
  Rng rng(51);
  const std::vector<std::pair<std::size_t, std::size_t>> sizes = {
      {3, 3}, {3, 4}, {4, 4}, {2, 6}, {5, 4}, {5, 5}};
  for (const auto& [n1, n2] : sizes) {
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<double> x(n1), y(n2);
      for (auto& v : x) v = rng.uniform01();
      for (auto& v : y) v = rng.uniform01();
      const auto res = cvm_two_sample(x, y);
      REQUIRE(res.method == PMethod::exact_permutation);
      CHECK(res.statistic == doctest::Approx(cvm_ecdf(x, y)).epsilon(1e-12));
      CHECK(res.p_value == cvm_exact_oracle(x, y));
    }
  }
}

TEST_CASE("cvm on identical samples gives p = 1 exactly") {
  const std::vector<double> x = {0.4, 1.0, 1.0, 2.5, 7.0};
  CHECK(cvm_two_sample(x, x).p_value == 1.0);

  // same through the Monte-Carlo route
  std::vector<double> big(15);
  std::iota(big.begin(), big.end(), 0.0);
  TestOptions opt;
  opt.method = PMethod::monte_carlo;
  CHECK(cvm_two_sample(big, big, opt).p_value == 1.0);
}

TEST_CASE("cvm is symmetric in its arguments") {
  const std::vector<double> x = {0.1, 0.9, 2.0, 2.0, 3.5};
  const std::vector<double> y = {0.5, 1.1, 2.2};
  const auto a = cvm_two_sample(x, y);
  const auto b = cvm_two_sample(y, x);
  CHECK(a.statistic == b.statistic);
  CHECK(a.p_value == b.p_value);

  std::vector<double> xa(26), ya(26);
  Rng rng(52);
  for (auto& v : xa) v = rng.uniform01();
  for (auto& v : ya) v = rng.uniform01() + 0.2;
  TestOptions asym;
  asym.method = PMethod::asymptotic;
  CHECK(cvm_two_sample(xa, ya, asym).p_value ==
        cvm_two_sample(ya, xa, asym).p_value);
}

TEST_CASE("cvm asymptotic: continuous fixture") {
  std::vector<double> x, y;
  for (int i = 0; i < 25; ++i) {
    x.push_back(std::fmod(0.7 * i, 5.0) + 0.01 * i);
    y.push_back(std::fmod(0.9 * i, 4.0) + 0.013 * i + 0.3);
  }
  const auto res = cvm_two_sample(x, y);
  CHECK(res.method == PMethod::asymptotic);
  CHECK(res.statistic == doctest::Approx(0.08039999999999914).epsilon(1e-12));
  CHECK(res.p_value == doctest::Approx(0.7145938411644104).epsilon(1e-8));
}

TEST_CASE("cvm asymptotic: heavy ties") {
  std::vector<double> x, y;
  for (int i = 0; i < 30; ++i) x.push_back(static_cast<double>(i % 7));
  for (int i = 0; i < 28; ++i) y.push_back(static_cast<double>((3 * i) % 8));
  const auto res = cvm_two_sample(x, y);
  CHECK(res.method == PMethod::asymptotic);
  CHECK(res.statistic == doctest::Approx(0.08054187192118256).epsilon(1e-12));
  CHECK(res.p_value == doctest::Approx(0.7102064757657467).epsilon(1e-8));
}

TEST_CASE("cvm asymptotic: interleaved samples clamp to p = 1") {
  std::vector<double> x, y;
  for (int i = 0; i < 40; ++i) {
    x.push_back(static_cast<double>(i));
    y.push_back(i + 0.5);
  }
  const auto res = cvm_two_sample(x, y);
  CHECK(res.statistic == doctest::Approx(0.006249999999999645).epsilon(1e-9));
  CHECK(res.p_value == 1.0);
}

TEST_CASE("cvm monte carlo is seeded and reproducible") {
  Rng rng(53);
  std::vector<double> x(14), y(13); // combined 27: monte carlo by default
  for (auto& v : x) v = rng.uniform01();
  for (auto& v : y) v = rng.uniform01() * 1.3;
  const auto a = cvm_two_sample(x, y);
  const auto b = cvm_two_sample(x, y);
  CHECK(a.method == PMethod::monte_carlo);
  CHECK(a.p_value == b.p_value);
  CHECK(a.p_value >= 1.0 / 20001.0);
  CHECK(a.p_value <= 1.0);

  TestOptions opt;
  opt.mc_rounds = 500;
  const auto c = cvm_two_sample(x, y, opt);
  CHECK(c.p_value >= 1.0 / 501.0);
}

TEST_CASE("cvm method selection follows the size bounds") {
  Rng rng(54);
  auto draw = [&](std::size_t n) {
    std::vector<double> v(n);
    for (auto& e : v) e = rng.uniform01();
    return v;
  };
  CHECK(cvm_two_sample(draw(12), draw(12)).method == PMethod::exact_permutation);
  CHECK(cvm_two_sample(draw(13), draw(12)).method == PMethod::monte_carlo);
  CHECK(cvm_two_sample(draw(25), draw(24)).method == PMethod::asymptotic);

  TestOptions opt;
  opt.exhaustive_bound = 4;
  CHECK(cvm_two_sample(draw(3), draw(3), opt).method == PMethod::monte_carlo);
  opt.mc_bound = 5;
  CHECK(cvm_two_sample(draw(3), draw(3), opt).method == PMethod::asymptotic);

  TestOptions forced;
  forced.method = PMethod::asymptotic;
  const auto res = cvm_two_sample(draw(3), draw(3), forced);
  CHECK(res.method == PMethod::asymptotic);
  CHECK(res.p_value >= 0.0);
  CHECK(res.p_value <= 1.0);

  forced.method = PMethod::exact_permutation;
  CHECK_THROWS_AS(cvm_two_sample(draw(16), draw(16), forced), StatsError);
}

TEST_CASE("cvm input validation") {
  const std::vector<double> x = {1, 2, 3};
  const std::vector<double> none;
  CHECK_THROWS_AS(cvm_two_sample(none, x), StatsError);
  CHECK_THROWS_AS(cvm_two_sample(x, none), StatsError);
  const std::vector<double> nan = {1.0, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(cvm_two_sample(nan, x), StatsError);
  const std::vector<double> inf = {1.0, std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(cvm_two_sample(x, inf), StatsError);
}

TEST_CASE("mwu exact: small fixtures") {
  const std::vector<double> x = {1, 2};
  const std::vector<double> y = {3, 4};
  auto res = mann_whitney_u(x, y);
  CHECK(res.method == PMethod::exact_permutation);
  CHECK(res.statistic == 0.0);
  CHECK(res.p_value == 0.3333333333333333);
  CHECK(mann_whitney_u(x, y, Sides::less).p_value == 0.16666666666666666);
  CHECK(mann_whitney_u(x, y, Sides::greater).p_value == 1.0);

  const std::vector<double> a = {5, 7, 1, 3};
  const std::vector<double> b = {2, 4, 6};
  res = mann_whitney_u(a, b);
  CHECK(res.statistic == 6.0);
  CHECK(res.p_value == 1.0);
}

TEST_CASE("mwu exact matches pair-counting enumeration, ties included") {
  Rng rng(55);
  for (std::size_t n1 = 1; n1 <= 5; ++n1) {
    for (std::size_t n2 = 1; n2 + n1 <= 8; ++n2) {
      for (int trial = 0; trial < 3; ++trial) {
        std::vector<double> x(n1), y(n2);
        for (auto& v : x) v = static_cast<double>(rng.uniform_u64(4));
        for (auto& v : y) v = static_cast<double>(rng.uniform_u64(4));
        const auto oracle = mwu_exact_oracle(x, y);
        const auto res = mann_whitney_u(x, y);
        REQUIRE(res.method == PMethod::exact_permutation);
        CHECK(res.statistic == oracle.u);
        CHECK(res.p_value == oracle.two_sided);
        CHECK(mann_whitney_u(x, y, Sides::less).p_value == oracle.less);
        CHECK(mann_whitney_u(x, y, Sides::greater).p_value == oracle.greater);
      }
    }
  }
}

TEST_CASE("mwu tie-free counting path matches the enumeration oracle") {
  Rng rng(56);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(6), y(5);
    for (auto& v : x) v = rng.uniform01();
    for (auto& v : y) v = rng.uniform01();
    const auto oracle = mwu_exact_oracle(x, y);
    const auto res = mann_whitney_u(x, y);
    CHECK(res.statistic == oracle.u);
    CHECK(res.p_value == oracle.two_sided);
  }
}

TEST_CASE("mwu exact via the tie-free distribution recurrence") {
  const std::vector<double> x = {38, 21, 43, 42, 19, 40, 9,  46, 2,  47, 54,
                                 5,  52, 22, 58, 8,  59, 26, 51, 14, 41, 39};
  const std::vector<double> y = {56.5, 47.5, 20.5, 45.5, 53.5, 42.5, 34.5,
                                 11.5, 31.5, 1.5,  33.5, 58.5, 57.5, 40.5,
                                 44.5, 55.5, 10.5, 18.5, 43.5, 59.5, 38.5,
                                 26.5, 25.5, 19.5, 14.5};
  TestOptions opt;
  opt.method = PMethod::exact_permutation; // 47 values: the counting recurrence
  const auto res = mann_whitney_u(x, y, Sides::two_sided, opt);
  CHECK(res.method == PMethod::exact_permutation);
  CHECK(res.statistic == 256.0);
  CHECK(res.p_value == doctest::Approx(0.6959604840144257).epsilon(1e-12));
}

TEST_CASE("mwu asymptotic with ties and continuity correction") {
  const std::vector<double> x = {1, 2, 2, 3, 5, 5, 5, 8, 9, 9, 10, 12, 12, 13};
  const std::vector<double> y = {2, 3, 3, 5, 6, 6, 8, 8, 9, 11, 12, 14, 14};
  const auto res = mann_whitney_u(x, y);
  CHECK(res.method == PMethod::asymptotic);
  CHECK(res.statistic == 78.5);
  CHECK(res.p_value == doctest::Approx(0.5584274083299464).epsilon(1e-10));
  CHECK(mann_whitney_u(x, y, Sides::less).p_value ==
        doctest::Approx(0.2792137041649732).epsilon(1e-10));
  CHECK(mann_whitney_u(x, y, Sides::greater).p_value ==
        doctest::Approx(0.7369412647676844).epsilon(1e-10));
}

TEST_CASE("mwu statistics of the two samples are complementary") {
  Rng rng(57);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n1 = 2 + rng.uniform_index(10); // stays on the exact path
    const std::size_t n2 = 2 + rng.uniform_index(10);
    std::vector<double> x(n1), y(n2);
    for (auto& v : x) v = static_cast<double>(rng.uniform_u64(12));
    for (auto& v : y) v = static_cast<double>(rng.uniform_u64(12));
    const auto xy = mann_whitney_u(x, y);
    const auto yx = mann_whitney_u(y, x);
    REQUIRE(xy.method == PMethod::exact_permutation);
    CHECK(xy.statistic + yx.statistic == static_cast<double>(n1 * n2));
    CHECK(mann_whitney_u(x, y, Sides::less).p_value ==
          mann_whitney_u(y, x, Sides::greater).p_value);
  }

  // the asymptotic lane keeps the same relation to rounding error
  std::vector<double> bx(16), by(17);
  for (auto& v : bx) v = static_cast<double>(rng.uniform_u64(9));
  for (auto& v : by) v = static_cast<double>(rng.uniform_u64(9));
  CHECK(mann_whitney_u(bx, by, Sides::less).p_value ==
        doctest::Approx(mann_whitney_u(by, bx, Sides::greater).p_value)
            .epsilon(1e-12));
}

TEST_CASE("mwu on identical samples gives p = 1") {
  const std::vector<double> x = {1, 2, 2, 9};
  CHECK(mann_whitney_u(x, x).p_value == 1.0);
}

TEST_CASE("mwu method selection and the monte-carlo remap") {
  Rng rng(58);
  auto draw = [&](std::size_t n, bool ties) {
    std::vector<double> v(n);
    for (auto& e : v)
      e = ties ? static_cast<double>(rng.uniform_u64(5)) : rng.uniform01();
    return v;
  };
  // past the exhaustive bound there is no monte-carlo lane for this test
  CHECK(mann_whitney_u(draw(13, false), draw(12, false)).method ==
        PMethod::asymptotic);

  TestOptions mc;
  mc.method = PMethod::monte_carlo;
  CHECK(mann_whitney_u(draw(13, false), draw(13, false), Sides::two_sided, mc)
            .method == PMethod::exact_permutation);
  CHECK(mann_whitney_u(draw(13, true), draw(13, true), Sides::two_sided, mc)
            .method == PMethod::asymptotic);

  TestOptions exact;
  exact.method = PMethod::exact_permutation;
  CHECK_THROWS_AS(
      mann_whitney_u(draw(16, true), draw(16, true), Sides::two_sided, exact),
      StatsError);
}

TEST_CASE("mwu degenerate and invalid inputs") {
  const std::vector<double> fives3 = {5, 5, 5};
  const std::vector<double> fives4 = {5, 5, 5, 5};
  CHECK(mann_whitney_u(fives3, fives4).p_value == 1.0); // exact path copes
  TestOptions asym;
  asym.method = PMethod::asymptotic;
  CHECK_THROWS_AS(mann_whitney_u(fives3, fives4, Sides::two_sided, asym),
                  StatsError);
  const std::vector<double> none;
  CHECK_THROWS_AS(mann_whitney_u(none, fives3), StatsError);
  const std::vector<double> nan = {std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(mann_whitney_u(nan, fives3), StatsError);
}

TEST_CASE("pmethod names") {
  CHECK(pmethod_name(PMethod::asymptotic) == "asymptotic");
  CHECK(pmethod_name(PMethod::exact_permutation) == "exact_permutation");
  CHECK(pmethod_name(PMethod::monte_carlo) == "monte_carlo");
}

TEST_CASE("spearman fixtures") {
  const std::vector<double> x = {3, 1, 4, 1, 5, 9, 2, 6, 5, 3,
                                 5, 8, 9, 7, 9, 3, 2, 3, 8, 4};
  const std::vector<double> y = {2, 7, 1, 8, 2, 8, 1, 8, 2, 8,
                                 4, 5, 9, 0, 4, 5, 2, 3, 5, 3};
  auto res = spearman(x, y);
  CHECK(res.n == 20);
  CHECK(res.r == doctest::Approx(0.19073187020980284).epsilon(1e-12));
  CHECK(res.p_value == doctest::Approx(0.420536244226812).epsilon(1e-8));

  std::vector<double> mx(12);
  std::iota(mx.begin(), mx.end(), 0.0);
  const std::vector<double> my = {0.5, 2, 1, 4, 3, 6, 5, 8, 7, 10, 9, 11.5};
  res = spearman(mx, my);
  CHECK(res.r == doctest::Approx(0.965034965034965).epsilon(1e-12));
  CHECK(res.p_value == doctest::Approx(3.88098529962746e-07).epsilon(1e-6));
}

TEST_CASE("spearman extremes and invariances") {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> inc = {10, 20, 30, 40, 50};
  auto res = spearman(x, inc);
  CHECK(res.r == 1.0);
  CHECK(res.p_value == 0.0);

  const std::vector<double> dec = {9, 7, 5, 3, 1};
  res = spearman(x, dec);
  CHECK(res.r == -1.0);
  CHECK(res.p_value == 0.0);

  // any strictly increasing transform leaves ranks, r, and p untouched
  Rng rng(59);
  std::vector<double> a(15), b(15), tb(15);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.uniform01() * 10;
    b[i] = rng.uniform01() * 10;
    tb[i] = std::exp(b[i] / 3.0);
  }
  const auto plain = spearman(a, b);
  const auto mapped = spearman(a, tb);
  CHECK(plain.r == mapped.r);
  CHECK(plain.p_value == mapped.p_value);
}

TEST_CASE("spearman r equals pearson on midranks") {
  Rng rng(60);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 3 + rng.uniform_index(30);
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = static_cast<double>(rng.uniform_u64(8));
    for (auto& v : y) v = static_cast<double>(rng.uniform_u64(8));
    double r;
    try {
      r = spearman(x, y).r;
    } catch (const StatsError&) {
      continue; // constant draw
    }
    CHECK(r == doctest::Approx(pearson(midranks(x), midranks(y))).epsilon(1e-12));
  }
}

TEST_CASE("spearman input validation") {
  const std::vector<double> two = {1, 2};
  const std::vector<double> also = {3, 4};
  CHECK_THROWS_AS(spearman(two, also), StatsError);
  const std::vector<double> x = {1, 2, 3};
  const std::vector<double> flat = {7, 7, 7};
  CHECK_THROWS_AS(spearman(x, flat), StatsError);
  CHECK_THROWS_AS(spearman(flat, x), StatsError);
  const std::vector<double> longer = {1, 2, 3, 4};
  CHECK_THROWS_AS(spearman(x, longer), StatsError);
}

TEST_CASE("krippendorff alpha fixtures") {
  AnnotationTable perfect;
  perfect.add("i1", "u", "A");
  perfect.add("i1", "v", "A");
  perfect.add("i2", "u", "B");
  perfect.add("i2", "v", "B");
  perfect.add("i3", "u", "C");
  perfect.add("i3", "v", "C");
  CHECK(krippendorff_alpha(perfect) == 1.0);

  // half agreement over two labels: alpha lands on exactly 1/8
  AnnotationTable half;
  half.add("i1", "u", "A");
  half.add("i1", "v", "A");
  half.add("i2", "u", "A");
  half.add("i2", "v", "B");
  half.add("i3", "u", "B");
  half.add("i3", "v", "B");
  half.add("i4", "u", "B");
  half.add("i4", "v", "A");
  CHECK(krippendorff_alpha(half) == doctest::Approx(0.125).epsilon(1e-12));

  // one label everywhere: expected disagreement vanishes
  AnnotationTable mono;
  mono.add("i1", "u", "A");
  mono.add("i1", "v", "A");
  mono.add("i2", "u", "A");
  mono.add("i2", "v", "A");
  CHECK(krippendorff_alpha(mono) == 1.0);
}

TEST_CASE("krippendorff alpha with three annotators and gaps") {
  // coincidences: o(a,a)=3, o(b,b)=1, o(a,b)=o(b,a)=1, o(b,c)=o(c,b)=1
  // n = (4, 3, 1), D_o = 4, D_e = (64 - 26) / 7, alpha = 1 - 28/38 = 5/19
  AnnotationTable t;
  t.add("i1", "u", "a");
  t.add("i1", "v", "a");
  t.add("i1", "w", "a");
  t.add("i2", "u", "a");
  t.add("i2", "w", "b");
  t.add("i3", "u", "b");
  t.add("i3", "v", "b");
  t.add("i3", "w", "c");
  t.add("i4", "v", "c"); // unpaired, skipped
  CHECK(krippendorff_alpha(t) == doctest::Approx(5.0 / 19.0).epsilon(1e-12));

  // dropping the singleton changes nothing
  AnnotationTable s;
  for (const auto& e : t.entries())
    if (e.item != "i4") s.add(e.item, e.annotator, e.label);
  CHECK(krippendorff_alpha(s) == krippendorff_alpha(t));
}

TEST_CASE("krippendorff alpha error cases") {
  AnnotationTable solo;
  solo.add("i1", "u", "A");
  solo.add("i2", "u", "B");
  CHECK_THROWS_AS(krippendorff_alpha(solo), StatsError);

  AnnotationTable disjoint;
  disjoint.add("i1", "u", "A");
  disjoint.add("i2", "v", "B");
  CHECK_THROWS_AS(krippendorff_alpha(disjoint), StatsError); // nothing pairable
}

TEST_CASE("annotation table CSV") {
  const auto path = stats_tmp("ann.csv");
  write_file(path,
             "item_id,annotator_id,label\n"
             "i1,u,A\n"
             "i1,v,A\n"
             "i2,u,A\n"
             "i2,v,B\n"
             "i3,u,B\n"
             "i3,v,B\n"
             "i4,u,B\n"
             "i4,v,A\n");
  const auto table = AnnotationTable::from_csv(path.string());
  CHECK(table.n_entries() == 8);
  CHECK(table.n_annotators() == 2);
  CHECK(krippendorff_alpha(table) == doctest::Approx(0.125).epsilon(1e-12));
  std::filesystem::remove(path);

  const auto bad = stats_tmp("ann_bad.csv");
  write_file(bad, "item,annotator,label\ni1,u,A\n");
  CHECK_THROWS_AS(AnnotationTable::from_csv(bad.string()), ParseError);
  write_file(bad, "item_id,annotator_id,label\ni1,u\n");
  CHECK_THROWS_AS(AnnotationTable::from_csv(bad.string()), ParseError);
  std::filesystem::remove(bad);
}

TEST_CASE("prefix scan: identical rankings never alarm") {
  std::vector<std::uint64_t> strengths;
  for (int i = 0; i < 40; ++i) strengths.push_back(500 - 7 * i);
  const auto a = curve_from_strengths(strengths, 100000);
  const auto scan = prefix_cvm_scan(a, a, 30);
  REQUIRE(scan.size() == 29);
  for (const auto& [k, p] : scan) {
    CAPTURE(k);
    CHECK(p == 1.0); // exact, monte-carlo, and asymptotic lanes all hit 1
  }
}

TEST_CASE("prefix scan flags divergence only past the shared head") {
  std::vector<std::uint64_t> head;
  for (int i = 0; i < 10; ++i) head.push_back(300 - 10 * i);
  auto sa = head;
  auto sb = head;
  for (int i = 0; i < 20; ++i) {
    sa.push_back(100);
    sb.push_back(1);
  }
  const auto a = curve_from_strengths(sa, 10000);
  const auto b = curve_from_strengths(sb, 10000);
  const auto scan = prefix_cvm_scan(a, b, 30);
  std::size_t first_alarm = 0;
  for (const auto& [k, p] : scan) {
    if (k <= 10) CHECK(p == 1.0);
    if (p < 0.05 && first_alarm == 0) first_alarm = k;
  }
  CHECK(first_alarm > 10);
  CHECK(first_alarm != 0); // the tails do differ, so some k must fire
}

TEST_CASE("prefix scan input validation") {
  std::vector<std::uint64_t> s = {5, 4, 3};
  const auto a = curve_from_strengths(s, 100);
  CHECK_THROWS_AS(prefix_cvm_scan(a, a, 1), StatsError);
  CHECK_THROWS_AS(prefix_cvm_scan(a, a, 4), StatsError); // curve too short
}

TEST_CASE("cvm asymptotic null p-values look uniform") {
  Rng rng(61);
  std::vector<double> pvals;
  for (int sim = 0; sim < 200; ++sim) {
    std::vector<double> x(30), y(30);
    for (auto& v : x) v = rng.uniform01();
    for (auto& v : y) v = rng.uniform01();
    const auto res = cvm_two_sample(x, y);
    REQUIRE(res.method == PMethod::asymptotic);
    REQUIRE(res.p_value >= 0.0);
    REQUIRE(res.p_value <= 1.0);
    pvals.push_back(res.p_value);
  }
  std::sort(pvals.begin(), pvals.end());
  double ks = 0.0;
  const double n = static_cast<double>(pvals.size());
  for (std::size_t i = 0; i < pvals.size(); ++i) {
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    ks = std::max({ks, std::abs(pvals[i] - lo), std::abs(pvals[i] - hi)});
  }
  CHECK(ks < 0.15);
}

} // TEST_SUITE
