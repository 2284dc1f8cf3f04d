#include "fibrank/stats.hpp"

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>

#include "fibrank/error.hpp"
#include "fibrank/io.hpp"
#include "fibrank/rng.hpp"

namespace fibrank {

std::string_view pmethod_name(PMethod m) {
  switch (m) {
    case PMethod::asymptotic: return "asymptotic";
    case PMethod::exact_permutation: return "exact_permutation";
    case PMethod::monte_carlo: return "monte_carlo";
  }
  return "unknown";
}

namespace {

void require_finite(std::span<const double> sample, const char* name) {
  if (sample.empty()) throw StatsError(std::string(name) + " sample is empty");
  for (const double v : sample) {
    if (!std::isfinite(v))
      throw StatsError(std::string(name) + " sample contains a non-finite value");
  }
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Pooled sorted sample with doubled midranks (integers even under ties)
/// and the per-position origin of the observed assignment.
struct Pooled {
  std::vector<double> values;      // ascending
  std::vector<std::uint64_t> r2;   // doubled midranks, aligned with values
  std::vector<char> is_x;          // observed assignment, aligned
  std::size_t nx = 0;
  std::size_t ny = 0;

  std::size_t n() const { return values.size(); }
};

Pooled pool(std::span<const double> x, std::span<const double> y) {
  Pooled p;
  p.nx = x.size();
  p.ny = y.size();
  std::vector<std::pair<double, char>> tagged;
  tagged.reserve(p.nx + p.ny);
  for (const double v : x) tagged.emplace_back(v, 1);
  for (const double v : y) tagged.emplace_back(v, 0);
  std::sort(tagged.begin(), tagged.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const std::size_t n = tagged.size();
  p.values.resize(n);
  p.is_x.resize(n);
  p.r2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.values[i] = tagged[i].first;
    p.is_x[i] = tagged[i].second;
  }
  // Doubled midrank of a tie run spanning 1-based ranks [a, b] is a + b.
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && p.values[j + 1] == p.values[i]) ++j;
    const std::uint64_t doubled = (i + 1) + (j + 1);
    for (std::size_t k = i; k <= j; ++k) p.r2[k] = doubled;
    i = j + 1;
  }
  return p;
}

/// 4u for one assignment over the pooled positions; mask[pos] marks x.
/// u = nx * sum_i (rx_i - i)^2 + ny * sum_j (ry_j - j)^2 over each sample's
/// ascending ranks, exact in integers once ranks are doubled.
std::uint64_t cvm_u4(const Pooled& p, const std::vector<char>& mask) {
  std::int64_t sx = 0;
  std::int64_t sy = 0;
  std::int64_t ix = 0;
  std::int64_t iy = 0;
  const std::size_t n = p.n();
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (mask[pos] != 0) {
      ++ix;
      const std::int64_t d = static_cast<std::int64_t>(p.r2[pos]) - 2 * ix;
      sx += d * d;
    } else {
      ++iy;
      const std::int64_t d = static_cast<std::int64_t>(p.r2[pos]) - 2 * iy;
      sy += d * d;
    }
  }
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(p.nx) * sx +
                                    static_cast<std::int64_t>(p.ny) * sy);
}

/// 2 * U1 for one assignment: 2*U1 = sum of x's doubled ranks - 2 * nx(nx+1)/2.
std::uint64_t mwu_u2(const Pooled& p, const std::vector<char>& mask) {
  std::uint64_t sum_r2 = 0;
  for (std::size_t pos = 0; pos < p.n(); ++pos) {
    if (mask[pos] != 0) sum_r2 += p.r2[pos];
  }
  return sum_r2 - p.nx * (p.nx + 1);
}

/// Visits every C(n, nx) assignment exactly once.
template <class Fn>
void for_each_assignment(std::size_t n, std::size_t nx, Fn&& fn) {
  std::vector<char> mask(n, 0);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(nx), 1);
  // prev_permutation over a descending start enumerates all distinct masks
  do {
    fn(mask);
  } while (std::prev_permutation(mask.begin(), mask.end()));
}

/// Limiting CDF of the normalized CvM statistic (Anderson-Darling's psi1),
/// evaluated through the scaled Bessel K to stay finite for large
/// arguments.
double cvm_limit_cdf(double x) {
  gsl_set_error_handler_off();
  double sum = 0.0;
  for (int k = 0; k < 256; ++k) {
    const double fk = 4.0 * k + 1.0;
    const double q = fk * fk / (16.0 * x);
    const double bessel = gsl_sf_bessel_Knu_scaled(0.25, q); // e^q K_{1/4}(q)
    const double term = std::exp(std::lgamma(k + 0.5) - std::lgamma(k + 1.0)) /
                        (std::pow(M_PI, 1.5) * std::sqrt(x)) * std::sqrt(fk) *
                        std::exp(-2.0 * q) * bessel;
    sum += term;
    if (!(term > 1e-18 * (sum > 0 ? sum : 1.0))) break;
  }
  return sum;
}

struct CvmStat {
  double t = 0.0;
  std::uint64_t u4 = 0;
};

CvmStat cvm_statistic(const Pooled& p, const std::vector<char>& mask) {
  CvmStat s;
  s.u4 = cvm_u4(p, mask);
  const double k = static_cast<double>(p.nx) * static_cast<double>(p.ny);
  const double n = static_cast<double>(p.n());
  s.t = static_cast<double>(s.u4) / (4.0 * k * n) - (4.0 * k - 1.0) / (6.0 * n);
  return s;
}

double cvm_asymptotic_p(const Pooled& p, double t) {
  const double nx = static_cast<double>(p.nx);
  const double ny = static_cast<double>(p.ny);
  const double n = nx + ny;
  const double k = nx * ny;
  const double et = (1.0 + 1.0 / n) / 6.0;
  const double vt = (n + 1.0) * (4.0 * k * n - 3.0 * (nx * nx + ny * ny) - 2.0 * k) /
                    (45.0 * n * n * 4.0 * k);
  const double tn = 1.0 / 6.0 + (t - et) / std::sqrt(45.0 * vt);
  if (tn < 0.003) return 1.0;
  return std::clamp(1.0 - cvm_limit_cdf(tn), 0.0, 1.0);
}

PMethod choose_method(std::size_t total, const TestOptions& options, bool allow_mc) {
  if (options.method) return *options.method;
  if (total <= options.exhaustive_bound) return PMethod::exact_permutation;
  if (allow_mc && total <= options.mc_bound) return PMethod::monte_carlo;
  return PMethod::asymptotic;
}

constexpr std::size_t kEnumerationCeiling = 30; // C(30,15) ~ 155M stays sane

bool has_ties(const Pooled& p) {
  for (std::size_t i = 1; i < p.n(); ++i) {
    if (p.values[i] == p.values[i - 1]) return true;
  }
  return false;
}

} // namespace

TestResult cvm_two_sample(std::span<const double> x, std::span<const double> y,
                          const TestOptions& options) {
  require_finite(x, "x");
  require_finite(y, "y");
  const Pooled p = pool(x, y);
  const CvmStat obs = cvm_statistic(p, p.is_x);

  TestResult result;
  result.statistic = obs.t;
  result.n1 = p.nx;
  result.n2 = p.ny;
  result.method = choose_method(p.n(), options, /*allow_mc=*/true);

  switch (result.method) {
    case PMethod::exact_permutation: {
      if (p.n() > kEnumerationCeiling)
        throw StatsError("exact CvM enumeration infeasible for combined n = " +
                         std::to_string(p.n()));
      std::uint64_t ge = 0;
      std::uint64_t total = 0;
      for_each_assignment(p.n(), p.nx, [&](const std::vector<char>& mask) {
        ++total;
        if (cvm_u4(p, mask) >= obs.u4) ++ge;
      });
      result.p_value = static_cast<double>(ge) / static_cast<double>(total);
      break;
    }
    case PMethod::monte_carlo: {
      Rng rng(options.seed);
      std::vector<std::size_t> perm(p.n());
      std::iota(perm.begin(), perm.end(), 0);
      std::vector<char> mask(p.n());
      std::uint64_t ge = 0;
      for (std::size_t round = 0; round < options.mc_rounds; ++round) {
        rng.shuffle(perm);
        std::fill(mask.begin(), mask.end(), 0);
        for (std::size_t i = 0; i < p.nx; ++i) mask[perm[i]] = 1;
        if (cvm_u4(p, mask) >= obs.u4) ++ge;
      }
      result.p_value = static_cast<double>(ge + 1) /
                       static_cast<double>(options.mc_rounds + 1);
      break;
    }
    case PMethod::asymptotic:
      result.p_value = cvm_asymptotic_p(p, obs.t);
      break;
  }
  return result;
}

std::vector<std::pair<std::size_t, double>> prefix_cvm_scan(
    const DismantlingCurve& a, const DismantlingCurve& b, std::size_t max_k,
    const TestOptions& options) {
  if (max_k < 2) throw StatsError("prefix scan needs max_k >= 2");
  const auto inc_a = a.increments(max_k); // throws when a curve is too short
  const auto inc_b = b.increments(max_k);
  std::vector<std::pair<std::size_t, double>> out;
  out.reserve(max_k - 1);
  for (std::size_t k = 2; k <= max_k; ++k) {
    const std::span<const double> xa(inc_a.data(), k);
    const std::span<const double> xb(inc_b.data(), k);
    out.emplace_back(k, cvm_two_sample(xa, xb, options).p_value);
  }
  return out;
}

namespace {

/// Exact tie-free distribution of U1 for sizes (m, n): count[u] of
/// interleavings with U1 = u. Recurrence on the largest pooled element:
/// N(i, j, u) = N(i-1, j, u-j) + N(i, j-1, u).
std::vector<std::uint64_t> mwu_exact_counts(std::size_t m, std::size_t n) {
  const std::size_t umax = m * n;
  std::vector<std::vector<std::uint64_t>> dp(
      n + 1, std::vector<std::uint64_t>(umax + 1, 0));
  for (std::size_t j = 0; j <= n; ++j) dp[j][0] = 1; // i = 0
  for (std::size_t i = 1; i <= m; ++i) {
    std::vector<std::vector<std::uint64_t>> next(
        n + 1, std::vector<std::uint64_t>(umax + 1, 0));
    next[0][0] = 1;
    for (std::size_t j = 1; j <= n; ++j) {
      for (std::size_t u = 0; u <= umax; ++u) {
        std::uint64_t c = next[j - 1][u];
        if (u >= j) c += dp[j][u - j];
        next[j][u] = c;
      }
    }
    dp = std::move(next);
  }
  return dp[n];
}

} // namespace

TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y,
                          Sides sides, const TestOptions& options) {
  require_finite(x, "x");
  require_finite(y, "y");
  const Pooled p = pool(x, y);
  const std::uint64_t u2_obs = mwu_u2(p, p.is_x);

  TestResult result;
  result.statistic = static_cast<double>(u2_obs) / 2.0;
  result.n1 = p.nx;
  result.n2 = p.ny;
  result.method = choose_method(p.n(), options, /*allow_mc=*/false);

  const bool ties = has_ties(p);

  if (result.method == PMethod::monte_carlo)
    result.method = ties || p.n() > 60 ? PMethod::asymptotic : PMethod::exact_permutation;

  if (result.method == PMethod::exact_permutation) {
    double p_le = 0.0;
    double p_ge = 0.0;
    if (!ties && p.n() <= 60) {
      const auto counts = mwu_exact_counts(p.nx, p.ny);
      const std::uint64_t u_obs = u2_obs / 2;
      double le = 0.0;
      double ge = 0.0;
      double total = 0.0;
      for (std::size_t u = 0; u < counts.size(); ++u) {
        total += static_cast<double>(counts[u]);
        if (u <= u_obs) le += static_cast<double>(counts[u]);
        if (u >= u_obs) ge += static_cast<double>(counts[u]);
      }
      p_le = le / total;
      p_ge = ge / total;
    } else {
      if (p.n() > kEnumerationCeiling)
        throw StatsError("exact Mann-Whitney enumeration infeasible for combined n = " +
                         std::to_string(p.n()));
      std::uint64_t le = 0;
      std::uint64_t ge = 0;
      std::uint64_t total = 0;
      for_each_assignment(p.n(), p.nx, [&](const std::vector<char>& mask) {
        ++total;
        const std::uint64_t u2 = mwu_u2(p, mask);
        if (u2 <= u2_obs) ++le;
        if (u2 >= u2_obs) ++ge;
      });
      p_le = static_cast<double>(le) / static_cast<double>(total);
      p_ge = static_cast<double>(ge) / static_cast<double>(total);
    }
    switch (sides) {
      case Sides::less: result.p_value = p_le; break;
      case Sides::greater: result.p_value = p_ge; break;
      case Sides::two_sided:
        result.p_value = std::min(1.0, 2.0 * std::min(p_le, p_ge));
        break;
    }
    return result;
  }

  // Normal approximation with tie correction and continuity correction.
  const double nx = static_cast<double>(p.nx);
  const double ny = static_cast<double>(p.ny);
  const double n = nx + ny;
  double tie_sum = 0.0;
  {
    std::size_t i = 0;
    while (i < p.n()) {
      std::size_t j = i;
      while (j + 1 < p.n() && p.values[j + 1] == p.values[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_sum += t * t * t - t;
      i = j + 1;
    }
  }
  const double mu = nx * ny / 2.0;
  const double var = nx * ny / 12.0 * ((n + 1.0) - tie_sum / (n * (n - 1.0)));
  if (var <= 0.0)
    throw StatsError("degenerate variance: every pooled value is identical");
  const double sigma = std::sqrt(var);
  const double u1 = static_cast<double>(u2_obs) / 2.0;
  const double p_le = normal_cdf((u1 + 0.5 - mu) / sigma);
  const double p_ge = 1.0 - normal_cdf((u1 - 0.5 - mu) / sigma);
  switch (sides) {
    case Sides::less: result.p_value = std::clamp(p_le, 0.0, 1.0); break;
    case Sides::greater: result.p_value = std::clamp(p_ge, 0.0, 1.0); break;
    case Sides::two_sided:
      result.p_value = std::clamp(2.0 * std::min(p_le, p_ge), 0.0, 1.0);
      break;
  }
  return result;
}

std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw StatsError("paired samples differ in length");
  if (x.size() < 3) throw StatsError("spearman needs at least 3 pairs");
  require_finite(x, "x");
  require_finite(y, "y");

  const auto rx = midranks(x);
  const auto ry = midranks(y);
  const std::size_t n = x.size();
  const double mean = (static_cast<double>(n) + 1.0) / 2.0;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw StatsError("correlation undefined for a constant vector");

  SpearmanResult result;
  result.n = n;
  result.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  if (std::abs(result.r) == 1.0) {
    result.p_value = 0.0;
    return result;
  }
  const double df = static_cast<double>(n - 2);
  const double t = result.r * std::sqrt(df / (1.0 - result.r * result.r));
  gsl_set_error_handler_off();
  result.p_value = std::clamp(2.0 * gsl_cdf_tdist_Q(std::abs(t), df), 0.0, 1.0);
  return result;
}

void AnnotationTable::add(std::string item, std::string annotator, std::string label) {
  entries_.push_back(Entry{std::move(item), std::move(annotator), std::move(label)});
}

AnnotationTable AnnotationTable::from_csv(const std::string& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line) || csv_split(line) != std::vector<std::string>{
                                "item_id", "annotator_id", "label"})
    throw ParseError("unexpected annotation CSV header in " + path);
  AnnotationTable table;
  while (reader.next(line)) {
    if (line.empty()) continue;
    auto fields = csv_split(line);
    if (fields.size() != 3) throw ParseError("expected 3 fields", reader.line_no());
    table.add(std::move(fields[0]), std::move(fields[1]), std::move(fields[2]));
  }
  return table;
}

std::size_t AnnotationTable::n_annotators() const {
  std::vector<std::string_view> names;
  names.reserve(entries_.size());
  for (const auto& e : entries_) names.push_back(e.annotator);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names.size();
}

double krippendorff_alpha(const AnnotationTable& table) {
  if (table.n_annotators() < 2)
    throw StatsError("krippendorff alpha needs at least two annotators");

  // Group labels by item, mapping labels to dense indices.
  std::map<std::string_view, std::vector<std::size_t>> items;
  std::map<std::string_view, std::size_t> label_index;
  for (const auto& e : table.entries()) {
    const auto [it, inserted] = label_index.try_emplace(e.label, label_index.size());
    items[e.item].push_back(it->second);
  }
  const std::size_t L = label_index.size();

  // Coincidence matrix: each pairable item contributes its ordered label
  // pairs, weighted by 1/(m_u - 1).
  std::vector<double> o(L * L, 0.0);
  for (const auto& [item, labels] : items) {
    const std::size_t m = labels.size();
    if (m < 2) continue;
    const double w = 1.0 / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i != j) o[labels[i] * L + labels[j]] += w;
      }
    }
  }

  std::vector<double> n_label(L, 0.0);
  double n_total = 0.0;
  double d_o = 0.0;
  for (std::size_t a = 0; a < L; ++a) {
    for (std::size_t b = 0; b < L; ++b) {
      n_label[a] += o[a * L + b];
      if (a != b) d_o += o[a * L + b];
    }
    n_total += n_label[a];
  }
  if (n_total <= 0.0) throw StatsError("no pairable items");

  double d_e = 0.0;
  for (std::size_t a = 0; a < L; ++a) {
    for (std::size_t b = 0; b < L; ++b) {
      if (a != b) d_e += n_label[a] * n_label[b];
    }
  }
  d_e /= n_total - 1.0;
  if (d_e == 0.0) return 1.0; // a single label everywhere: perfect agreement
  return 1.0 - d_o / d_e;
}

} // namespace fibrank
