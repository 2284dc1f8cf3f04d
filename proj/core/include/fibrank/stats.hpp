#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fibrank/dismantle.hpp"

namespace fibrank {

enum class PMethod { asymptotic, exact_permutation, monte_carlo };
enum class Sides { two_sided, less, greater };

std::string_view pmethod_name(PMethod m);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  PMethod method = PMethod::asymptotic;
};

struct TestOptions {
  /// Exact permutation enumeration when n1 + n2 is at most this.
  std::size_t exhaustive_bound = 24;
  /// Seeded Monte-Carlo permutation rounds for mid-size CvM samples where
  /// enumeration is infeasible but the asymptotic series is still rough.
  std::size_t mc_rounds = 20000;
  std::uint64_t seed = 0x5eed;
  /// Largest combined size routed to Monte-Carlo instead of asymptotic.
  std::size_t mc_bound = 48;
  /// Overrides the size-based method choice when set.
  std::optional<PMethod> method;
};

/// Two-sample Cramer-von Mises test. Exact permutation below the exhaustive
/// bound, seeded Monte-Carlo permutation up to mc_bound, asymptotic above.
/// Throws StatsError on an empty sample.
TestResult cvm_two_sample(std::span<const double> x, std::span<const double> y,
                          const TestOptions& options = {});

/// CvM on the two length-k increment vectors for k = 2 .. max_k.
/// Throws StatsError when either curve is shorter than max_k.
std::vector<std::pair<std::size_t, double>> prefix_cvm_scan(
    const DismantlingCurve& a, const DismantlingCurve& b, std::size_t max_k,
    const TestOptions& options = {});

/// Mann-Whitney U (statistic = U of x). Exact by enumeration for small
/// samples, normal approximation with tie correction and continuity
/// correction otherwise. Throws StatsError on an empty sample, or on
/// degenerate variance under the approximation.
TestResult mann_whitney_u(std::span<const double> x, std::span<const double> y,
                          Sides sides = Sides::two_sided,
                          const TestOptions& options = {});

struct SpearmanResult {
  double r = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Rank correlation with average ranks for ties; two-sided p via the
/// t approximation. Throws StatsError for n < 3 or a constant vector.
SpearmanResult spearman(std::span<const double> x, std::span<const double> y);

/// Sparse annotator-by-item nominal labels.
class AnnotationTable {
public:
  void add(std::string item, std::string annotator, std::string label);
  /// CSV with header (item_id, annotator_id, label).
  static AnnotationTable from_csv(const std::string& path);

  std::size_t n_entries() const noexcept { return entries_.size(); }
  std::size_t n_annotators() const;

  struct Entry {
    std::string item;
    std::string annotator;
    std::string label;
  };
  std::span<const Entry> entries() const noexcept { return entries_; }

private:
  std::vector<Entry> entries_;
};

/// Krippendorff's alpha, nominal metric, via the coincidence matrix.
/// Items with fewer than two labels are skipped. Throws StatsError when
/// nothing is pairable; identical labels everywhere give 1.0.
double krippendorff_alpha(const AnnotationTable& table);

/// Average ranks (midranks) of a sample, 1-based. Shared by the rank tests;
/// exposed for direct checking.
std::vector<double> midranks(std::span<const double> values);

} // namespace fibrank
