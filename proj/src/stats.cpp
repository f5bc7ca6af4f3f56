#include "lcbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lcbench::stats {
namespace {

void RequireNonEmpty(std::size_t n) {
  if (n == 0) throw Error("statistic of an empty sample");
}

}  // namespace

double Mean(std::span<const double> xs) {
  RequireNonEmpty(xs.size());
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double Median(std::vector<double> xs) {
  RequireNonEmpty(xs.size());
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  if (n % 2 == 1) return xs[n / 2];
  return (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

double SampleStd(std::span<const double> xs) {
  RequireNonEmpty(xs.size());
  if (xs.size() == 1) return 0.0;
  const double m = Mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double Quantile(std::vector<double> xs, double q) {
  RequireNonEmpty(xs.size());
  std::sort(xs.begin(), xs.end());
  const double rank = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  if (frac == 0.0) return xs[lo];
  return xs[lo] + (xs[hi] - xs[lo]) * frac;
}

double NearestRank(std::vector<double> xs, double q) {
  RequireNonEmpty(xs.size());
  std::sort(xs.begin(), xs.end());
  // Guard against q * n landing a hair above an integer (0.95 * 100).
  const double exact = q * static_cast<double>(xs.size());
  auto rank = static_cast<std::size_t>(std::ceil(exact - 1e-9 * exact));
  rank = std::clamp<std::size_t>(rank, 1, xs.size());
  return xs[rank - 1];
}

FieldStats Summarize(std::span<const double> xs) {
  RequireNonEmpty(xs.size());
  std::vector<double> v(xs.begin(), xs.end());
  FieldStats s;
  s.mean = Mean(xs);
  s.median = Median(v);
  s.std = SampleStd(xs);
  s.q25 = Quantile(v, 0.25);
  s.q75 = Quantile(v, 0.75);
  return s;
}

}  // namespace lcbench::stats
