#pragma once

#include <span>
#include <vector>

#include "lcbench/types.hpp"

namespace lcbench::stats {

double Mean(std::span<const double> xs);

// Midpoint of the two middle values for even sizes.
double Median(std::vector<double> xs);

// Sample standard deviation (n - 1 denominator); 0 for a single value.
double SampleStd(std::span<const double> xs);

// Linear interpolation between order statistics at rank (n - 1) * q.
double Quantile(std::vector<double> xs, double q);

// Nearest-rank percentile: the ceil(q * n)-th smallest value.
double NearestRank(std::vector<double> xs, double q);

/// mean/median/std/q25/q75 of a non-empty sample; throws Error when empty.
FieldStats Summarize(std::span<const double> xs);

}  // namespace lcbench::stats
