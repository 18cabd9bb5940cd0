#pragma once

#include <span>
#include <vector>

namespace dcurv::stats {

double mean(std::span<const double> x);
/// Population standard deviation.
double stddev(std::span<const double> x);

/// Linear interpolation between order statistics (the "type 7" rule); q in [0,1].
double quantile(std::vector<double> values, double q);

/// Ranks starting at 1, ties receive their average rank.
std::vector<double> ranks(std::span<const double> x);

/// Throws DegenerateVariance when either input is constant.
double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace dcurv::stats
