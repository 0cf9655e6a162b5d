#ifndef FRONTDOOR_STATS_HPP
#define FRONTDOOR_STATS_HPP

#include <span>
#include <vector>

namespace frontdoor::stats {

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sd(std::span<const double> v);

/// Type-7 quantile (linear interpolation between order statistics) of an
/// ascending sample.
double quantile_sorted(std::span<const double> sorted, double p);
/// Sorts a copy, then quantile_sorted for each p.
std::vector<double> quantiles(std::span<const double> v, std::span<const double> ps);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

}  // namespace frontdoor::stats

#endif
