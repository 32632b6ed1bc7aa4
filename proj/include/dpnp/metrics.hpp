#pragma once

#include <vector>

#include "dpnp/grid.hpp"

namespace dpnp {

// Standard normal quantile, accurate to full double precision.
double normal_quantile(double u);

// W1 between the empirical law of `samples` and a grid reference, computed
// as the quantile-function integral with the reference CDF treated as
// piecewise linear between grid nodes.
double wasserstein1_1d(std::vector<double> samples, const GridDensity& ref);

// Two-sample W1 (sorted-quantile coupling; sizes may differ).
double wasserstein1_1d(std::vector<double> a, std::vector<double> b);

// W1 between the empirical law of `samples` and N(mean, var), with the
// Gaussian quantile segments integrated in closed form.
double wasserstein1_gaussian(std::vector<double> samples, double mean,
                             double var);

// Histogram TV: equal-width bins across the reference grid span, samples
// clamped into the span; 0.5 * sum |empirical - reference| bin masses.
double binned_tv(const std::vector<double>& samples, const GridDensity& ref,
                 int bins);

// Kolmogorov-Smirnov statistic against the reference CDF.
double ks_statistic(std::vector<double> samples, const GridDensity& ref);

// TV between two densities on the same grid: 0.5 * sum |p_i - q_i| * spacing.
double tv_grid(const GridDensity& p, const GridDensity& q);

}  // namespace dpnp
