#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace treedyn::stats {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double half_width() const { return 0.5 * (hi - lo); }
};

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(long successes, long trials, double z = 1.959963984540054);

double mean(std::span<const double> xs);
double variance(std::span<const double> xs); // unbiased

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// One-sided p-value P[Bin(n, p) >= observed], exact via log-space summation.
double binomial_upper_pvalue(long n, double p, long observed);

/// Kolmogorov-Smirnov statistic of samples against U[0,1).
double ks_statistic(std::vector<double> samples);

/// Pearson chi-square statistic of observed counts against Poisson(lambda)
/// binned as {0, 1, ..., max_bin-1, >= max_bin}.
double chi_square_poisson(const std::vector<long>& counts, double lambda, int max_bin);

} // namespace treedyn::stats
