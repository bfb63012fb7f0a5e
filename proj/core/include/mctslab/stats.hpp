#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mctslab::stats {

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double stddev(std::span<const double> x);
double std_err(std::span<const double> x);

/// One-sided bootstrap lower confidence bound on mean(a) - mean(b), resampling
/// each sample independently `resamples` times with a fixed seed.
double bootstrap_diff_lower(std::span<const double> a, std::span<const double> b, double confidence,
                            std::size_t resamples = 10000, std::uint64_t seed = 0x5eed);

/// Two-sample Kolmogorov-Smirnov statistic D.
double ks_statistic(std::span<const double> a, std::span<const double> b);
/// Asymptotic p-value of the two-sample KS test.
double ks_pvalue(std::span<const double> a, std::span<const double> b);

/// Pearson chi-square goodness of fit p-value. Cells with zero expectation
/// must have zero observations and are dropped.
double chi_square_pvalue(std::span<const double> observed, std::span<const double> expected);

/// Clopper-Pearson lower bound on a binomial success probability at the
/// given one-sided confidence.
double binomial_lower_bound(std::uint64_t successes, std::uint64_t trials, double confidence);

}  // namespace mctslab::stats
