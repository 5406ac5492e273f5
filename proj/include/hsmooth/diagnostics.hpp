#pragma once

#include <span>
#include <string>
#include <vector>

namespace hsmooth {

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7). p in [0, 1].
double quantile(std::span<const double> x, double p);

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator).
double stddev(std::span<const double> x);

/// Effective sample size from the initial positive sequence estimator of
/// the integrated autocorrelation time. A constant chain returns its length.
double effective_sample_size(std::span<const double> x);

struct ParamSummary {
  std::string name;
  double mean;
  double sd;
  double q025;
  double q975;
  double ess;
};

ParamSummary summarize(const std::string& name, std::span<const double> x);

}  // namespace hsmooth
