/* Copyright 2026 The Loadgauge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "loadgauge/stats.h"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace loadgauge {
namespace {

double StandardNormalCdf(double x) {
  return 0.5 * std::erfc(-x * M_SQRT1_2);
}

// Acklam's rational approximation to the normal quantile (~1e-9 relative
// error on its own), followed by one Halley refinement against erfc-based
// CDF values to push the error to the limits of double precision.
double AcklamInverseCdf(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kPLow = 0.02425;
  constexpr double kPHigh = 1.0 - kPLow;

  double x;
  if (p < kPLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= kPHigh) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  const double e = StandardNormalCdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

}  // namespace

double NormalInverseCdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("NormalInverseCdf: p must be in (0, 1)");
  }
  return AcklamInverseCdf(p);
}

double QueryCountMargin(double tail_percentile) {
  if (!(tail_percentile > 0.0 && tail_percentile < 1.0)) {
    throw std::invalid_argument(
        "QueryCountMargin: tail_percentile must be in (0, 1)");
  }
  return (1.0 - tail_percentile) / 20.0;
}

int64_t MinQueryCountRaw(double tail_percentile, double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument(
        "MinQueryCountRaw: confidence must be in (0, 1)");
  }
  const double margin = QueryCountMargin(tail_percentile);
  const double z = NormalInverseCdf((1.0 - confidence) / 2.0);
  const double count =
      z * z * tail_percentile * (1.0 - tail_percentile) / (margin * margin);
  return std::llround(count);
}

int64_t RoundUpMultiple(int64_t count, int64_t granule) {
  if (count < 0 || granule <= 0) {
    throw std::invalid_argument(
        "RoundUpMultiple: count must be >= 0 and granule > 0");
  }
  if (count == 0) {
    return granule;
  }
  return ((count + granule - 1) / granule) * granule;
}

int64_t MinQueryCount(double tail_percentile, double confidence) {
  return RoundUpMultiple(MinQueryCountRaw(tail_percentile, confidence),
                         kQueryCountGranule);
}

namespace {

// 1-based nearest rank, with a guard against doubles like 0.90 * 100
// evaluating just above the exact product and bumping the rank by one.
size_t NearestRank(size_t n, double p) {
  if (n == 0) {
    throw std::invalid_argument("Percentile: values must be nonempty");
  }
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("Percentile: p must be in (0, 1]");
  }
  const double r = p * static_cast<double>(n);
  double rank = std::ceil(r - r * 4.0 * DBL_EPSILON);
  rank = std::max(1.0, std::min(rank, static_cast<double>(n)));
  return static_cast<size_t>(rank);
}

template <typename T>
T PercentileImpl(std::span<const T> values, double p) {
  const size_t rank = NearestRank(values.size(), p);
  std::vector<T> sorted(values.begin(), values.end());
  std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
  return sorted[rank - 1];
}

}  // namespace

Duration Percentile(std::span<const Duration> values, double p) {
  return PercentileImpl(values, p);
}

double Percentile(std::span<const double> values, double p) {
  return PercentileImpl(values, p);
}

double OvertimeFraction(std::span<const Duration> latencies, Duration bound) {
  if (latencies.empty()) {
    throw std::invalid_argument("OvertimeFraction: latencies must be nonempty");
  }
  const auto over = std::count_if(latencies.begin(), latencies.end(),
                                  [bound](Duration d) { return d > bound; });
  return static_cast<double>(over) / static_cast<double>(latencies.size());
}

}  // namespace loadgauge
