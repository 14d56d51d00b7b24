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

/// \file
/// \brief Statistics used to size runs and evaluate latency results.

#ifndef LOADGAUGE_STATS_H_
#define LOADGAUGE_STATS_H_

#include <cstdint>
#include <span>

#include "loadgauge/query.h"

namespace loadgauge {

/// Query counts are rounded up to a multiple of this so accelerators with
/// large batch or pipeline widths see a round amount of work.
inline constexpr int64_t kQueryCountGranule = 8192;  // 2^13

/// Inverse CDF of the standard normal distribution. `p` must lie in (0, 1).
/// Accurate to well under 1e-9 absolute error over the full domain.
double NormalInverseCdf(double p);

/// Half-width of the confidence interval a run must support: one twentieth
/// of the distance between the tail being measured and 1. Tighter tails get
/// proportionally tighter margins.
double QueryCountMargin(double tail_percentile);

/// Number of queries needed to bound a binomial estimate of
/// `tail_percentile` within QueryCountMargin at `confidence`, before any
/// rounding. The normal-approximation sample size, rounded to the nearest
/// integer.
int64_t MinQueryCountRaw(double tail_percentile, double confidence);

/// Rounds `count` up to the nearest positive multiple of `granule`.
int64_t RoundUpMultiple(int64_t count, int64_t granule);

/// MinQueryCountRaw rounded up to a multiple of kQueryCountGranule.
int64_t MinQueryCount(double tail_percentile, double confidence);

/// Nearest-rank percentile: the smallest element such that at least
/// ceil(p * n) of the n values are <= it. `values` need not be sorted and
/// must be nonempty; `p` must lie in (0, 1].
Duration Percentile(std::span<const Duration> values, double p);
double Percentile(std::span<const double> values, double p);

/// Fraction of `latencies` strictly greater than `bound`. Empty input is an
/// error.
double OvertimeFraction(std::span<const Duration> latencies, Duration bound);

}  // namespace loadgauge

#endif  // LOADGAUGE_STATS_H_
