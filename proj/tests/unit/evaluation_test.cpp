#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "anomaly/errors.hpp"
#include "anomaly/evaluation.hpp"
#include "anomaly/robust_stats.hpp"
#include "fixtures.hpp"

namespace anomaly {
namespace {

using Indices = std::vector<std::size_t>;

TEST(Score, PerfectDetection) {
  const Indices s{3, 9, 20};
  const auto m = score(s, s, 30);
  EXPECT_EQ(m.tp, 3u);
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_EQ(m.recall, 1.0);
  EXPECT_EQ(m.f_beta, 1.0);
}

TEST(Score, HandComputedExample) {
  const Indices detected{1, 2, 3, 4};
  const Indices truth{1, 2, 3, 5, 6, 7};
  const auto m = score(detected, truth, 10);
  EXPECT_EQ(m.tp, 3u);
  EXPECT_EQ(m.fp, 1u);
  EXPECT_EQ(m.fn, 3u);
  EXPECT_DOUBLE_EQ(m.precision, 0.75);
  EXPECT_DOUBLE_EQ(m.recall, 0.5);
  EXPECT_DOUBLE_EQ(m.f_beta, 0.6);
}

TEST(Score, BetaZeroIsPrecision) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> pos(0, 99);
  for (int trial = 0; trial < 50; ++trial) {
    Indices s;
    Indices g;
    for (int k = 0; k < 8; ++k) s.push_back(pos(rng));
    for (int k = 0; k < 8; ++k) g.push_back(pos(rng));
    const auto m = score(s, g, 100, 0.0);
    EXPECT_EQ(m.f_beta, m.precision);
  }
}

TEST(Score, EmptyConventions) {
  const Indices none;
  const Indices some{4};
  auto m = score(none, none, 10);
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_EQ(m.recall, 1.0);
  EXPECT_EQ(m.f_beta, 1.0);
  m = score(some, none, 10);
  EXPECT_EQ(m.fp, 1u);
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.recall, 1.0);
  m = score(none, some, 10);
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_EQ(m.f_beta, 0.0);
}

TEST(Score, ToleranceMatchesEachTruthOnce) {
  const Indices detected{10, 11};
  const Indices truth{10};
  auto m = score(detected, truth, 20, 1.0, 2);
  EXPECT_EQ(m.tp, 1u);
  EXPECT_EQ(m.fp, 1u);

  const Indices one{10};
  const Indices two{9, 11};
  m = score(one, two, 20, 1.0, 1);
  EXPECT_EQ(m.tp, 1u);
  EXPECT_EQ(m.fn, 1u);

  const Indices far{15};
  EXPECT_EQ(score(far, truth, 20, 1.0, 4).tp, 0u);
  EXPECT_EQ(score(far, truth, 20, 1.0, 5).tp, 1u);
}

TEST(Score, GreedyPrefersNearestPair) {
  const Indices detected{5, 7};
  const Indices truth{6, 8};
  const auto m = score(detected, truth, 20, 1.0, 1);
  EXPECT_EQ(m.tp, 2u);
}

TEST(Score, OutOfRangeIndexIsAnError) {
  const Indices bad{10};
  const Indices ok{1};
  EXPECT_THROW(score(bad, ok, 10), EvalError);
  EXPECT_THROW(score(ok, bad, 10), EvalError);
  EXPECT_THROW(score(ok, ok, 10, -1.0), EvalError);
}

TEST(Score, SwappingSetsSwapsPrecisionAndRecall) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> pos(0, 199);
  std::uniform_int_distribution<std::size_t> len(1, 20);
  for (int trial = 0; trial < 100; ++trial) {
    Indices s;
    Indices g;
    for (std::size_t k = len(rng); k > 0; --k) s.push_back(pos(rng));
    for (std::size_t k = len(rng); k > 0; --k) g.push_back(pos(rng));
    const std::size_t tol = static_cast<std::size_t>(trial % 3);
    const auto a = score(s, g, 200, 1.0, tol);
    const auto b = score(g, s, 200, 1.0, tol);
    EXPECT_EQ(a.precision, b.recall);
    EXPECT_EQ(a.recall, b.precision);
    EXPECT_EQ(a.tp, b.tp);
  }
}

TEST(FBeta, HarmonicMeanBounds) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(1e-6, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double p = unit(rng);
    const double r = unit(rng);
    const double f = f_beta(p, r, 1.0);
    EXPECT_GE(f, std::min(p, r) - 1e-15);
    EXPECT_LE(f, std::min(2 * p, 2 * r) + 1e-15);
    EXPECT_LE(f, 1.0);
  }
  EXPECT_EQ(f_beta(0.0, 0.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(f_beta(0.5, 1.0, 2.0), 5.0 * 0.5 / (4.0 * 0.5 + 1.0));
  EXPECT_GT(f_beta(0.4, 0.9, 2.0), f_beta(0.4, 0.9, 1.0));
  EXPECT_LT(f_beta(0.4, 0.9, 0.5), f_beta(0.4, 0.9, 1.0));
}

TEST(BSpline, ReproducesCubic) {
  std::vector<double> v(200);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double t = static_cast<double>(i) / 20.0;
    v[i] = 0.3 * t * t * t - 2.0 * t * t + t + 5.0;
  }
  const auto s = TimeSeries::regular(0, 60, v);
  for (std::size_t spacing : {3u, 7u, 25u}) {
    const auto fit = bspline_smooth(s, spacing);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(fit[i], v[i], 1e-6);
  }
}

TEST(BSpline, ConstantIsExact) {
  const auto s = TimeSeries::regular(0, 60, std::vector<double>(100, 123.456));
  const auto fit = bspline_smooth(s, 5);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(fit[i], 123.456);
  EXPECT_EQ(fit.timestamps()[99], s.timestamps()[99]);
}

TEST(BSpline, SmoothingReducesNoise) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SeasonalSpec spec;
    spec.seed = seed;
    spec.noise_sigma = 0.0;
    const auto clean = generate_seasonal(spec);
    spec.noise_sigma = 1.0;
    const auto noisy = generate_seasonal(spec);
    const auto fit = bspline_smooth(noisy, 24 / 8);
    double sq = 0.0;
    for (std::size_t i = 0; i < fit.size(); ++i) sq += (fit[i] - clean[i]) * (fit[i] - clean[i]);
    EXPECT_LT(std::sqrt(sq / static_cast<double>(fit.size())), 1.0);
  }
}

TEST(BSpline, TooShortIsAnError) {
  const auto s = TimeSeries::regular(0, 60, std::vector<double>(10, 1.0));
  EXPECT_THROW(bspline_smooth(s, 5), EvalError);
  EXPECT_THROW(bspline_smooth(s, 0), EvalError);
}

TEST(Inject, ZeroCountLeavesBaseline) {
  const auto base = generate_seasonal({});
  InjectionSpec spec;
  const auto out = inject(base, spec, 1.0);
  EXPECT_EQ(out.series, base);
  EXPECT_TRUE(out.anomaly_indices().empty());
}

TEST(Inject, SinglePointShiftIsExact) {
  const auto base = generate_seasonal({});
  InjectionSpec spec;
  spec.count = 1;
  spec.magnitude_min = 10.0;
  spec.magnitude_max = 10.0;
  spec.seed = 17;
  const auto out = inject(base, spec, 0.5);
  const auto labels = out.anomaly_indices();
  ASSERT_EQ(labels.size(), 1u);
  const std::size_t p = labels[0];
  EXPECT_EQ(out.series[p] - base[p], 5.0);
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (i != p) EXPECT_EQ(out.series[i], base[i]);
  }
}

TEST(Inject, DeterministicUnderSeed) {
  const auto base = generate_seasonal({});
  InjectionSpec spec;
  spec.count = 6;
  spec.width_max = 4;
  spec.positive_fraction = 0.5;
  spec.seed = 5;
  const auto a = inject(base, spec, 1.3);
  const auto b = inject(base, spec, 1.3);
  EXPECT_EQ(a.series, b.series);
  EXPECT_EQ(a.labels, b.labels);
  spec.seed = 6;
  EXPECT_NE(inject(base, spec, 1.3).labels, a.labels);
}

TEST(Inject, IntervalsAreSeparatedAndOnlyLabelsChange) {
  const auto base = generate_seasonal({});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    InjectionSpec spec;
    spec.count = 8;
    spec.width_min = 2;
    spec.width_max = 9;
    spec.min_gap = 5;
    spec.positive_fraction = 0.5;
    spec.seed = seed;
    const auto out = inject(base, spec, 2.0);

    std::vector<std::pair<std::size_t, std::size_t>> runs;
    for (std::size_t i = 0; i < out.labels.size(); ++i) {
      if (!out.labels[i]) {
        EXPECT_EQ(out.series[i], base[i]);
        continue;
      }
      if (runs.empty() || runs.back().second != i) runs.emplace_back(i, i + 1);
      else runs.back().second = i + 1;
    }
    ASSERT_EQ(runs.size(), 8u) << "seed " << seed;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const auto [start, end] = runs[k];
      EXPECT_GE(end - start, 2u);
      EXPECT_LE(end - start, 9u);
      if (k > 0) EXPECT_GE(start - runs[k - 1].second, 5u);
      const double shift = out.series[start] - base[start];
      EXPECT_GE(std::abs(shift), 16.0 - 1e-9);
      EXPECT_LE(std::abs(shift), 24.0 + 1e-9);
      for (std::size_t i = start; i < end; ++i) {
        EXPECT_NEAR(out.series[i] - base[i], shift, 1e-9);
      }
    }
  }
}

TEST(Inject, SigmaFromRawMinusBaseline) {
  SeasonalSpec gen;
  gen.seed = 8;
  const auto raw = generate_seasonal(gen);
  const auto base = bspline_smooth(raw, 3);
  std::vector<double> diff;
  for (std::size_t i = 0; i < raw.size(); ++i) diff.push_back(raw[i] - base[i]);
  const double sigma = mean_std(diff).sample_std;
  InjectionSpec spec;
  spec.count = 3;
  spec.seed = 2;
  const auto a = inject(raw, base, spec);
  const auto b = inject(base, spec, sigma);
  EXPECT_EQ(a.series, b.series);
}

TEST(Inject, InfeasibleSpecsAreErrors) {
  const auto base = TimeSeries::regular(0, 60, std::vector<double>(50, 0.0));
  InjectionSpec spec;
  spec.count = 10;
  spec.width_max = 4;
  spec.min_gap = 1;
  EXPECT_THROW(inject(base, spec, 1.0), EvalError);
  spec = {};
  spec.count = 1;
  spec.magnitude_min = 5;
  spec.magnitude_max = 4;
  EXPECT_THROW(inject(base, spec, 1.0), EvalError);
  spec = {};
  spec.count = 1;
  spec.width_min = 0;
  EXPECT_THROW(inject(base, spec, 1.0), EvalError);
  spec = {};
  spec.count = 1;
  spec.positive_fraction = 1.5;
  EXPECT_THROW(inject(base, spec, 1.0), EvalError);
}

TEST(GenerateSeasonal, NoiseFreeSinusoidLeavesTinyResidual) {
  SeasonalSpec spec;
  spec.noise_sigma = 0.0;
  const auto s = generate_seasonal(spec);
  EXPECT_EQ(s.size(), 24u * 14u);
  EXPECT_EQ(s.period(), std::optional<std::size_t>(24));
  StlConfig config;
  config.period = 24;
  const auto d = median_residual(s, stl_decompose(s, config));
  double worst = 0.0;
  for (double r : d.residual) worst = std::max(worst, std::abs(r));
  EXPECT_LT(worst, 1e-3 * spec.amplitude);
}

TEST(GenerateSeasonal, NoiseFreeCyclesRepeat) {
  SeasonalSpec spec;
  spec.noise_sigma = 0.0;
  spec.modes = 3;
  spec.phases = {0.3, 1.1, -0.4};
  spec.period = 30;
  const auto s = generate_seasonal(spec);
  for (std::size_t i = 0; i + 30 < s.size(); ++i) EXPECT_EQ(s[i + 30], s[i]);
}

TEST(GenerateSeasonal, ExtraModesAddHarmonics) {
  auto harmonic_amplitude = [](const TimeSeries& s, std::size_t period, int k) {
    double c = 0.0;
    double d = 0.0;
    for (std::size_t t = 0; t < s.size(); ++t) {
      const double angle = 2.0 * std::numbers::pi * k * static_cast<double>(t % period) /
                           static_cast<double>(period);
      c += s[t] * std::cos(angle);
      d += s[t] * std::sin(angle);
    }
    return 2.0 * std::hypot(c, d) / static_cast<double>(s.size());
  };
  SeasonalSpec spec;
  spec.seed = 4;
  spec.cycles = 28;
  const auto one = generate_seasonal(spec);
  spec.modes = 2;
  const auto two = generate_seasonal(spec);
  EXPECT_NEAR(harmonic_amplitude(one, 24, 1), 10.0, 0.3);
  EXPECT_NEAR(harmonic_amplitude(two, 24, 1), 10.0, 0.3);
  EXPECT_LT(harmonic_amplitude(one, 24, 2), 0.3);
  EXPECT_NEAR(harmonic_amplitude(two, 24, 2), 5.0, 0.3);
}

TEST(GenerateSeasonal, TrendAndDeterminism) {
  SeasonalSpec spec;
  spec.noise_sigma = 0.0;
  spec.trend_slope = 0.5;
  const auto s = generate_seasonal(spec);
  EXPECT_NEAR(s[24] - s[0], 12.0, 1e-9);
  spec.noise_sigma = 1.0;
  spec.seed = 3;
  EXPECT_EQ(generate_seasonal(spec), generate_seasonal(spec));
  spec.cycles = 1;
  EXPECT_THROW(generate_seasonal(spec), EvalError);
}

std::vector<NamedDetector> seasonal_detectors() {
  DetectorConfig a;
  a.algorithm = Algorithm::s_esd;
  DetectorConfig b;
  b.algorithm = Algorithm::s_h_esd;
  return {{"s-esd", a}, {"s-h-esd", b}};
}

TEST(RunCorpus, LayoutAndDeterminism) {
  const auto corpus = testing::seasonal_corpus(5, 4);
  const auto detectors = seasonal_detectors();
  InjectionSpec spec;
  spec.count = 4;
  spec.seed = 9;
  const auto rows = run_corpus(corpus, detectors, spec);
  ASSERT_EQ(rows.size(), 4u * 2u + 2u);
  EXPECT_EQ(rows[0].series, corpus[0].name);
  EXPECT_EQ(rows[1].detector, "s-h-esd");
  EXPECT_EQ(rows[8].series, kAggregateRowName);
  EXPECT_EQ(rows[9].detector, "s-h-esd");

  CorpusOptions parallel;
  parallel.jobs = 4;
  const auto again = run_corpus(corpus, detectors, spec, parallel);
  ASSERT_EQ(again.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(again[i].metrics.tp, rows[i].metrics.tp);
    EXPECT_EQ(again[i].metrics.fp, rows[i].metrics.fp);
    EXPECT_EQ(again[i].metrics.f_beta, rows[i].metrics.f_beta);
  }

  std::ostringstream a;
  std::ostringstream b;
  write_results_csv(a, rows);
  write_results_csv(b, again);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
            "series,detector,tp,fp,fn,precision,recall,f_beta");
}

TEST(RunCorpus, AggregateAveragesMetricsAndSumsCounts) {
  std::vector<CorpusRow> rows;
  rows.push_back({"a", "x", metrics_from_counts(1, 1, 0, 1.0, false)});
  rows.push_back({"b", "x", metrics_from_counts(2, 0, 2, 1.0, false)});
  const auto total = aggregate(rows);
  ASSERT_EQ(total.size(), 1u);
  EXPECT_EQ(total[0].metrics.tp, 3u);
  EXPECT_EQ(total[0].metrics.fp, 1u);
  EXPECT_EQ(total[0].metrics.fn, 2u);
  EXPECT_DOUBLE_EQ(total[0].metrics.precision, 0.75);
  EXPECT_DOUBLE_EQ(total[0].metrics.recall, 0.75);
}

TEST(RunCorpus, EmptyInputsAreErrors) {
  const auto corpus = testing::seasonal_corpus(5, 1);
  EXPECT_THROW(run_corpus({}, seasonal_detectors(), InjectionSpec{}), EvalError);
  EXPECT_THROW(run_corpus(corpus, {}, InjectionSpec{}), EvalError);
}

TEST(RunCorpus, CleanCorpusFalsePositiveRate) {
  const auto corpus = testing::seasonal_corpus(11, 10);
  const auto rows = run_corpus(corpus, seasonal_detectors(), InjectionSpec{});
  std::size_t points = 0;
  for (const auto& s : corpus) points += s.series.size();
  for (const auto& row : rows) {
    if (row.series != kAggregateRowName) continue;
    EXPECT_EQ(row.metrics.tp, 0u);
    EXPECT_LE(static_cast<double>(row.metrics.fp), 0.02 * static_cast<double>(points))
        << row.detector;
  }
}

}  // namespace
}  // namespace anomaly
