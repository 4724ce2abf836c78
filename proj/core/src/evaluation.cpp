#include "anomaly/evaluation.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <iterator>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>
#include <tuple>

#include <Eigen/Sparse>
#include <fmt/format.h>

#include "anomaly/errors.hpp"
#include "anomaly/robust_stats.hpp"

namespace anomaly {

namespace {

std::vector<std::size_t> unique_sorted(std::span<const std::size_t> in) {
  std::vector<std::size_t> out(in.begin(), in.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Uniform cubic B-spline weights for the four active basis functions.
void cubic_weights(double u, double w[4]) {
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double v = 1.0 - u;
  w[0] = v * v * v / 6.0;
  w[1] = (3.0 * u3 - 6.0 * u2 + 4.0) / 6.0;
  w[2] = (-3.0 * u3 + 3.0 * u2 + 3.0 * u + 1.0) / 6.0;
  w[3] = u3 / 6.0;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

double f_beta(double precision, double recall, double beta) {
  const double b2 = beta * beta;
  const double denom = b2 * precision + recall;
  if (precision + recall == 0.0 || denom == 0.0) return 0.0;
  return (1.0 + b2) * precision * recall / denom;
}

EvalMetrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, double beta,
                                bool truth_empty) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw EvalError(fmt::format("beta must be non-negative, got {}", beta));
  }
  EvalMetrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.beta = beta;
  if (tp + fp == 0) {
    m.precision = truth_empty ? 1.0 : 0.0;
  } else {
    m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  m.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  m.f_beta = beta == 0.0 ? m.precision : f_beta(m.precision, m.recall, beta);
  return m;
}

EvalMetrics score(std::span<const std::size_t> detected, std::span<const std::size_t> truth,
                  std::size_t n, double beta, std::size_t tolerance) {
  const auto s = unique_sorted(detected);
  const auto g = unique_sorted(truth);
  if ((!s.empty() && s.back() >= n) || (!g.empty() && g.back() >= n)) {
    throw EvalError(fmt::format("index out of range for a series of length {}", n));
  }

  // Candidate pairs (distance, truth position, detected position).
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> pairs;
  for (std::size_t si = 0; si < s.size(); ++si) {
    const std::size_t lo = s[si] >= tolerance ? s[si] - tolerance : 0;
    auto it = std::lower_bound(g.begin(), g.end(), lo);
    for (; it != g.end() && *it <= s[si] + tolerance; ++it) {
      const std::size_t d = *it > s[si] ? *it - s[si] : s[si] - *it;
      pairs.emplace_back(d, static_cast<std::size_t>(it - g.begin()), si);
    }
  }
  std::sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
    return std::tuple(std::get<0>(a), g[std::get<1>(a)], s[std::get<2>(a)]) <
           std::tuple(std::get<0>(b), g[std::get<1>(b)], s[std::get<2>(b)]);
  });

  std::vector<bool> truth_used(g.size(), false);
  std::vector<bool> det_used(s.size(), false);
  std::size_t tp = 0;
  for (const auto& [d, gi, si] : pairs) {
    if (truth_used[gi] || det_used[si]) continue;
    truth_used[gi] = true;
    det_used[si] = true;
    ++tp;
  }
  return metrics_from_counts(tp, s.size() - tp, g.size() - tp, beta, g.empty());
}

TimeSeries bspline_smooth(const TimeSeries& series, std::size_t knot_spacing) {
  const std::size_t n = series.size();
  if (knot_spacing == 0) throw EvalError("knot spacing must be positive");
  if (n < 4 * knot_spacing) {
    throw EvalError(fmt::format("B-spline smoothing needs at least {} points, got {}",
                                4 * knot_spacing, n));
  }
  // Knots are spread evenly so the last sample sits on the last knot.
  const std::size_t spans = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(static_cast<double>(n - 1) /
                                              static_cast<double>(knot_spacing))));
  const double h = static_cast<double>(n - 1) / static_cast<double>(spans);
  const std::size_t basis = spans + 3;

  // Fit the offset from the first sample so constant input stays exact.
  const double offset = series[0];

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(n * 16);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis));
  std::vector<std::size_t> first(n);
  std::vector<std::array<double, 4>> weights(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double u = static_cast<double>(t) / h;
    const std::size_t span = std::min(static_cast<std::size_t>(u), spans - 1);
    cubic_weights(u - static_cast<double>(span), weights[t].data());
    first[t] = span;
    const double y = series[t] - offset;
    for (int a = 0; a < 4; ++a) {
      rhs[static_cast<Eigen::Index>(span + a)] += weights[t][a] * y;
      for (int b = 0; b < 4; ++b) {
        triplets.emplace_back(static_cast<int>(span + a), static_cast<int>(span + b),
                              weights[t][a] * weights[t][b]);
      }
    }
  }
  Eigen::SparseMatrix<double> normal(static_cast<Eigen::Index>(basis),
                                     static_cast<Eigen::Index>(basis));
  normal.setFromTriplets(triplets.begin(), triplets.end());
  // A vanishing ridge keeps the system definite when knots outnumber samples.
  double trace = 0.0;
  for (Eigen::Index i = 0; i < normal.rows(); ++i) trace += normal.coeff(i, i);
  const double ridge = 1e-12 * trace / static_cast<double>(basis);
  for (Eigen::Index i = 0; i < normal.rows(); ++i) normal.coeffRef(i, i) += ridge;

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(normal);
  if (solver.info() != Eigen::Success) throw EvalError("B-spline normal equations are singular");
  const Eigen::VectorXd coef = solver.solve(rhs);

  std::vector<double> fitted(n);
  for (std::size_t t = 0; t < n; ++t) {
    double v = 0.0;
    for (int a = 0; a < 4; ++a) v += weights[t][a] * coef[static_cast<Eigen::Index>(first[t] + a)];
    fitted[t] = offset + v;
  }
  return series.with_values(std::move(fitted));
}

void validate(const InjectionSpec& spec, std::size_t n) {
  if (!(spec.magnitude_min >= 0.0 && spec.magnitude_min <= spec.magnitude_max) ||
      !std::isfinite(spec.magnitude_max)) {
    throw EvalError(fmt::format("bad magnitude range [{}, {}]", spec.magnitude_min,
                                spec.magnitude_max));
  }
  if (spec.width_min < 1 || spec.width_min > spec.width_max) {
    throw EvalError(fmt::format("bad width range [{}, {}]", spec.width_min, spec.width_max));
  }
  if (!(spec.positive_fraction >= 0.0 && spec.positive_fraction <= 1.0)) {
    throw EvalError(fmt::format("positive fraction must be in [0, 1], got {}",
                                spec.positive_fraction));
  }
  if (spec.count > 0 && spec.count * (spec.width_max + spec.min_gap) >= n) {
    throw EvalError(fmt::format("{} intervals of width up to {} with gap {} do not fit in {}",
                                spec.count, spec.width_max, spec.min_gap, n));
  }
}

LabeledSeries inject(const TimeSeries& baseline, const InjectionSpec& spec, double sigma) {
  const std::size_t n = baseline.size();
  validate(spec, n);
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw EvalError(fmt::format("sigma must be finite and non-negative, got {}", sigma));
  }
  std::vector<double> values(baseline.values().begin(), baseline.values().end());
  std::vector<bool> labels(n, false);
  if (spec.count == 0) return {baseline, std::move(labels)};

  auto rng = make_rng(spec.seed, 0);
  std::uniform_int_distribution<std::size_t> width_dist(spec.width_min, spec.width_max);
  std::uniform_real_distribution<double> magnitude_dist(spec.magnitude_min, spec.magnitude_max);
  std::bernoulli_distribution sign_dist(spec.positive_fraction);

  std::vector<std::size_t> widths(spec.count);
  std::size_t occupied = 0;
  for (auto& w : widths) {
    w = width_dist(rng);
    occupied += w;
  }
  occupied += (spec.count - 1) * spec.min_gap;
  const std::size_t slack = n - occupied;

  // Uniform placement: choose `count` of slack + count slots.
  std::vector<std::size_t> slots(slack + spec.count);
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
  std::vector<std::size_t> chosen;
  std::sample(slots.begin(), slots.end(), std::back_inserter(chosen), spec.count, rng);

  std::size_t cursor = 0;
  for (std::size_t k = 0; k < spec.count; ++k) {
    const std::size_t start = cursor + (chosen[k] - k);
    const double magnitude = magnitude_dist(rng) * sigma;
    const double shift = sign_dist(rng) ? magnitude : -magnitude;
    for (std::size_t i = start; i < start + widths[k]; ++i) {
      values[i] += shift;
      labels[i] = true;
    }
    cursor += widths[k] + spec.min_gap;
  }
  return {baseline.with_values(std::move(values)), std::move(labels)};
}

LabeledSeries inject(const TimeSeries& raw, const TimeSeries& baseline,
                     const InjectionSpec& spec) {
  if (raw.size() != baseline.size()) {
    throw EvalError(fmt::format("raw length {} differs from baseline length {}", raw.size(),
                                baseline.size()));
  }
  std::vector<double> diff(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) diff[i] = raw[i] - baseline[i];
  return inject(baseline, spec, mean_std(diff).sample_std);
}

TimeSeries generate_seasonal(const SeasonalSpec& spec) {
  if (spec.period < 1) throw EvalError("period must be positive");
  if (spec.cycles < 2) throw EvalError(fmt::format("need at least 2 cycles, got {}", spec.cycles));
  if (!(spec.noise_sigma >= 0.0)) throw EvalError("noise sigma must be non-negative");
  const std::size_t n = spec.period * spec.cycles;
  auto rng = make_rng(spec.seed, 1);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> values(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t pos = t % spec.period;
    double v = 0.0;
    for (std::size_t k = 1; k <= spec.modes; ++k) {
      const double phase = k - 1 < spec.phases.size() ? spec.phases[k - 1] : 0.0;
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(k * pos) /
                           static_cast<double>(spec.period);
      v += spec.amplitude / static_cast<double>(k) * std::sin(angle + phase);
    }
    v += spec.trend_slope * static_cast<double>(t);
    if (spec.noise_sigma > 0.0) v += spec.noise_sigma * noise(rng);
    values[t] = v;
  }
  return TimeSeries::regular(spec.start, spec.cadence, std::move(values), spec.period);
}

std::vector<CorpusRow> run_corpus(std::span<const NamedSeries> corpus,
                                  std::span<const NamedDetector> detectors,
                                  const InjectionSpec& spec, const CorpusOptions& options) {
  if (corpus.empty() || detectors.empty()) throw EvalError("corpus and detectors must be non-empty");

  std::vector<LabeledSeries> injected(corpus.size());
  parallel_for(corpus.size(), options.jobs, [&](std::size_t i) {
    const TimeSeries& raw = corpus[i].series;
    std::size_t spacing = options.knot_spacing;
    if (spacing == 0) spacing = std::max<std::size_t>(2, infer_period(raw, raw.period()) / 8);
    const TimeSeries baseline = bspline_smooth(raw, spacing);
    InjectionSpec local = spec;
    local.seed = spec.seed + i;
    injected[i] = inject(raw, baseline, local);
  });

  std::vector<CorpusRow> rows(corpus.size() * detectors.size());
  parallel_for(rows.size(), options.jobs, [&](std::size_t cell) {
    const std::size_t si = cell / detectors.size();
    const std::size_t di = cell % detectors.size();
    const LabeledSeries& ls = injected[si];
    const AnomalyReport report = detect(ls.series, detectors[di].config);
    const auto found = report.indices();
    const auto truth = ls.anomaly_indices();
    rows[cell] = {corpus[si].name, detectors[di].name,
                  score(found, truth, ls.series.size(), options.beta, options.tolerance)};
  });

  auto totals = aggregate(rows);
  rows.insert(rows.end(), totals.begin(), totals.end());
  return rows;
}

std::vector<CorpusRow> aggregate(std::span<const CorpusRow> rows) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const CorpusRow*>> groups;
  for (const CorpusRow& r : rows) {
    if (r.series == kAggregateRowName) continue;
    auto [it, inserted] = groups.try_emplace(r.detector);
    if (inserted) order.push_back(r.detector);
    it->second.push_back(&r);
  }
  std::vector<CorpusRow> out;
  for (const std::string& name : order) {
    const auto& group = groups[name];
    CorpusRow agg{kAggregateRowName, name, {}};
    agg.metrics.beta = group.front()->metrics.beta;
    for (const CorpusRow* r : group) {
      agg.metrics.tp += r->metrics.tp;
      agg.metrics.fp += r->metrics.fp;
      agg.metrics.fn += r->metrics.fn;
      agg.metrics.precision += r->metrics.precision;
      agg.metrics.recall += r->metrics.recall;
      agg.metrics.f_beta += r->metrics.f_beta;
    }
    const auto count = static_cast<double>(group.size());
    agg.metrics.precision /= count;
    agg.metrics.recall /= count;
    agg.metrics.f_beta /= count;
    out.push_back(agg);
  }
  return out;
}

void write_results_csv(std::ostream& out, std::span<const CorpusRow> rows) {
  out << "series,detector,tp,fp,fn,precision,recall,f_beta\n";
  for (const CorpusRow& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", r.series, r.detector, r.metrics.tp,
                       r.metrics.fp, r.metrics.fn, format_double(r.metrics.precision),
                       format_double(r.metrics.recall), format_double(r.metrics.f_beta));
  }
}

}  // namespace anomaly
