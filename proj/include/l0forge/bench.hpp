#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "l0forge/lipschitz.hpp"
#include "l0forge/objective.hpp"
#include "l0forge/solvers.hpp"
#include "l0forge/support.hpp"
#include "l0forge/types.hpp"

namespace l0forge {

enum class Ensemble { Gaussian, Bernoulli };

inline const char* ensemble_name(Ensemble e) {
  return e == Ensemble::Gaussian ? "gaussian" : "bernoulli";
}

inline Ensemble parse_ensemble(const std::string& name) {
  if (name == "gaussian") return Ensemble::Gaussian;
  if (name == "bernoulli") return Ensemble::Bernoulli;
  throw std::invalid_argument("unknown ensemble '" + name +
                              "'; valid: gaussian, bernoulli");
}

/// Sensing-instance recipe: unit-column random matrix, sparse signal, additive
/// Gaussian noise. m and sparsity fall back to n/4 and m/32 when left at 0.
struct CsInstanceSpec {
  Index n = 0;
  Index m = 0;
  Index sparsity = 0;
  Ensemble ensemble = Ensemble::Gaussian;
  double noise_variance = 0.02;
  bool noise_is_std = false;  // read "0.02" as a standard deviation instead
  std::uint64_t seed = 0;

  Index rows() const { return m > 0 ? m : n / 4; }
  Index nonzeros() const { return sparsity > 0 ? sparsity : rows() / 32; }

  void validate() const {
    if (n < 1) throw std::invalid_argument("CsInstanceSpec: n must be >= 1");
    if (rows() < 1 || rows() > n)
      throw std::invalid_argument("CsInstanceSpec: need 1 <= m <= n");
    if (nonzeros() < 1 || nonzeros() > rows())
      throw std::invalid_argument("CsInstanceSpec: need 1 <= sparsity <= m");
    if (noise_variance < 0.0)
      throw std::invalid_argument("CsInstanceSpec: noise_variance must be >= 0");
  }
};

struct CsInstance {
  Matrix A;
  Vector b;
  Vector x_true;
};

/// Draws the sensing matrix (i.i.d. standard normal or +-1), normalizes each
/// column to unit l2 norm, places sparsity standard-normal spikes at random
/// positions, and forms b = A x_true + noise. Fully determined by the seed.
inline CsInstance generate_instance(const CsInstanceSpec& spec) {
  spec.validate();
  const Index m = spec.rows();
  const Index n = spec.n;
  const Index s = spec.nonzeros();

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  CsInstance inst;
  inst.A.resize(m, n);
  if (spec.ensemble == Ensemble::Gaussian) {
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < m; ++i) inst.A(i, j) = normal(rng);
  } else {
    std::bernoulli_distribution coin(0.5);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < m; ++i) inst.A(i, j) = coin(rng) ? 1.0 : -1.0;
  }
  for (Index j = 0; j < n; ++j) {
    const double norm = inst.A.col(j).norm();
    if (norm > 0.0) inst.A.col(j) /= norm;
  }

  std::vector<Index> positions(n);
  for (Index i = 0; i < n; ++i) positions[i] = i;
  std::shuffle(positions.begin(), positions.end(), rng);
  inst.x_true = Vector::Zero(n);
  for (Index i = 0; i < s; ++i) inst.x_true[positions[i]] = normal(rng);

  inst.b = inst.A * inst.x_true;
  const double sigma = spec.noise_is_std ? spec.noise_variance
                                         : std::sqrt(spec.noise_variance);
  if (sigma > 0.0)
    for (Index i = 0; i < m; ++i) inst.b[i] += sigma * normal(rng);
  return inst;
}

/// Geometric regularization path anchored at ||A^T b||_inf^2, swept down to
/// anchor * min_factor over count points (log-linear spacing).
struct LambdaPath {
  double anchor = 0.0;
  std::vector<double> values;
};

inline LambdaPath lambda_path(const Matrix& A, const Vector& b, int count = 200,
                              double min_factor = 1e-10) {
  if (count < 2) throw std::invalid_argument("lambda_path: count must be >= 2");
  LambdaPath path;
  const Vector Atb = A.transpose() * b;
  const double peak = Atb.lpNorm<Eigen::Infinity>();
  if (peak <= 0.0) throw std::invalid_argument("lambda_path: A^T b is zero");
  path.anchor = peak * peak;
  const double t_last = std::log(min_factor);
  path.values.resize(count);
  for (int j = 0; j < count; ++j)
    path.values[j] = path.anchor * std::exp(t_last * j / (count - 1));
  return path;
}

/// One (method, lambda, seed) sweep entry.
struct BenchCell {
  std::string method;
  Index n = 0;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  long iterations = 0;
  double time_s = 0.0;
  double rel_err = 0.0;
  bool support_match = false;
  bool selected = false;
  std::string stop_reason;
  Index nnz = 0;
};

/// Path lambda minimizing the relative error; ties break toward larger lambda.
/// Entries must share one method and seed and be ordered from large to small
/// lambda.
inline double select_lambda(const std::vector<BenchCell>& entries) {
  if (entries.empty()) throw std::invalid_argument("select_lambda: empty input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i].rel_err < entries[best].rel_err) best = i;
  return entries[best].lambda;
}

/// Ground-truth-free alternative: smallest smooth objective among runs at the
/// target sparsity (closest sparsity as fallback).
inline double select_lambda_by_sparsity(const std::vector<BenchCell>& entries,
                                        const std::vector<double>& smooth_values,
                                        Index target_sparsity) {
  if (entries.empty() || entries.size() != smooth_values.size())
    throw std::invalid_argument("select_lambda_by_sparsity: bad input");
  std::size_t best = 0;
  auto key = [&](std::size_t i) {
    return std::make_pair(std::abs(entries[i].nnz - target_sparsity),
                          smooth_values[i]);
  };
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (key(i) < key(best)) best = i;
  return entries[best].lambda;
}

struct BenchOptions {
  std::vector<Method> methods;
  SolveOptions solve;
  double mu = 1e-6;
  int repeats = 20;
  int path_count = 200;
  double path_min_factor = 1e-10;
  bool ground_truth_free = false;
  int threads = 0;  // 0: L0FORGE_THREADS or hardware concurrency
};

struct MethodSummary {
  std::string method;
  double median_iterations = 0.0;
  double mean_iterations = 0.0;
  double median_time_s = 0.0;
  double mean_time_s = 0.0;
  double median_rel_err = 0.0;
  double mean_rel_err = 0.0;
  double support_match_rate = 0.0;
};

struct BenchReport {
  std::vector<BenchCell> cells;  // all sweep entries, deterministic order
  std::vector<MethodSummary> summaries;
};

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

inline int bench_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("L0FORGE_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace detail

/// Full head-to-head sweep: for each seed and method, warm-start down the
/// lambda path, mark the selected lambda, and aggregate per-method medians
/// and means over the selected runs. Seeds run on a worker pool; the output
/// order is deterministic.
inline BenchReport run_benchmark(const std::vector<CsInstanceSpec>& specs,
                                 const BenchOptions& opts) {
  if (opts.methods.empty())
    throw std::invalid_argument("run_benchmark: empty methods list");
  if (opts.repeats < 1)
    throw std::invalid_argument("run_benchmark: repeats must be >= 1");
  for (const auto& spec : specs) spec.validate();

  struct Job {
    CsInstanceSpec spec;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& spec : specs)
    for (int r = 0; r < opts.repeats; ++r)
      jobs.push_back({spec, spec.seed + static_cast<std::uint64_t>(r)});

  std::vector<std::vector<BenchCell>> job_cells(jobs.size());

  auto run_job = [&](std::size_t job_idx) {
    const Job& job = jobs[job_idx];
    CsInstanceSpec spec = job.spec;
    spec.seed = job.seed;
    const CsInstance inst = generate_instance(spec);
    const double lip = estimate_lipschitz(inst.A);
    const QuadraticObjective quad(inst.A, inst.b, lip);
    const LambdaPath path =
        lambda_path(inst.A, inst.b, opts.path_count, opts.path_min_factor);
    const Vector x0_cold = quad.Atb();
    const double true_norm = inst.x_true.norm();
    const SupportSet true_support = support_of(inst.x_true, 0.0);

    std::vector<BenchCell>& cells = job_cells[job_idx];
    for (Method method : opts.methods) {
      std::vector<BenchCell> sweep;
      std::vector<double> smooth_values;
      Vector warm = x0_cold;
      for (double lambda : path.values) {
        BenchCell cell;
        cell.method = method_name(method);
        cell.n = spec.n;
        cell.seed = job.seed;
        cell.lambda = lambda;
        try {
          const L0Problem prob(quad, lambda, opts.mu);
          auto [x, rec] = solve(prob, warm, method, opts.solve);
          warm = x;
          cell.iterations = rec.iterations;
          cell.time_s = rec.wall_time_s;
          cell.rel_err = true_norm > 0.0 ? (x - inst.x_true).norm() / true_norm
                                         : (x - inst.x_true).norm();
          cell.support_match = support_of(x, 0.0) == true_support;
          cell.stop_reason = rec.stop_reason;
          cell.nnz = x.size() - support_of(x, 0.0).zero_indices().size();
          smooth_values.push_back(quad.value(x));
        } catch (const std::exception& e) {
          cell.stop_reason = std::string("error: ") + e.what();
          cell.rel_err = std::numeric_limits<double>::infinity();
          smooth_values.push_back(std::numeric_limits<double>::infinity());
        }
        sweep.push_back(cell);
      }
      const double chosen =
          opts.ground_truth_free
              ? select_lambda_by_sparsity(sweep, smooth_values, spec.nonzeros())
              : select_lambda(sweep);
      for (auto& cell : sweep) cell.selected = (cell.lambda == chosen);
      cells.insert(cells.end(), sweep.begin(), sweep.end());
    }
  };

  const int threads =
      std::min<int>(detail::bench_thread_count(opts.threads),
                    static_cast<int>(jobs.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < jobs.size();
             i = next.fetch_add(1))
          run_job(i);
      });
    for (auto& th : pool) th.join();
  }

  BenchReport report;
  for (auto& cells : job_cells)
    report.cells.insert(report.cells.end(), cells.begin(), cells.end());

  for (Method method : opts.methods) {
    MethodSummary summary;
    summary.method = method_name(method);
    std::vector<double> iters, times, errs;
    double matches = 0.0, total = 0.0;
    for (const auto& cell : report.cells) {
      if (!cell.selected || cell.method != summary.method) continue;
      iters.push_back(static_cast<double>(cell.iterations));
      times.push_back(cell.time_s);
      errs.push_back(cell.rel_err);
      matches += cell.support_match ? 1.0 : 0.0;
      total += 1.0;
    }
    summary.median_iterations = detail::median(iters);
    summary.mean_iterations = detail::mean(iters);
    summary.median_time_s = detail::median(times);
    summary.mean_time_s = detail::mean(times);
    summary.median_rel_err = detail::median(errs);
    summary.mean_rel_err = detail::mean(errs);
    summary.support_match_rate = total > 0.0 ? matches / total : 0.0;
    report.summaries.push_back(summary);
  }
  return report;
}

}  // namespace l0forge
