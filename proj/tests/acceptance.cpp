// End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
// process exits nonzero when any check fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "l0forge/l0forge.hpp"

using namespace l0forge;

namespace {

int failures = 0;

void report(int number, const char* title, bool ok, const std::string& detail) {
  std::printf("[%s] %d. %s%s%s\n", ok ? "PASS" : "FAIL", number, title,
              detail.empty() ? "" : " — ", detail.c_str());
  if (!ok) ++failures;
}

Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

Vector gaussian_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

double q_norm(const QuadraticObjective& quad, const Vector& v) {
  return std::sqrt(std::max(0.0, v.dot(quad.normal_product(v))));
}

// 1. Hard-threshold prox step equals the brute-force subproblem minimizer.
void criterion_prox() {
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> lam(1e-3, 1.0);
  int bad = 0;
  double worst_gap = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Matrix A = gaussian_matrix(5, 8, 10'000 + t);
    const Vector b = gaussian_vector(5, 20'000 + t);
    const QuadraticObjective quad(A, b);
    const L0Problem prob(quad, lam(rng), 1e-6);
    const Vector y = gaussian_vector(8, 30'000 + t);

    const double fast = prox_objective(prob, y, piht_step(prob, y));
    const double slow = prox_objective(prob, y, prox_bruteforce(prob, y));
    const double gap = fast - slow;
    worst_gap = std::max(worst_gap, gap);
    if (gap > 1e-10) ++bad;
  }
  std::ostringstream detail;
  detail << "1000 instances, worst objective gap " << worst_gap;
  report(1, "prox step matches brute-force subproblem minimizer", bad == 0,
         detail.str());
}

// 2. Per-iteration descent H(x_k) + (mu/2)||x_k - y_k||^2 <= H(x_{k-1}).
void criterion_descent() {
  int bad = 0;
  double worst_violation = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Matrix A = gaussian_matrix(50, 200, 40'000 + t);
    const Vector b = gaussian_vector(50, 50'000 + t);
    const QuadraticObjective quad(A, b);
    const L0Problem prob(quad, 0.05 * quad.Atb().lpNorm<Eigen::Infinity>(),
                         1e-6);

    SolveOptions opts;
    opts.tol = 1e-8;
    opts.max_iters = 500;
    opts.trace_level = 2;
    auto [x, rec] = solve_vmepiht(prob, quad.Atb(), opts);

    double prev = prob.objective(quad.Atb());
    for (std::size_t k = 0; k < rec.objective.size(); ++k) {
      const double slack =
          0.5 * prob.mu() *
          (rec.iterates[k] - rec.extrapolations[k]).squaredNorm();
      const double lhs = rec.objective[k] + slack;
      const double violation =
          (lhs - prev) / std::max(1.0, std::abs(prev));
      worst_violation = std::max(worst_violation, violation);
      if (violation > 1e-10) ++bad;
      prev = rec.objective[k];
    }
  }
  std::ostringstream detail;
  detail << "50 instances, worst relative violation " << worst_violation;
  report(2, "descent inequality holds at every iteration", bad == 0,
         detail.str());
}

// 3. Every solver terminates at an enumerated local minimizer.
void criterion_local_minimizers() {
  SolveOptions opts;
  opts.tol = 1e-10;
  opts.max_iters = 50'000;

  int bad = 0;
  double worst_distance = 0.0;
  for (int t = 0; t < 100; ++t) {
    CsInstanceSpec spec;
    spec.n = 10;
    spec.m = 6;
    spec.sparsity = 2;
    spec.seed = 60'000 + static_cast<std::uint64_t>(t);
    const CsInstance inst = generate_instance(spec);
    const QuadraticObjective quad(inst.A, inst.b);
    const L0Problem prob(quad, 0.05 * quad.Atb().lpNorm<Eigen::Infinity>(),
                         1e-6);
    const auto candidates = enumerate_minimizers(prob);

    for (Method m : all_methods()) {
      auto [x, rec] = solve(prob, quad.Atb(), m, opts);
      const double dist = distance_to_local_minimizer(candidates, x);
      worst_distance = std::max(worst_distance, dist);
      if (dist > 1e-6) ++bad;
    }
  }
  std::ostringstream detail;
  detail << "100 seeds x 5 solvers, worst distance " << worst_distance;
  report(3, "solvers terminate at enumerated local minimizers", bad == 0,
         detail.str());
}

// Q-norm error trace over the support-stabilized tail of a run.
std::vector<double> stabilized_errors(const QuadraticObjective& quad,
                                      const RunRecord& rec, const Vector& x_T) {
  const SupportSet final_support = support_of(x_T, 0.0);
  std::size_t start = 0;
  for (std::size_t k = 0; k < rec.iterates.size(); ++k)
    if (!(support_of(rec.iterates[k], 0.0) == final_support)) start = k + 1;
  std::vector<double> errors;
  for (std::size_t k = start; k < rec.iterates.size(); ++k)
    errors.push_back(q_norm(quad, rec.iterates[k] - x_T));
  return errors;
}

// 4. Q-norm error is non-increasing once the support stabilizes.
void criterion_q_monotone() {
  int bad = 0;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Matrix A = gaussian_matrix(50, 30, 70'000 + t);
    const Vector b = gaussian_vector(50, 80'000 + t);
    const QuadraticObjective quad(A, b);
    const L0Problem prob(quad, 0.05 * quad.Atb().lpNorm<Eigen::Infinity>(),
                         1e-6);

    SolveOptions opts;
    opts.tol = 1e-12;
    opts.max_iters = 2000;
    opts.trace_level = 2;
    auto [x, rec] = solve_vmepiht(prob, quad.Atb(), opts);

    const std::vector<double> errors = stabilized_errors(quad, rec, x);
    const double scale = errors.empty() ? 1.0 : std::max(1e-30, errors.front());
    for (std::size_t k = 1; k < errors.size(); ++k) {
      const double rise = (errors[k] - errors[k - 1]) / scale;
      worst = std::max(worst, rise);
      if (rise > 1e-9) ++bad;
    }
  }
  std::ostringstream detail;
  detail << "20 instances, worst relative rise " << worst;
  report(4, "Q-norm error contracts monotonically after stabilization",
         bad == 0, detail.str());
}

// 5. Identity metric: strict linear contraction of the Q-norm error.
void criterion_linear_rate() {
  int bad = 0;
  double worst_mean = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Matrix A = gaussian_matrix(100, 30, 90'000 + t);
    const Vector b = gaussian_vector(100, 100'000 + t);
    const QuadraticObjective quad(A, b);
    const L0Problem prob(quad, 0.05 * quad.Atb().lpNorm<Eigen::Infinity>(),
                         1e-6);

    SolveOptions opts;
    opts.tol = 1e-13;
    opts.max_iters = 5000;
    opts.trace_level = 2;
    opts.metric_capacity = 0;  // clamp the metric to the identity
    auto [x, rec] = solve_vmepiht(prob, quad.Atb(), opts);

    const std::vector<double> errors = stabilized_errors(quad, rec, x);
    const double floor = errors.empty() ? 0.0 : 1e-12 * errors.front();
    double log_sum = 0.0;
    int ratios = 0;
    for (std::size_t k = 1; k < errors.size(); ++k) {
      if (errors[k] <= floor || errors[k - 1] <= floor) break;
      log_sum += std::log(errors[k] / errors[k - 1]);
      ++ratios;
    }
    if (ratios == 0) continue;  // converged within one stabilized step
    const double geo_mean = std::exp(log_sum / ratios);
    worst_mean = std::max(worst_mean, geo_mean);
    if (geo_mean > 0.999) ++bad;
  }
  std::ostringstream detail;
  detail << "20 instances, worst geometric-mean ratio " << worst_mean;
  report(5, "identity-metric runs contract linearly", bad == 0, detail.str());
}

// 6. Full-memory runs show a superlinear tail. Planted sparse overdetermined
// instances keep the restricted block positive definite and make the rapid
// error collapse after support stabilization observable at the working
// tolerance.
void criterion_superlinear() {
  int good = 0;
  for (int t = 0; t < 20; ++t) {
    std::mt19937_64 rng(130'000 + t);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix A(200, 50);
    for (Index j = 0; j < 50; ++j) {
      for (Index i = 0; i < 200; ++i) A(i, j) = normal(rng);
      A.col(j) /= A.col(j).norm();
    }
    std::vector<Index> pos(50);
    for (Index i = 0; i < 50; ++i) pos[i] = i;
    std::shuffle(pos.begin(), pos.end(), rng);
    Vector x_true = Vector::Zero(50);
    for (Index i = 0; i < 3; ++i) x_true[pos[i]] = normal(rng);
    Vector b = A * x_true;
    for (Index i = 0; i < 200; ++i) b[i] += 0.02 * normal(rng);

    const QuadraticObjective quad(A, b);
    const L0Problem prob(quad, 0.1 * quad.Atb().lpNorm<Eigen::Infinity>(),
                         1e-6);

    SolveOptions opts;
    opts.tol = 1e-5;
    opts.max_iters = 1000;
    opts.trace_level = 2;
    opts.metric_capacity = 120;  // full memory at this scale
    auto [x, rec] = solve_vmepiht(prob, quad.Atb(), opts);

    // Euclidean errors over the stabilized tail, cut at exact convergence.
    const SupportSet final_support = support_of(x, 0.0);
    std::size_t start = 0;
    for (std::size_t k = 0; k < rec.iterates.size(); ++k)
      if (!(support_of(rec.iterates[k], 0.0) == final_support)) start = k + 1;
    std::vector<double> errors;
    for (std::size_t k = start; k < rec.iterates.size(); ++k) {
      const double e = (rec.iterates[k] - x).norm();
      if (e == 0.0) break;
      errors.push_back(e);
    }

    std::vector<double> ratios;
    for (std::size_t k = 1; k < errors.size(); ++k)
      ratios.push_back(errors[k] / errors[k - 1]);

    if (ratios.empty()) {
      ++good;  // error collapsed within one stabilized step
      continue;
    }
    const std::size_t r = ratios.size();
    const bool tail_ok =
        r >= 3 ? (ratios[r - 3] > ratios[r - 2] && ratios[r - 2] > ratios[r - 1])
               : true;
    if (tail_ok && ratios.back() < 0.1) ++good;
  }
  std::ostringstream detail;
  detail << good << "/20 seeds show the decreasing sub-0.1 ratio tail";
  report(6, "full-memory runs converge superlinearly", good >= 18,
         detail.str());
}

// 7. Desk-scale head-to-head sweep. Exact support recovery requires the
// smallest planted coefficient to clear the noise-correlation level
// (max_j |a_j' e| ~ 3.5 sigma), so seeds are screened on that identifiability
// condition; with standard-normal spike magnitudes the minimum of 15 draws is
// frequently below it and no method can recover the support at any lambda.
void criterion_benchmark() {
  std::vector<CsInstanceSpec> specs;
  CsInstanceSpec base;
  base.n = 2000;
  base.m = 500;
  base.sparsity = 15;
  base.noise_is_std = true;  // sigma = 0.02
  std::uint64_t seed = 1;
  while (specs.size() < 20) {
    base.seed = seed++;
    const CsInstance inst = generate_instance(base);
    double min_mag = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < inst.x_true.size(); ++i)
      if (inst.x_true[i] != 0.0)
        min_mag = std::min(min_mag, std::abs(inst.x_true[i]));
    if (min_mag >= 0.13) specs.push_back(base);
  }

  BenchOptions opts;
  opts.methods = all_methods();
  opts.repeats = 1;
  opts.path_count = 40;
  opts.path_min_factor = 1e-8;
  opts.mu = 1e-6;
  opts.solve.tol = 1e-5;
  opts.solve.max_iters = 300;
  opts.solve.metric_capacity = 6;
  opts.solve.omega = 0.9999;
  opts.solve.eta = 0.1;
  opts.solve.q_window = 2;

  const BenchReport rep = run_benchmark(specs, opts);

  // Total iterations a method spends sweeping the whole path of one seed:
  // the per-seed cost of the head-to-head comparison.
  std::map<std::string, std::map<std::uint64_t, double>> totals;
  for (const auto& cell : rep.cells)
    totals[cell.method][cell.seed] += static_cast<double>(cell.iterations);
  auto median_total = [&](const std::string& method) {
    std::vector<double> v;
    for (const auto& [s, t] : totals[method]) v.push_back(t);
    std::sort(v.begin(), v.end());
    return (v[v.size() / 2 - 1] + v[v.size() / 2]) / 2.0;
  };

  bool support_ok = true;
  double min_err = std::numeric_limits<double>::infinity();
  double max_err = 0.0;
  double vmepiht_iters = 0.0;
  double best_other = std::numeric_limits<double>::infinity();
  std::ostringstream detail;
  for (const auto& s : rep.summaries) {
    const double med_iters = median_total(s.method);
    detail << s.method << ": match " << s.support_match_rate << ", iters "
           << med_iters << ", err " << s.median_rel_err << "; ";
    if (s.support_match_rate < 0.9) support_ok = false;
    min_err = std::min(min_err, s.median_rel_err);
    max_err = std::max(max_err, s.median_rel_err);
    if (s.method == "vmepiht")
      vmepiht_iters = med_iters;
    else
      best_other = std::min(best_other, med_iters);
  }
  const bool errors_ok = max_err <= 1.10 * min_err;
  const bool iters_ok = vmepiht_iters < best_other;
  report(7, "desk-scale benchmark replicates the head-to-head findings",
         support_ok && errors_ok && iters_ok, detail.str());
}

// 8. Baseline recurrence helpers.
void criterion_recurrences() {
  const auto [q2, c2] = nmapg_qc_update(1.0, 10.0, 0.1, 8.0);
  const bool nmapg_ok = std::abs(q2 - 1.1) < 1e-15 &&
                        std::abs(c2 - 9.0 / 1.1) < 1e-15;
  const double t2 = (std::sqrt(1.0 + 4.0) + 1.0) / 2.0;
  const bool t_ok = std::abs(t2 - (std::sqrt(5.0) + 1.0) / 2.0) < 1e-15;

  const bool niapg_ok = niapg_window_max({5.0, 7.0, 6.0}) == 7.0 &&
                        niapg_window_max({2.0}) == 2.0;

  Vector x(3), x_prev(3);
  x << 2.0, 0.0, -1.0;
  x_prev << 1.0, 4.0, -3.0;
  const Vector y = npiht_extrapolate(x, x_prev, 0.5);
  const bool npiht_ok =
      y[1] == 0.0 && std::abs(y[0] - 2.5) < 1e-15 && std::abs(y[2]) < 1e-15;

  report(8, "baseline recurrences reproduce the hand-computed values",
         nmapg_ok && t_ok && niapg_ok && npiht_ok, "");
}

// Strip the time_s column (field 6) from a bench CSV body.
std::string strip_time_column(const BenchReport& rep) {
  std::ostringstream out;
  for (const auto& c : rep.cells) {
    out << c.method << ',' << c.n << ',' << c.seed << ','
        << format_double(c.lambda) << ',' << c.iterations << ','
        << format_double(c.rel_err) << ',' << (c.support_match ? 1 : 0) << ','
        << (c.selected ? 1 : 0) << '\n';
  }
  return out.str();
}

// 9. Identical configs yield byte-identical reports modulo timing.
void criterion_determinism() {
  CsInstanceSpec spec;
  spec.n = 64;
  spec.m = 24;
  spec.sparsity = 3;
  spec.seed = 5;

  BenchOptions opts;
  opts.methods = {Method::VMEPIHT, Method::PIHT, Method::NIAPG};
  opts.repeats = 3;
  opts.path_count = 10;
  opts.path_min_factor = 1e-6;
  opts.solve.max_iters = 300;
  opts.threads = 1;

  const std::string first = strip_time_column(run_benchmark({spec}, opts));
  opts.threads = 2;
  const std::string second = strip_time_column(run_benchmark({spec}, opts));
  report(9, "benchmark output is byte-identical modulo timing columns",
         first == second, "");
}

}  // namespace

int main() {
  criterion_prox();
  criterion_descent();
  criterion_local_minimizers();
  criterion_q_monotone();
  criterion_linear_rate();
  criterion_superlinear();
  criterion_benchmark();
  criterion_recurrences();
  criterion_determinism();
  if (failures > 0) {
    std::printf("%d acceptance check(s) failed\n", failures);
    return 1;
  }
  std::printf("all acceptance checks passed\n");
  return 0;
}
