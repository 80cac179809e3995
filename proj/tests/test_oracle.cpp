#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "l0forge/oracle.hpp"
#include "l0forge/solvers.hpp"
#include "l0forge/threshold.hpp"

#include "test_util.hpp"

using namespace l0forge;

TEST_CASE("enumeration on a 2-D separable instance") {
  Vector b(2);
  b << 3.0, 0.1;
  const QuadraticObjective quad(Matrix::Identity(2, 2), b, 1.0);
  const L0Problem prob(quad, 1.0, 1e-6);

  const auto candidates = enumerate_minimizers(prob);
  REQUIRE(candidates.size() == 4);

  // mask 0b00: the origin, H = (9 + 0.01)/2
  CHECK(candidates[0].point.isZero(0.0));
  CHECK(candidates[0].objective == Catch::Approx(4.505));
  CHECK(candidates[0].is_local);  // gradient condition is vacuous at 0

  // mask 0b01: x = (3, 0), H = 0.005 + 1
  CHECK(candidates[1].point[0] == Catch::Approx(3.0));
  CHECK(candidates[1].point[1] == 0.0);
  CHECK(candidates[1].objective == Catch::Approx(1.005));
  CHECK(candidates[1].is_local);

  // mask 0b10: x = (0, 0.1), H = 4.5 + 1
  CHECK(candidates[2].objective == Catch::Approx(5.5));
  CHECK(candidates[2].is_local);

  // mask 0b11: x = b, H = 2
  CHECK(candidates[3].objective == Catch::Approx(2.0));
  CHECK(candidates[3].is_local);

  CHECK(global_minimizer_index(candidates) == 1);
  Vector probe(2);
  probe << 3.0, 0.0;
  CHECK(distance_to_local_minimizer(candidates, probe) == 0.0);
}

TEST_CASE("only the origin is local when b = 0") {
  const QuadraticObjective quad(Matrix::Identity(3, 3), Vector::Zero(3), 1.0);
  const L0Problem prob(quad, 0.5, 1e-6);
  const auto candidates = enumerate_minimizers(prob);
  for (const auto& cand : candidates) {
    // the restricted solve returns 0 everywhere, so nonempty masks cannot
    // match their own pattern
    CHECK(cand.is_local == (cand.support_mask == 0));
  }
  CHECK(global_minimizer_index(candidates) == 0);
  CHECK(candidates[0].objective == 0.0);
}

TEST_CASE("rank-deficient restricted block takes the minimum-norm solution") {
  Matrix A(1, 2);
  A << 1.0, 1.0;
  Vector b(1);
  b << 2.0;
  const QuadraticObjective quad(A, b, 2.0);
  const L0Problem prob(quad, 0.1, 1e-6);

  const auto candidates = enumerate_minimizers(prob);
  const auto& full = candidates[3];  // mask 0b11, singular 1x2 block
  CHECK(full.degenerate);
  CHECK(full.point[0] == Catch::Approx(1.0));
  CHECK(full.point[1] == Catch::Approx(1.0));
}

TEST_CASE("enumeration requires a quadratic and respects the size cap") {
  const QuadraticObjective quad(testutil::gaussian_matrix(4, 15, 3),
                                testutil::gaussian_vector(4, 4));
  const L0Problem prob(quad, 0.5, 1e-6);
  CHECK_THROWS_AS(enumerate_minimizers(prob), std::invalid_argument);
  CHECK_THROWS_AS(prox_bruteforce(prob, Vector::Zero(15)),
                  std::invalid_argument);
}

TEST_CASE("prox_objective hand value") {
  // A = I, b = 0, y = (2, 0): c = y - y/L = 0 at L = 1... use explicit L = 2.
  const QuadraticObjective quad(Matrix::Identity(2, 2), Vector::Zero(2), 2.0);
  const L0Problem prob(quad, 0.5, 1.0);
  Vector y(2), x(2);
  y << 2.0, 0.0;
  x << 1.0, 0.0;
  // c = y - grad/L = (1, 0); value = 0.5*1 + (2/2)*0 + (1/2)*1 = 1
  CHECK(prox_objective(prob, y, x) == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("piht_step matches the brute-force prox on random instances") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> lam(1e-3, 1.0);
  for (int t = 0; t < 100; ++t) {
    const Matrix A = testutil::gaussian_matrix(5, 8, 1000 + t);
    const Vector b = testutil::gaussian_vector(5, 2000 + t);
    const QuadraticObjective quad(A, b);
    const L0Problem prob(quad, lam(rng), 1e-6);
    const Vector y = testutil::gaussian_vector(8, 3000 + t);

    const Vector fast = piht_step(prob, y);
    const Vector slow = prox_bruteforce(prob, y);
    CHECK(prox_objective(prob, y, fast) <=
          prox_objective(prob, y, slow) + 1e-10);
    CHECK((fast - slow).norm() < 1e-10);
  }
}

TEST_CASE("prox of the zero problem at zero is zero") {
  const QuadraticObjective quad(Matrix::Identity(3, 3), Vector::Zero(3), 1.0);
  const L0Problem prob(quad, 0.5, 1e-6);
  CHECK(prox_bruteforce(prob, Vector::Zero(3)).isZero(0.0));
}

TEST_CASE("the global minimizer passes the local-minimum certificate") {
  for (int t = 0; t < 10; ++t) {
    const Matrix A = testutil::gaussian_matrix(6, 8, 4000 + t);
    const Vector b = testutil::gaussian_vector(6, 5000 + t);
    const QuadraticObjective quad(A, b);
    const L0Problem prob(quad, 0.1 * quad.Atb().lpNorm<Eigen::Infinity>(),
                         1e-6);
    const auto candidates = enumerate_minimizers(prob);
    const auto& global = candidates[global_minimizer_index(candidates)];
    const CertificateReport cert =
        local_min_certificate(prob, global.point, 1e-8);
    INFO("seed offset " << t);
    CHECK(cert.passed);
  }
}

TEST_CASE("solver outputs land on enumerated local minimizers") {
  SolveOptions opts;
  opts.tol = 1e-10;
  opts.max_iters = 20000;
  for (int t = 0; t < 10; ++t) {
    const Matrix A = testutil::gaussian_matrix(8, 10, 6000 + t);
    const Vector b = testutil::gaussian_vector(8, 7000 + t);
    const QuadraticObjective quad(A, b);
    const L0Problem prob(quad, 0.05 * quad.Atb().lpNorm<Eigen::Infinity>(),
                         1e-6);
    const auto candidates = enumerate_minimizers(prob);
    auto [x, rec] = solve_vmepiht(prob, quad.Atb(), opts);
    INFO("seed offset " << t);
    CHECK(rec.stop_reason == "converged");
    CHECK(distance_to_local_minimizer(candidates, x) < 1e-6);
  }
}
