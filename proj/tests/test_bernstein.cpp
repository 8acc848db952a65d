#include "doctest.h"

#include <cmath>
#include <random>

#include "qcr/bernstein.hpp"
#include "qcr/mmap.hpp"

using namespace qcr;

TEST_CASE("w_factor: pinned values and small-x limit") {
  CHECK(w_factor(0.0, WVariant::S) == doctest::Approx(1.0));
  CHECK(w_factor(0.0, WVariant::R) == doctest::Approx(0.75));
  CHECK(w_factor(0.0, WVariant::T) == doctest::Approx(1.0));
  CHECK(w_factor(3.0, WVariant::S) == doctest::Approx(0.5));
  CHECK(w_factor(1.0, WVariant::T) == doctest::Approx(2.0 * (2.0 * std::log(2.0) - 1.0)));
  CHECK(w_factor(1.0, WVariant::S) == doctest::Approx(0.75));
  CHECK_THROWS_AS(w_factor(-0.1, WVariant::S), std::invalid_argument);
}

TEST_CASE("w_factor: ordering T >= S >= R on a dense grid") {
  for (int i = 0; i <= 10000; ++i) {
    const double x = 0.01 * i;
    const double t = w_factor(x, WVariant::T);
    const double s = w_factor(x, WVariant::S);
    const double r = w_factor(x, WVariant::R);
    CHECK(t >= s - 1e-12);
    CHECK(s >= r - 1e-12);
  }
}

TEST_CASE("tail_bound: clipping, pinned value, N-scaling") {
  TailParams p{3600, 1.0, 2.0, 0.05};
  CHECK(tail_bound(p, 1e-9) == doctest::Approx(1.0));
  CHECK(tail_bound(p, 0.054049) == doctest::Approx(0.05).epsilon(1e-3));

  // the log of the bound is linear in N where unclipped
  TailParams p1{1000, 1, 2, 0.5}, p2{2000, 1, 2, 0.5};
  const double eps = 0.3;
  CHECK(std::log(tail_bound(p2, eps) / 8.0) ==
        doctest::Approx(2.0 * std::log(tail_bound(p1, eps) / 8.0)));
}

TEST_CASE("epsilon_for_confidence: pinned example and exact plugback") {
  const double eps = epsilon_for_confidence(3600, 0.05, 2.0);
  CHECK(eps == doctest::Approx(0.054049).epsilon(1e-4));

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> und(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const double N = std::pow(10.0, 1.0 + 5.0 * und(rng));
    const double delta = 1e-4 + 0.899 * und(rng);
    const double eta = 0.1 + 9.9 * und(rng);
    const double e = epsilon_for_confidence(N, delta, eta);
    TailParams p{N, 1.0, eta, delta};
    CHECK(std::abs(tail_bound(p, e) - delta) < 1e-10 * delta);
  }
}

TEST_CASE("epsilon_for_confidence: main-text bracket at eta=2") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> und(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double delta = 1e-3 + 0.9 * und(rng);
    const double eta = 2.0;
    const double L = std::log(8.0 / delta);
    const double N = (4.0 / 3.0) * eta * eta * L * (1.01 + 20.0 * und(rng));
    const double e = epsilon_for_confidence(N, delta, eta);
    CHECK(e * std::sqrt(N) > std::sqrt(2.0 * L));
    CHECK(e * std::sqrt(N) < std::sqrt(3.0 * L));
  }
}

TEST_CASE("sigma_eta: merged measurement and worked examples") {
  CHECK(sigma_eta({{2.2360679}, {1.0}}).eta == doctest::Approx(2.0));

  SigmaEta se = sigma_eta({{1, 1, 3}, {0.2, 0.2, 0.6}});
  CHECK(se.sigma == doctest::Approx(5.0));
  CHECK(se.eta == doctest::Approx(2.0));

  SigmaEta uni = sigma_eta({{1, 1, 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}});
  CHECK(uni.sigma == doctest::Approx(std::sqrt(33.0)));
  CHECK(uni.sigma > 5.0);

  CHECK_THROWS_AS(sigma_eta({{1, 1}, {1.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("optimal_sampling: proportional weights, global optimality") {
  std::vector<double> q = optimal_sampling({1, 1, 3});
  CHECK(q[0] == doctest::Approx(0.2));
  CHECK(q[1] == doctest::Approx(0.2));
  CHECK(q[2] == doctest::Approx(0.6));

  std::vector<double> eq = optimal_sampling({2, 2, 2, 2});
  for (double w : eq) CHECK(w == doctest::Approx(0.25));

  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> und(0.0, 1.0);
  for (int rep = 0; rep < 1000; ++rep) {
    const int m = 2 + static_cast<int>(und(rng) * 5);
    std::vector<double> gam(m), w(m);
    double gsum = 0, wsum = 0;
    for (int i = 0; i < m; ++i) {
      gam[i] = 0.01 + und(rng);
      w[i] = 0.01 + und(rng);
      gsum += gam[i];
      wsum += w[i];
    }
    for (int i = 0; i < m; ++i) w[i] /= wsum;
    SigmaEta opt = sigma_eta({gam, optimal_sampling(gam)});
    SigmaEta any = sigma_eta({gam, w});
    CHECK(opt.sigma <= any.sigma + 1e-12);
    CHECK(opt.sigma == doctest::Approx(gsum));
    CHECK(opt.eta == doctest::Approx(2.0));
  }

  CHECK_THROWS_AS(optimal_sampling({0, 0}), std::invalid_argument);
}

TEST_CASE("exact_variance_term: worked examples") {
  RealMatrix id2 = RealMatrix::Identity(2, 2);
  RealVector half(2);
  half << 0.5, 0.5;
  CHECK(exact_variance_term(id2, half) == doctest::Approx(0.5));

  // deterministic outcome: zero variance
  RealMatrix g(3, 4);
  g << 1, 2, 0, 1, 0, 1, 1, 2, 3, 0, 2, 1;
  RealVector e2 = RealVector::Zero(4);
  e2(2) = 1.0;
  CHECK(exact_variance_term(g, e2) == doctest::Approx(0.0));

  // pauli bases q=1, G = pinv, completely mixed state: S = S_max - 1/d
  MeasurementMap m = build_map(build_pauli_bases(1));
  RealVector p = probabilities(m, HermOp(0.5 * Matrix::Identity(2, 2)));
  const double s = exact_variance_term(m.pinv, p);
  CHECK(s == doctest::Approx(5.0 - 0.5));
  CHECK(s <= col_norm_max(m.pinv) * col_norm_max(m.pinv));
}

TEST_CASE("lambda_bound and eta consistency at m=1") {
  CHECK(lambda_bound({1, 2}) == doctest::Approx(4.0));
  CHECK(lambda_bound({std::sqrt(5.0)}) == doctest::Approx(2.0 * std::sqrt(5.0)));

  const double gamma = 3.7;
  SigmaEta se = sigma_eta({{gamma}, {1.0}});
  CHECK(se.eta == doctest::Approx(lambda_bound({gamma}) / se.sigma));
}

TEST_CASE("curvature exponent stays above -2/3 up to the matched deviation") {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> und(0.0, 1.0);
  for (int rep = 0; rep < 1000; ++rep) {
    const double v = std::pow(10.0, -3.0 + 6.0 * und(rng));
    const double L = std::pow(10.0, -3.0 + 6.0 * und(rng));
    const double t = und(rng) * (std::sqrt(v) + L / 3.0);
    if (t <= 0.0) continue;
    const double exponent = -(t * t / (2.0 * v)) * 3.0 / (3.0 + t * L / v);
    CHECK(exponent >= -2.0 / 3.0 - 1e-12);
  }
}

TEST_CASE("monte carlo: the tail bound is sound for qubit sic sampling") {
  Povm sic = build_qubit_sic();
  MeasurementMap m = build_map(sic);
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = Cplx(1, 0);
  RealVector p = probabilities(m, herm_trusted(rho));
  const double sigma = col_norm_max(m.pinv);

  const int N = 500, trials = 2000;
  std::mt19937_64 rng(35);
  std::uniform_real_distribution<double> und(0.0, 1.0);
  RealVector cdf(p.size());
  double acc = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p(i);
    cdf(i) = acc;
  }
  std::vector<double> devs(trials);
  for (int t = 0; t < trials; ++t) {
    RealVector counts = RealVector::Zero(p.size());
    for (int k = 0; k < N; ++k) {
      const double u = und(rng);
      Eigen::Index a = 0;
      while (a + 1 < cdf.size() && u > cdf(a)) ++a;
      counts(a) += 1.0;
    }
    HermOp rho_hat = estimate_state(m, counts / N);
    devs[t] = hs_norm(rho_hat.mat() - rho);
  }
  for (double eps : {0.05, 0.1, 0.2}) {
    int exceed = 0;
    for (double d : devs) {
      if (d >= eps * sigma) ++exceed;
    }
    const double empirical = static_cast<double>(exceed) / trials;
    TailParams params{static_cast<double>(N), sigma, 2.0, 0.0};
    CHECK(empirical <= tail_bound(params, eps));
  }
}
