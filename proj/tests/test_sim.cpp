#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "qcr/sim.hpp"

using namespace qcr;

TEST_CASE("rng: uniform range, normal moments, seed mixing") {
  Rng rng(42);
  double mean = 0.0, var = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double g = rng.normal();
    mean += g;
    var += g * g;
  }
  mean /= n;
  var = var / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));

  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(mix_seed(7, i));
  CHECK(seeds.size() == 1000);
  CHECK(mix_seed(7, 3) == mix_seed(7, 3));
  CHECK(mix_seed(7, 3) != mix_seed(8, 3));
}

TEST_CASE("state families: construction, normalization, determinism") {
  for (int q : {1, 2, 3}) {
    const int d = 1 << q;
    for (StateSpec::Base base :
         {StateSpec::Base::ghz, StateSpec::Base::w, StateSpec::Base::basis_zero,
          StateSpec::Base::basis_one, StateSpec::Base::maximally_mixed, StateSpec::Base::haar}) {
      StateSpec spec;
      spec.base = base;
      spec.t = 0.6;
      spec.haar_seed = 11;
      const Matrix rho = density(spec, q);
      CHECK(rho.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(min_eigenvalue(rho) > -1e-12);
      CHECK((rho - rho.adjoint()).norm() < 1e-12);
    }
  }

  // ghz_2 with t=1 is the Bell state
  StateSpec ghz{StateSpec::Base::ghz, 1.0, 0};
  const Matrix bell = density(ghz, 2);
  CHECK(bell(0, 0).real() == doctest::Approx(0.5));
  CHECK(bell(0, 3).real() == doctest::Approx(0.5));
  CHECK(bell(1, 1).real() == doctest::Approx(0.0));

  // w_3 diagonal support on single-excitation states
  StateSpec w{StateSpec::Base::w, 1.0, 0};
  const Matrix w3 = density(w, 3);
  CHECK(w3(1, 1).real() == doctest::Approx(1.0 / 3));
  CHECK(w3(2, 4).real() == doctest::Approx(1.0 / 3));
  CHECK(w3(0, 0).real() == doctest::Approx(0.0));

  // t=0 is the maximally mixed state regardless of the base
  StateSpec depol{StateSpec::Base::basis_one, 0.0, 0};
  CHECK((density(depol, 2) - Matrix::Identity(4, 4) / 4).norm() < 1e-14);

  StateSpec haar{StateSpec::Base::haar, 1.0, 5};
  CHECK((density(haar, 2) - density(haar, 2)).norm() == 0.0);
  StateSpec haar2 = haar;
  haar2.haar_seed = 6;
  CHECK((density(haar, 2) - density(haar2, 2)).norm() > 1e-3);

  StateSpec bad{StateSpec::Base::ghz, 1.5, 0};
  CHECK_THROWS_AS(density(bad, 2), std::invalid_argument);

  CHECK(parse_state_base("ghz") == StateSpec::Base::ghz);
  CHECK(parse_state_base(to_string(StateSpec::Base::maximally_mixed)) ==
        StateSpec::Base::maximally_mixed);
  CHECK_THROWS_AS(parse_state_base("bell"), std::invalid_argument);
}

TEST_CASE("named schemes: outcome counts and unknown-name rejection") {
  CHECK(build_named_scheme("pauli-bases", 2).effects.size() == 36);
  CHECK(build_named_scheme("pauli-observables", 2).effects.size() == 30);
  CHECK(build_named_scheme("sic", 1).effects.size() == 4);
  CHECK(build_named_scheme("sic", 2).effects.size() == 16);
  CHECK_THROWS_AS(build_named_scheme("mub", 1), std::invalid_argument);
}

TEST_CASE("sample_counts: size, determinism, binomial rates") {
  const Povm povm = build_named_scheme("pauli-bases", 1);
  const Matrix rho = Matrix::Identity(2, 2) / 2;

  std::vector<long long> one = sample_counts(povm, rho, 1, 3);
  CHECK(std::accumulate(one.begin(), one.end(), 0LL) == 1);
  CHECK(*std::max_element(one.begin(), one.end()) == 1);

  const long long n = 600000;
  std::vector<long long> counts = sample_counts(povm, rho, n, 17);
  CHECK(sample_counts(povm, rho, n, 17) == counts);
  CHECK(sample_counts(povm, rho, n, 18) != counts);
  CHECK(std::accumulate(counts.begin(), counts.end(), 0LL) == n);
  // every outcome has probability 1/6; stay within 5 standard errors
  const double se = std::sqrt((1.0 / 6) * (5.0 / 6) / n);
  for (long long c : counts) {
    CHECK(std::abs(static_cast<double>(c) / n - 1.0 / 6) < 5 * se);
  }

  const RealVector f = frequencies(counts, n);
  CHECK(f.sum() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(sample_counts(povm, rho, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_counts(povm, Matrix::Identity(4, 4) / 4, 10, 1),
                  std::invalid_argument);
}

TEST_CASE("ratios_test: coverage, quantiles, record layout, worker independence") {
  TrialConfig config;
  config.scheme = "pauli-bases";
  config.qubits = 1;
  config.state = {StateSpec::Base::haar, 1.0, 99};
  config.n_samples = 10000;
  config.delta = 0.01;
  config.trials = 500;
  config.master_seed = 2024;
  config.workers = 4;

  const RatiosResult result = ratios_test(config);
  REQUIRE(result.records.size() == 1500);
  REQUIRE(result.summary.size() == 3);
  for (const KindQuantile& s : result.summary) {
    // the bounds are conservative: every trial should be covered, and the
    // 1-delta ratio quantile must sit strictly inside (0, 1)
    CHECK(s.coverage >= 0.99);
    CHECK(s.quantile > 0.0);
    CHECK(s.quantile < 1.0);
  }
  for (int trial = 0; trial < config.trials; ++trial) {
    CHECK(result.records[trial * 3].trial == trial);
    CHECK(result.records[trial * 3].kind == RegionKind::A);
    CHECK(result.records[trial * 3 + 1].kind == RegionKind::B);
    CHECK(result.records[trial * 3 + 2].kind == RegionKind::R);
    for (int k = 0; k < 3; ++k) CHECK(result.records[trial * 3 + k].ratio > 0.0);
  }

  TrialConfig serial = config;
  serial.workers = 1;
  const RatiosResult again = ratios_test(serial);
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    CHECK(again.records[i].ratio == result.records[i].ratio);
  }
}

TEST_CASE("distinguish_N: identical states never separate") {
  TrialConfig config;
  config.qubits = 1;
  config.delta = 0.1;
  config.trials = 32;
  config.master_seed = 5;
  config.workers = 4;
  StateSpec s{StateSpec::Base::basis_zero, 0.5, 0};
  SearchOptions opts;
  opts.n_hi = 512;
  opts.steps = 6;
  const SearchResult result = distinguish_N(config, s, s, RegionKind::A, opts);
  CHECK(result.status == SearchStatus::not_found);
  CHECK(result.n_star == 0);
  for (const SearchEval& e : result.evals) CHECK(e.fraction < 0.25);
}

TEST_CASE("distinguish_N: depolarized basis pair separates, and later for noisier states") {
  TrialConfig config;
  config.qubits = 1;
  config.delta = 0.1;
  config.trials = 256;
  config.master_seed = 12;
  config.workers = 8;
  SearchOptions opts;
  opts.band = 0.05;

  StateSpec zero{StateSpec::Base::basis_zero, 0.5, 0};
  StateSpec one{StateSpec::Base::basis_one, 0.5, 0};
  const SearchResult mid = distinguish_N(config, zero, one, RegionKind::A, opts);
  REQUIRE(mid.status == SearchStatus::found);
  CHECK(mid.n_star > 0);
  CHECK(std::abs(mid.fraction - 0.5) <= 0.05);

  // purer pair is farther apart, so it needs fewer samples
  StateSpec zero_pure{StateSpec::Base::basis_zero, 1.0, 0};
  StateSpec one_pure{StateSpec::Base::basis_one, 1.0, 0};
  const SearchResult pure = distinguish_N(config, zero_pure, one_pure, RegionKind::A, opts);
  REQUIRE(pure.status == SearchStatus::found);
  CHECK(pure.n_star < mid.n_star);

  // determinism of the whole search
  const SearchResult rerun = distinguish_N(config, zero, one, RegionKind::A, opts);
  CHECK(rerun.n_star == mid.n_star);
  CHECK(rerun.fraction == mid.fraction);
  REQUIRE(rerun.evals.size() == mid.evals.size());
  for (std::size_t i = 0; i < mid.evals.size(); ++i) {
    CHECK(rerun.evals[i].n == mid.evals[i].n);
    CHECK(rerun.evals[i].fraction == mid.evals[i].fraction);
  }
}

TEST_CASE("gme_sample_cost: threshold rejection cites the threshold") {
  TrialConfig config;
  config.scheme = "sic";
  config.qubits = 3;
  config.delta = 0.1;
  config.trials = 8;
  config.master_seed = 3;
  try {
    gme_sample_cost(config, StateSpec::Base::ghz, 0.40, RegionKind::B);
    FAIL("expected rejection below the threshold");
  } catch (const std::invalid_argument& err) {
    CHECK(std::string(err.what()).find("0.429") != std::string::npos);
  }
  CHECK(ppt_mixture_threshold(StateSpec::Base::ghz, 3) == doctest::Approx(0.429));
  CHECK(ppt_mixture_threshold(StateSpec::Base::w, 4) == doctest::Approx(0.474));
  CHECK_THROWS_AS(ppt_mixture_threshold(StateSpec::Base::haar, 3), std::invalid_argument);
  CHECK_THROWS_AS(ppt_mixture_threshold(StateSpec::Base::ghz, 7), std::invalid_argument);

  TrialConfig big = config;
  big.qubits = 2;
  CHECK_THROWS_AS(gme_sample_cost(big, StateSpec::Base::ghz, 1.0, RegionKind::B),
                  std::invalid_argument);
}

TEST_CASE("gme_sample_cost: smoke search on the pure ghz_3 state is deterministic") {
  TrialConfig config;
  config.scheme = "sic";
  config.qubits = 3;
  config.delta = 0.1;
  config.trials = 8;
  config.master_seed = 21;
  config.workers = 8;
  SearchOptions opts;
  opts.band = 0.2;
  opts.n_lo = 256;
  opts.n_hi = 1 << 13;
  opts.steps = 4;
  opts.feas.max_iters = 5000;
  const SearchResult a = gme_sample_cost(config, StateSpec::Base::ghz, 1.0, RegionKind::B, opts);
  CHECK(!a.evals.empty());
  if (a.status == SearchStatus::found) {
    CHECK(a.n_star >= opts.n_lo);
    CHECK(std::abs(a.fraction - 0.5) <= opts.band);
  }
  const SearchResult b = gme_sample_cost(config, StateSpec::Base::ghz, 1.0, RegionKind::B, opts);
  CHECK(a.status == b.status);
  CHECK(a.n_star == b.n_star);
  CHECK(a.fraction == b.fraction);
}
