// End-to-end acceptance gate: one PASS/FAIL line per criterion. Exits with
// the number of failed criteria. argv[1] is the path of the qcr CLI binary
// (needed by the determinism criterion).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qcr/bernstein.hpp"
#include "qcr/feasibility.hpp"
#include "qcr/mmap.hpp"
#include "qcr/regions.hpp"
#include "qcr/schemes.hpp"
#include "qcr/sim.hpp"

namespace {

using namespace qcr;

int failures = 0;

void require(bool cond, const std::string& what) {
  if (!cond) throw std::runtime_error(what);
}

void criterion(int id, const std::string& label, const std::function<void()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::string error;
  try {
    body();
  } catch (const std::exception& e) {
    error = e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (error.empty()) {
    std::printf("PASS  %2d  %-55s %7.1f s\n", id, label.c_str(), secs);
  } else {
    ++failures;
    std::printf("FAIL  %2d  %-55s %7.1f s  [%s]\n", id, label.c_str(), secs, error.c_str());
  }
  std::fflush(stdout);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

void check_close(double got, double want, double tol, const std::string& what) {
  if (std::abs(got - want) > tol * std::max(1.0, std::abs(want))) {
    throw std::runtime_error(what + ": got " + fmt(got) + ", want " + fmt(want));
  }
}

// ------------------------------------------------------------------ criteria

void scheme_constants() {
  // tensor powers of the qubit schemes: per-qubit sigma_A (largest column of
  // the left inverse) is sqrt(5), per-qubit largest semiaxis over epsilon is
  // sqrt(6)
  for (const std::string name : {"pauli-bases", "sic"}) {
    const int q_max = name == "sic" ? 2 : 3;
    for (int q = 1; q <= q_max; ++q) {
      const MeasurementMap map = build_map(build_named_scheme(name, q));
      const double sigma_a = col_norm_max(map.pinv);
      check_close(sigma_a, std::pow(5.0, 0.5 * q), 1e-9, name + " sigma_A q=" + fmt(q));
      if (name == "pauli-bases") {
        const double axis = col_norm_max(map.mat * map.pinv) / std::sqrt(map.gram_eigs(0));
        check_close(axis, std::pow(6.0, 0.5 * q), 1e-9, name + " semiaxis q=" + fmt(q));
      }
    }
  }
  for (int q = 1; q <= 2; ++q) {
    const MeasurementMap map = build_map(build_named_scheme("pauli-observables", q));
    const double d = std::pow(2.0, q);
    const double sigma_a = col_norm_max(map.pinv);
    check_close(sigma_a, std::sqrt((d * d - 1) * (d * d - 1) / d + 1.0 / d), 1e-9,
                "pauli-observables sigma_A q=" + fmt(q));
    const double axis = col_norm_max(map.mat * map.pinv) / std::sqrt(map.gram_eigs(0));
    check_close(axis, std::sqrt(d * (d * d - 1)), 1e-9, "pauli-observables semiaxis q=" + fmt(q));
  }
}

void tail_inversion() {
  Rng rng(20240601);
  for (int i = 0; i < 100; ++i) {
    const double n = std::exp(std::log(10.0) + rng.uniform() * std::log(1e6));
    const double delta = std::exp(std::log(1e-6) + rng.uniform() * std::log(0.5 / 1e-6));
    const double eta = std::exp(std::log(0.1) + rng.uniform() * std::log(100.0));
    const double eps = epsilon_for_confidence(n, delta, eta);
    const double back = tail_bound(TailParams{n, 1.0, eta, delta}, eps);
    if (std::abs(back - delta) > 1e-10 * delta) {
      throw std::runtime_error("tail inversion off: delta " + fmt(delta) + " back " + fmt(back));
    }
  }
  // in the moderate-deviation range the size sits between the two Gaussian-ish
  // brackets
  Rng rng2(911);
  for (int i = 0; i < 100; ++i) {
    const double delta = std::exp(std::log(1e-5) + rng2.uniform() * std::log(0.3 / 1e-5));
    const double eta = std::exp(std::log(0.2) + rng2.uniform() * std::log(40.0));
    const double big_l = std::log(8.0 / delta);
    const double n = (4.0 / 3.0) * eta * eta * big_l * (1.0001 + 50.0 * rng2.uniform());
    const double eps = epsilon_for_confidence(n, delta, eta);
    const double scaled = eps * std::sqrt(n);
    require(scaled > std::sqrt(2.0 * big_l) && scaled < std::sqrt(3.0 * big_l),
            "bracket violated: eps sqrt(N) = " + fmt(scaled) + " for L = " + fmt(big_l));
  }
}

void exponent_floor() {
  Rng rng(77);
  for (int i = 0; i < 10000; ++i) {
    const double v = std::exp(std::log(1e-6) + rng.uniform() * std::log(1e9));
    const double big_l = std::exp(std::log(1e-6) + rng.uniform() * std::log(1e9));
    const double t = rng.uniform() * (std::sqrt(v) + big_l / 3.0);
    const double exponent = -(t * t / (2.0 * v)) * 3.0 / (3.0 + t * big_l / v);
    require(exponent >= -2.0 / 3.0 - 1e-12, "exponent " + fmt(exponent) + " below -2/3");
  }
}

void coverage_and_tightness() {
  auto run = [](int qubits) {
    TrialConfig config;
    config.scheme = "pauli-bases";
    config.qubits = qubits;
    config.state.base = StateSpec::Base::haar;
    config.state.t = 1.0;
    config.state.haar_seed = mix_seed(303, 0x8AA2);
    config.n_samples = 20000;
    config.delta = 0.01;
    config.trials = 500;
    config.master_seed = 303;
    config.workers = 8;
    return ratios_test(config).summary;
  };
  double quant[4][3];  // [qubits][kind A,B,R]
  for (int q = 1; q <= 3; ++q) {
    const auto summary = run(q);
    require(summary.size() == 3, "summary size");
    for (std::size_t k = 0; k < 3; ++k) {
      const KindQuantile& s = summary[k];
      if (q == 2) {
        require(s.coverage >= 0.99, to_string(s.kind) + " coverage " + fmt(s.coverage));
      }
      require(s.quantile > 0.0 && s.quantile < 1.0,
              to_string(s.kind) + " quantile " + fmt(s.quantile) + " outside (0,1)");
      quant[q][k] = s.quantile;
    }
  }
  // spectral region is the tightest at small system sizes: it beats the
  // ellipsoid everywhere here and the ball from two qubits on
  for (int q = 1; q <= 3; ++q) {
    require(quant[q][2] > quant[q][1],
            "spectral quantile not above ellipsoid at q=" + fmt(q));
  }
  for (int q = 2; q <= 3; ++q) {
    require(quant[q][2] > quant[q][0], "spectral quantile not above ball at q=" + fmt(q));
  }
}

void closed_form_left_inverse() {
  const char bases[3] = {'X', 'Y', 'Z'};
  for (int q = 1; q <= 2; ++q) {
    const MeasurementMap map = build_map(build_named_scheme("pauli-bases", q));
    const int n_settings = static_cast<int>(std::pow(3, q));
    const int n_out_per = 1 << q;
    require(map.n_out == n_settings * n_out_per, "outcome count");
    // dual operators kron_k (3 P_{b_k, o_k} - 1), settings lexicographic in
    // X<Y<Z, qubit 0 leftmost; outcomes with + before - per qubit
    double worst = 0.0;
    for (int s = 0; s < n_settings; ++s) {
      for (int o = 0; o < n_out_per; ++o) {
        Matrix k = Matrix::Identity(1, 1);
        int s_rem = s;
        int divisor = n_settings / 3;
        for (int qq = 0; qq < q; ++qq) {
          const char b = bases[(s_rem / divisor) % 3];
          s_rem %= divisor;
          divisor = std::max(1, divisor / 3);
          const double sign = ((o >> (q - 1 - qq)) & 1) ? -1.0 : 1.0;
          Matrix pauli = b == 'X' ? pauli_x() : (b == 'Y' ? pauli_y() : pauli_z());
          Matrix proj = 0.5 * (Matrix::Identity(2, 2) + sign * pauli);
          k = kron(k, 3.0 * proj - Matrix::Identity(2, 2));
        }
        const RealVector col = vectorize(herm_trusted(k));
        worst = std::max(worst, (map.pinv.col(s * n_out_per + o) - col).cwiseAbs().maxCoeff());
      }
    }
    require(worst <= 1e-10, "left inverse entries off by " + fmt(worst));

    // gram spectrum 3^(chi - 2q) with multiplicity binom(q, chi) 3^(q - chi)
    std::vector<double> expected;
    for (int chi = 0; chi <= q; ++chi) {
      long long binom = 1;
      for (int i = 0; i < chi; ++i) binom = binom * (q - i) / (i + 1);
      const long long mult = binom * static_cast<long long>(std::pow(3, q - chi));
      for (long long m = 0; m < mult; ++m) expected.push_back(std::pow(3.0, chi - 2 * q));
    }
    std::sort(expected.begin(), expected.end());
    require(static_cast<int>(expected.size()) == map.gram_eigs.size(), "gram eig count");
    for (int j = 0; j < map.gram_eigs.size(); ++j) {
      check_close(map.gram_eigs(j), expected[j], 1e-10, "gram eig " + fmt(j));
    }
  }
}

// regularized lower incomplete gamma by plain series, inverted by bisection
double chi2_inv_survival_series(int dof, double delta) {
  const double a = 0.5 * dof;
  auto survival = [a](double x) {
    const double z = 0.5 * x;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
      term *= z / (a + n);
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    const double log_p = a * std::log(z) - z + std::log(sum) - std::lgamma(a);
    return 1.0 - std::exp(log_p);
  };
  double lo = 0.0, hi = 1.0;
  while (survival(hi) > delta) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (survival(mid) > delta ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void gaussian_crossover() {
  const double at2 = region_ratio_BG(make_symmetric_spec(2, 1, 6, 2), 0.1, true);
  const double at6 = region_ratio_BG(make_symmetric_spec(2, 1, 6, 6), 0.1, true);
  require(at2 > 1.0, "size ratio at q=2 is " + fmt(at2) + ", expected > 1");
  require(at6 < 1.0, "size ratio at q=6 is " + fmt(at6) + ", expected < 1");
  const double lib = chi2_inv_survival(3, 0.1);
  const double oracle = chi2_inv_survival_series(3, 0.1);
  if (std::abs(lib - oracle) > 1e-6) {
    throw std::runtime_error("chi-square inverse " + fmt(lib) + " vs series " + fmt(oracle));
  }
}

void ppt_thresholds() {
  auto status = [](StateSpec::Base base, double t) {
    const Matrix rho = density(StateSpec{base, t, 0}, 3);
    return gme_certify(herm_trusted(rho), 3).status;
  };
  require(status(StateSpec::Base::ghz, 0.35) == FeasibilityStatus::feasible,
          "ghz mixture at t=0.35 should admit a ppt decomposition");
  require(status(StateSpec::Base::ghz, 0.50) == FeasibilityStatus::empty_within_margin,
          "ghz mixture at t=0.50 should not admit a ppt decomposition");
  require(status(StateSpec::Base::w, 0.42) == FeasibilityStatus::feasible,
          "w mixture at t=0.42 should admit a ppt decomposition");
  require(status(StateSpec::Base::w, 0.54) == FeasibilityStatus::empty_within_margin,
          "w mixture at t=0.54 should not admit a ppt decomposition");
}

void distinguishing_power() {
  SearchOptions opts;
  opts.band = 0.05;
  const StateSpec zero{StateSpec::Base::basis_zero, 0.5, 0};
  const StateSpec one{StateSpec::Base::basis_one, 0.5, 0};
  for (RegionKind kind : {RegionKind::A, RegionKind::B, RegionKind::R}) {
    long long prev = 0;
    for (int q = 1; q <= 2; ++q) {
      TrialConfig config;
      config.scheme = "pauli-bases";
      config.qubits = q;
      config.delta = 0.1;
      config.trials = 256;
      config.master_seed = 1717;
      config.workers = 8;
      const SearchResult res = distinguish_N(config, zero, one, kind, opts);
      require(res.status == SearchStatus::found,
              to_string(kind) + " q=" + fmt(q) + ": search " + to_string(res.status));
      require(std::abs(res.fraction - 0.5) <= 0.05 + 1e-12,
              to_string(kind) + " q=" + fmt(q) + ": fraction " + fmt(res.fraction));
      if (q == 2) {
        require(res.n_star > prev, to_string(kind) + ": n* " + fmt(res.n_star) +
                                       " at q=2 not above " + fmt(prev) + " at q=1");
      }
      prev = res.n_star;
    }
  }
}

void sampling_optimality() {
  Rng rng(4242);
  for (int i = 0; i < 1000; ++i) {
    const int m = 2 + static_cast<int>(rng.uniform() * 9);
    std::vector<double> gammas(m), other(m);
    double total = 0.0, osum = 0.0;
    for (int s = 0; s < m; ++s) {
      gammas[s] = std::exp(std::log(1e-3) + rng.uniform() * std::log(1e4));
      total += gammas[s];
      other[s] = 1e-6 + rng.uniform();
      osum += other[s];
    }
    for (double& w : other) w /= osum;
    const std::vector<double> opt = optimal_sampling(gammas);
    const SigmaEta best = sigma_eta(MultinomialModel{gammas, opt});
    const SigmaEta alt = sigma_eta(MultinomialModel{gammas, other});
    require(best.sigma <= alt.sigma + 1e-12,
            "sigma " + fmt(best.sigma) + " above alternative " + fmt(alt.sigma));
    check_close(best.sigma, total, 1e-9, "optimal sigma vs sum of gammas");
    check_close(best.eta, 2.0, 1e-12, "optimal eta");
  }
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "missing output file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism(const std::string& cli) {
  require(!cli.empty(), "no cli binary path given (argv[1])");
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "qcr_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
    require(std::system(cmd.c_str()) == 0, "cli run failed: " + args);
  };
  const std::string base = " simulate ratios --scheme pauli-bases --qubits 1 --state haar"
                           " --N 2000 --delta 0.05 --trials 40 --seed 7 --out ";
  run(base + (dir / "w1").string() + " --workers 1");
  run(base + (dir / "w8").string() + " --workers 8");
  run(base + (dir / "w8b").string() + " --workers 8");
  for (const std::string suffix : {".csv", "_summary.csv", "_meta.json"}) {
    const std::string a = slurp(dir / ("w1" + suffix));
    require(a == slurp(dir / ("w8" + suffix)), suffix + " differs between 1 and 8 workers");
    require(a == slurp(dir / ("w8b" + suffix)), suffix + " differs between identical runs");
  }
  const std::string gme = " certify gme --state ghz --t 1.0 --qubits 3 --N 50000 --delta 0.1"
                          " --seed 3 --out ";
  run(gme + (dir / "g1.json").string());
  run(gme + (dir / "g2.json").string());
  require(slurp(dir / "g1.json") == slurp(dir / "g2.json"),
          "certification report differs between identical runs");
  fs::remove_all(dir);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  std::printf("acceptance checks\n");
  criterion(1, "closed-form scheme constants match numerics", scheme_constants);
  criterion(2, "tail-bound inversion exact and inside brackets", tail_inversion);
  criterion(3, "deviation exponent never below -2/3", exponent_floor);
  criterion(4, "coverage and tightness quantiles", coverage_and_tightness);
  criterion(5, "closed-form left inverse and gram spectrum", closed_form_left_inverse);
  criterion(6, "ellipsoid/gaussian crossover and chi-square inverse", gaussian_crossover);
  criterion(7, "ppt-mixture thresholds for ghz and w mixtures", ppt_thresholds);
  criterion(8, "sample counts separating depolarized basis states", distinguishing_power);
  criterion(9, "optimal sampling weights minimize sigma", sampling_optimality);
  criterion(10, "byte-identical outputs across runs and workers",
            [&cli] { determinism(cli); });
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures;
}
