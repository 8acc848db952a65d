#include "qcr/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace qcr {

double Rng::uniform() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(1.0 - uniform()));
  const double phi = 2.0 * M_PI * uniform();
  spare_ = r * std::sin(phi);
  have_spare_ = true;
  return r * std::cos(phi);
}

double Rng::exponential() { return -std::log1p(-uniform()); }

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b));
}

std::string to_string(StateSpec::Base base) {
  switch (base) {
    case StateSpec::Base::ghz: return "ghz";
    case StateSpec::Base::w: return "w";
    case StateSpec::Base::basis_zero: return "basis-zero";
    case StateSpec::Base::basis_one: return "basis-one";
    case StateSpec::Base::maximally_mixed: return "maximally-mixed";
    case StateSpec::Base::haar: return "haar";
  }
  return "?";
}

StateSpec::Base parse_state_base(const std::string& name) {
  if (name == "ghz") return StateSpec::Base::ghz;
  if (name == "w") return StateSpec::Base::w;
  if (name == "basis-zero") return StateSpec::Base::basis_zero;
  if (name == "basis-one") return StateSpec::Base::basis_one;
  if (name == "maximally-mixed") return StateSpec::Base::maximally_mixed;
  if (name == "haar") return StateSpec::Base::haar;
  throw std::invalid_argument(
      "unknown state family: " + name +
      " (expected ghz, w, basis-zero, basis-one, maximally-mixed or haar)");
}

Matrix density(const StateSpec& spec, int qubits) {
  if (qubits < 1) throw std::invalid_argument("density: qubits must be >= 1");
  if (spec.t < 0.0 || spec.t > 1.0) {
    throw std::invalid_argument("density: depolarized weight t must lie in [0, 1]");
  }
  const long long d = 1LL << qubits;
  if (spec.base == StateSpec::Base::maximally_mixed) {
    return Matrix::Identity(d, d) / static_cast<double>(d);
  }
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d);
  switch (spec.base) {
    case StateSpec::Base::ghz:
      psi(0) = psi(d - 1) = 1.0;
      break;
    case StateSpec::Base::w:
      for (int k = 0; k < qubits; ++k) psi(1LL << k) = 1.0;
      break;
    case StateSpec::Base::basis_zero:
      psi(0) = 1.0;
      break;
    case StateSpec::Base::basis_one:
      psi(d - 1) = 1.0;
      break;
    case StateSpec::Base::haar: {
      Rng rng(spec.haar_seed);
      for (long long i = 0; i < d; ++i) psi(i) = Cplx(rng.normal(), rng.normal());
      break;
    }
    default:
      break;
  }
  psi /= psi.norm();
  return spec.t * (psi * psi.adjoint()) +
         (1.0 - spec.t) / static_cast<double>(d) * Matrix::Identity(d, d);
}

std::vector<long long> sample_counts(const Povm& povm, const Matrix& rho, long long n,
                                     std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_counts: n must be >= 1");
  if (rho.rows() != povm.dim || rho.cols() != povm.dim) {
    throw std::invalid_argument("sample_counts: state dimension does not match the povm");
  }
  const std::size_t m = povm.effects.size();
  std::vector<double> p(m);
  double sum = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    double pa = (povm.effects[a].mat() * rho).trace().real();
    if (pa < -1e-12) {
      throw std::invalid_argument("sample_counts: outcome probability below -1e-12");
    }
    p[a] = std::max(0.0, pa);
    sum += p[a];
  }
  if (std::abs(sum - 1.0) > 1e-10) {
    throw std::invalid_argument("sample_counts: outcome probabilities do not sum to 1");
  }
  for (double& pa : p) pa /= sum;

  // ordered uniforms from exponential spacings, streamed twice to avoid
  // storing n draws: pass one accumulates the normalizer
  double total = 0.0;
  {
    Rng pass1(seed);
    for (long long i = 0; i <= n; ++i) total += pass1.exponential();
  }
  Rng pass2(seed);
  std::vector<long long> counts(m, 0);
  double acc_g = 0.0;
  double acc_p = p[0];
  std::size_t k = 0;
  for (long long i = 0; i < n; ++i) {
    acc_g += pass2.exponential();
    const double u = acc_g / total;
    while (u >= acc_p && k + 1 < m) {
      ++k;
      acc_p += p[k];
    }
    ++counts[k];
  }
  return counts;
}

RealVector frequencies(const std::vector<long long>& counts, long long n) {
  RealVector f(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t a = 0; a < counts.size(); ++a) {
    f(static_cast<Eigen::Index>(a)) = static_cast<double>(counts[a]) / static_cast<double>(n);
  }
  return f;
}

namespace {

void run_parallel(int count, int workers, const std::function<void(int)>& body) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void validate_config(const TrialConfig& config) {
  if (config.qubits < 1 || config.qubits > 4) {
    throw std::invalid_argument("sampling tests cap qubits at 4");
  }
  if (config.n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (config.delta <= 0.0 || config.delta >= 1.0) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
}

struct SchemeContext {
  Povm povm;
  std::shared_ptr<const MeasurementMap> map;
  std::optional<SchemeConstants> r_constants;
};

SchemeContext make_context(const std::string& scheme, int qubits) {
  SchemeContext ctx;
  ctx.povm = build_named_scheme(scheme, qubits);
  ctx.map = std::make_shared<MeasurementMap>(build_map(ctx.povm));
  ctx.r_constants = builtin_scheme_constants(ctx.povm);
  return ctx;
}

Region build_kind_region(const SchemeContext& ctx, RegionKind kind, const RealVector& freqs,
                         double n, double delta) {
  switch (kind) {
    case RegionKind::A:
    case RegionKind::B:
      return build_region(ctx.map, freqs, n, delta, kind);
    case RegionKind::R:
      return build_region_R(ctx.map, freqs, n, delta, ctx.r_constants);
    case RegionKind::G: {
      if (!ctx.povm.sym) {
        throw std::invalid_argument(
            "gaussian region requires a symmetric local scheme specification");
      }
      return build_region_G(ctx.map, freqs, n, delta, *ctx.povm.sym);
    }
  }
  throw std::logic_error("build_kind_region: unknown kind");
}

RealVector exact_probabilities(const Povm& povm, const Matrix& rho) {
  RealVector p(static_cast<Eigen::Index>(povm.effects.size()));
  for (std::size_t a = 0; a < povm.effects.size(); ++a) {
    p(static_cast<Eigen::Index>(a)) =
        std::max(0.0, (povm.effects[a].mat() * rho).trace().real());
  }
  p /= p.sum();
  return p;
}

}  // namespace

RatiosResult ratios_test(const TrialConfig& config) {
  validate_config(config);
  const SchemeContext ctx = make_context(config.scheme, config.qubits);
  const Matrix rho = density(config.state, config.qubits);
  const RealVector probs = exact_probabilities(ctx.povm, rho);

  const RegionKind kinds[3] = {RegionKind::A, RegionKind::B, RegionKind::R};
  double radius[3];
  for (int k = 0; k < 3; ++k) {
    radius[k] = build_kind_region(ctx, kinds[k], probs, static_cast<double>(config.n_samples),
                                  config.delta)
                    .radius;
  }

  RatiosResult result;
  result.records.resize(static_cast<std::size_t>(config.trials) * 3);
  run_parallel(config.trials, config.workers, [&](int trial) {
    const std::vector<long long> counts = sample_counts(
        ctx.povm, rho, config.n_samples, mix_seed(config.master_seed, trial));
    const RealVector f = frequencies(counts, config.n_samples);
    const Matrix diff = estimate_state(*ctx.map, f).mat() - rho;
    const double norm_of[3] = {hs_norm(diff), (ctx.map->mat * vectorize(diff)).norm(),
                               spectral_norm(diff)};
    for (int k = 0; k < 3; ++k) {
      result.records[static_cast<std::size_t>(trial) * 3 + k] = {trial, kinds[k],
                                                                 norm_of[k] / radius[k]};
    }
  });

  for (int k = 0; k < 3; ++k) {
    std::vector<double> ratios;
    ratios.reserve(static_cast<std::size_t>(config.trials));
    for (int trial = 0; trial < config.trials; ++trial) {
      ratios.push_back(result.records[static_cast<std::size_t>(trial) * 3 + k].ratio);
    }
    std::sort(ratios.begin(), ratios.end());
    // inverse empirical cdf at 1-delta
    std::size_t idx = static_cast<std::size_t>(
        std::ceil((1.0 - config.delta) * static_cast<double>(config.trials)));
    idx = std::min(std::max<std::size_t>(idx, 1), ratios.size());
    double covered = 0.0;
    for (double r : ratios) covered += r <= 1.0 ? 1.0 : 0.0;
    result.summary.push_back(
        {kinds[k], ratios[idx - 1], covered / static_cast<double>(config.trials)});
  }
  return result;
}

std::string to_string(SearchStatus status) {
  switch (status) {
    case SearchStatus::found: return "found";
    case SearchStatus::not_found: return "not_found";
    case SearchStatus::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

// geometric bisection of a fraction assumed nondecreasing in n
SearchResult bisect_fraction(const SearchOptions& opts,
                             const std::function<double(long long, int)>& fraction_at) {
  if (opts.n_lo < 1 || opts.n_hi <= opts.n_lo) {
    throw std::invalid_argument("search: need 1 <= n_lo < n_hi");
  }
  if (opts.steps < 1 || opts.band <= 0.0) {
    throw std::invalid_argument("search: need steps >= 1 and band > 0");
  }
  SearchResult result;
  long long lo = opts.n_lo, hi = opts.n_hi;
  bool all_low = true;
  for (int step = 0; step < opts.steps && hi - lo > 1; ++step) {
    long long mid = std::llround(std::exp(0.5 * (std::log(static_cast<double>(lo)) +
                                                 std::log(static_cast<double>(hi)))));
    mid = std::max(lo + 1, std::min(mid, hi - 1));
    const double f = fraction_at(mid, step);
    result.evals.push_back({mid, f});
    result.fraction = f;
    if (std::abs(f - opts.target) <= opts.band) {
      result.status = SearchStatus::found;
      result.n_star = mid;
      result.bracket_lo = lo;
      result.bracket_hi = hi;
      return result;
    }
    all_low = all_low && f < opts.target - opts.band;
    if (f < opts.target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  result.status = all_low ? SearchStatus::not_found : SearchStatus::inconclusive;
  result.bracket_lo = lo;
  result.bracket_hi = hi;
  return result;
}

}  // namespace

SearchResult distinguish_N(const TrialConfig& config, const StateSpec& s1, const StateSpec& s2,
                           RegionKind kind, const SearchOptions& opts) {
  validate_config(config);
  const SchemeContext ctx = make_context(config.scheme, config.qubits);
  const Matrix rho1 = density(s1, config.qubits);
  const Matrix rho2 = density(s2, config.qubits);

  auto fraction_at = [&](long long n, int step) {
    std::vector<char> apart(static_cast<std::size_t>(config.trials), 0);
    run_parallel(config.trials, config.workers, [&](int trial) {
      const std::uint64_t s = mix_seed(mix_seed(config.master_seed, step), trial);
      const RealVector f1 =
          frequencies(sample_counts(ctx.povm, rho1, n, mix_seed(s, 1)), n);
      const RealVector f2 =
          frequencies(sample_counts(ctx.povm, rho2, n, mix_seed(s, 2)), n);
      const Region ra = build_kind_region(ctx, kind, f1, static_cast<double>(n), config.delta);
      const Region rb = build_kind_region(ctx, kind, f2, static_cast<double>(n), config.delta);
      // an inconclusive solve counts as overlapping (conservative)
      apart[static_cast<std::size_t>(trial)] =
          regions_overlap(ra, rb, opts.feas).status == FeasibilityStatus::empty_within_margin;
    });
    double frac = 0.0;
    for (char c : apart) frac += c;
    return frac / static_cast<double>(config.trials);
  };
  return bisect_fraction(opts, fraction_at);
}

double ppt_mixture_threshold(StateSpec::Base family, int qubits) {
  if (qubits < 3 || qubits > 6) {
    throw std::invalid_argument("ppt_mixture_threshold: qubits must be in 3..6");
  }
  static const double ghz[4] = {0.429, 0.467, 0.484, 0.493};
  static const double w[4] = {0.479, 0.474, 0.422, 0.353};
  switch (family) {
    case StateSpec::Base::ghz: return ghz[qubits - 3];
    case StateSpec::Base::w: return w[qubits - 3];
    default:
      throw std::invalid_argument("ppt_mixture_threshold: family must be ghz or w");
  }
}

SearchResult gme_sample_cost(const TrialConfig& config, StateSpec::Base family, double t,
                             RegionKind kind, const SearchOptions& opts) {
  validate_config(config);
  if (config.qubits < 3 || config.qubits > 4) {
    throw std::invalid_argument("gme_sample_cost: qubits must be 3 or 4");
  }
  const double threshold = ppt_mixture_threshold(family, config.qubits);
  if (t <= threshold) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "gme_sample_cost: t = %.3f is not above the ppt-mixture threshold %.3f for "
                  "%s with %d qubits",
                  t, threshold, to_string(family).c_str(), config.qubits);
    throw std::invalid_argument(msg);
  }
  const SchemeContext ctx = make_context(config.scheme, config.qubits);
  StateSpec spec;
  spec.base = family;
  spec.t = t;
  const Matrix rho = density(spec, config.qubits);

  auto fraction_at = [&](long long n, int step) {
    std::vector<char> certified(static_cast<std::size_t>(config.trials), 0);
    run_parallel(config.trials, config.workers, [&](int trial) {
      const std::uint64_t s = mix_seed(mix_seed(config.master_seed, step), trial);
      const RealVector f = frequencies(sample_counts(ctx.povm, rho, n, s), n);
      const Region region =
          build_kind_region(ctx, kind, f, static_cast<double>(n), config.delta);
      certified[static_cast<std::size_t>(trial)] =
          gme_certify(region, config.qubits, opts.feas).status ==
          FeasibilityStatus::empty_within_margin;
    });
    double frac = 0.0;
    for (char c : certified) frac += c;
    return frac / static_cast<double>(config.trials);
  };
  return bisect_fraction(opts, fraction_at);
}

}  // namespace qcr
