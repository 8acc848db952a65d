#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qcr/feasibility.hpp"
#include "qcr/regions.hpp"
#include "qcr/schemes.hpp"

namespace qcr {

/// Deterministic random stream. The engine is standardized by the C++
/// standard; the double-producing distributions are not, so uniforms and
/// normals are derived by hand to keep outputs byte-identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t raw() { return eng_(); }
  double uniform();  // [0, 1), 53-bit
  double normal();   // Box-Muller with cached spare
  double exponential();

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// splitmix64 step; per-trial seeds are mix_seed(master, index) so results
/// do not depend on execution order or worker count.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

struct StateSpec {
  enum class Base { ghz, w, basis_zero, basis_one, maximally_mixed, haar };
  Base base = Base::ghz;
  double t = 1.0;  // depolarized weight: t |psi><psi| + (1-t) I/d
  std::uint64_t haar_seed = 0;
};

std::string to_string(StateSpec::Base base);
StateSpec::Base parse_state_base(const std::string& name);

Matrix density(const StateSpec& spec, int qubits);

/// One multinomial draw of size n from the outcome distribution of rho under
/// the flattened povm. Negative probabilities below 1e-12 in magnitude are
/// clipped and the simplex renormalized; larger residuals are rejected.
std::vector<long long> sample_counts(const Povm& povm, const Matrix& rho, long long n,
                                     std::uint64_t seed);

RealVector frequencies(const std::vector<long long>& counts, long long n);

struct TrialConfig {
  std::string scheme = "pauli-bases";
  int qubits = 1;
  StateSpec state;
  long long n_samples = 10000;
  double delta = 0.01;
  int trials = 100;
  std::uint64_t master_seed = 1;
  int workers = 1;
};

struct RatioRecord {
  int trial = 0;
  RegionKind kind = RegionKind::A;
  double ratio = 0.0;  // kind-matched norm of (estimate - rho) over the radius
};

struct KindQuantile {
  RegionKind kind = RegionKind::A;
  double quantile = 0.0;  // empirical 1-delta quantile of the ratio
  double coverage = 0.0;  // fraction of trials with ratio <= 1
};

struct RatiosResult {
  std::vector<RatioRecord> records;  // trial-major, kinds A, B, R
  std::vector<KindQuantile> summary;
};

/// Monte Carlo tightness test: per trial, sample counts, rebuild the regions,
/// and record the ratio of the true-state displacement to the region radius.
RatiosResult ratios_test(const TrialConfig& config);

enum class SearchStatus { found, not_found, inconclusive };
std::string to_string(SearchStatus status);

struct SearchEval {
  long long n = 0;
  double fraction = 0.0;
};

struct SearchOptions {
  double target = 0.5;
  double band = 0.02;
  long long n_lo = 8;
  long long n_hi = 1LL << 24;
  int steps = 12;
  // per-trial solve budget; trials whose solve is inconclusive count as
  // overlap (not certified), which can only push n_star upward
  FeasibilityOptions feas{1e-7, 1e-9, 200, 20000};
};

struct SearchResult {
  SearchStatus status = SearchStatus::inconclusive;
  long long n_star = 0;
  double fraction = 0.0;  // achieved at n_star (found) or at the last probe
  long long bracket_lo = 0;
  long long bracket_hi = 0;
  std::vector<SearchEval> evals;
};

/// Geometric bisection over N for the sample count at which the regions of
/// two states stop overlapping in a target fraction of trials.
SearchResult distinguish_N(const TrialConfig& config, const StateSpec& s1, const StateSpec& s2,
                           RegionKind kind, const SearchOptions& opts = {});

/// Largest t for which D_t(family) is a PPT mixture, q in 3..6.
double ppt_mixture_threshold(StateSpec::Base family, int qubits);

/// Same bisection for the sample count at which GME certification of
/// D_t(family) succeeds in the target fraction of trials.
SearchResult gme_sample_cost(const TrialConfig& config, StateSpec::Base family, double t,
                             RegionKind kind, const SearchOptions& opts = {});

}  // namespace qcr
