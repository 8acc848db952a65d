#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qcr/io.hpp"
#include "qcr/sim.hpp"

namespace {

using namespace qcr;

RegionKind parse_kind(const std::string& s) {
  if (s == "A") return RegionKind::A;
  if (s == "B") return RegionKind::B;
  if (s == "R") return RegionKind::R;
  if (s == "G") return RegionKind::G;
  throw std::invalid_argument("unknown region kind: " + s + " (expected A, B, R or G)");
}

void emit(const std::optional<std::string>& out, const std::string& content) {
  if (out) {
    write_text_file(*out, content);
  } else {
    std::cout << content;
  }
}

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- scheme emit

struct SchemeEmitArgs {
  std::string scheme;
  int qubits = 1;
  std::optional<std::string> out;
};

void run_scheme_emit(const SchemeEmitArgs& args) {
  const std::vector<Setting> settings = named_scheme_settings(args.scheme, args.qubits);
  const int dim = 1 << args.qubits;
  Json j = scheme_to_json(dim, settings, args.scheme, args.qubits);
  // the file must round-trip into the same flat measurement
  const Povm check = resolve_scheme(scheme_from_json(j));
  validate_povm(check);
  emit(args.out, json_text(j));
}

// --------------------------------------------------------------------- region

struct MeasuredData {
  Povm povm;
  RealVector freqs;
  long long total = 0;
};

// counts without declared weights are a fixed design: the effective sampling
// weights become n_s / N, and the map must be rebuilt with them
MeasuredData load_measured(const std::string& povm_path, const std::string& counts_path) {
  LoadedScheme loaded = scheme_from_json(load_json_file(povm_path));
  const CountsData counts = counts_from_json(load_json_file(counts_path));
  MeasuredData out;
  if (counts.weights) {
    out.povm = resolve_scheme(loaded);
  } else {
    std::vector<Setting> effective = fixed_design_settings(loaded.settings, counts);
    double drift = 0.0;
    for (std::size_t i = 0; i < effective.size(); ++i) {
      drift = std::max(drift, std::abs(effective[i].weight - loaded.settings[i].weight));
    }
    if (drift > 1e-9) {
      loaded.settings = std::move(effective);
      out.povm = merge_settings(loaded.settings);
    } else {
      out.povm = resolve_scheme(loaded);
    }
  }
  out.freqs = assemble_frequencies(counts, loaded.settings, &out.total);
  return out;
}

struct RegionArgs {
  std::string povm_path;
  std::string counts_path;
  std::string kind = "A";
  double delta = 0.05;
  std::optional<std::string> out;
};

void run_region(const RegionArgs& args) {
  if (args.delta <= 0.0 || args.delta >= 1.0) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  const RegionKind kind = parse_kind(args.kind);
  const auto [povm, freqs, total] = load_measured(args.povm_path, args.counts_path);

  auto map = std::make_shared<MeasurementMap>(build_map(povm));
  Region region;
  switch (kind) {
    case RegionKind::A:
    case RegionKind::B:
      region = build_region(map, freqs, static_cast<double>(total), args.delta, kind);
      break;
    case RegionKind::R:
      region = build_region_R(map, freqs, static_cast<double>(total), args.delta,
                              builtin_scheme_constants(povm));
      break;
    case RegionKind::G:
      if (!povm.sym) {
        throw std::invalid_argument(
            "gaussian region requires a symmetric local scheme specification");
      }
      region = build_region_G(map, freqs, static_cast<double>(total), args.delta, *povm.sym);
      break;
  }

  Json report = region_report(region);
  report["config"] = Json{{"command", "region"},
                          {"povm", args.povm_path},
                          {"counts", args.counts_path},
                          {"kind", args.kind},
                          {"delta", args.delta},
                          {"shots", total}};
  emit(args.out, json_text(report));
}

// ------------------------------------------------------------- simulate ratios

struct RatiosArgs {
  std::string scheme = "pauli-bases";
  int qubits = 1;
  std::string state = "haar";
  double t = 1.0;
  long long n_samples = 0;
  double delta = 0.01;
  int trials = 500;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out;
};

std::string base_path(std::string out) {
  if (out.size() > 4 && out.substr(out.size() - 4) == ".csv") out.resize(out.size() - 4);
  return out;
}

Json state_json(const StateSpec& spec) {
  Json j{{"family", to_string(spec.base)}, {"t", spec.t}};
  if (spec.base == StateSpec::Base::haar) j["haar_seed"] = spec.haar_seed;
  return j;
}

void run_sim_ratios(const RatiosArgs& args) {
  TrialConfig config;
  config.scheme = args.scheme;
  config.qubits = args.qubits;
  config.state.base = parse_state_base(args.state);
  config.state.t = args.t;
  config.state.haar_seed = mix_seed(args.seed, 0x8AA2);
  config.n_samples = args.n_samples;
  config.delta = args.delta;
  config.trials = args.trials;
  config.master_seed = args.seed;
  config.workers = args.workers;

  const RatiosResult result = ratios_test(config);

  std::string detail = csv_line({"trial", "kind", "ratio"}) + "\n";
  for (const RatioRecord& r : result.records) {
    detail += csv_line({std::to_string(r.trial), to_string(r.kind), format_double(r.ratio)});
    detail += "\n";
  }
  std::string summary = csv_line({"kind", "quantile", "coverage"}) + "\n";
  Json jsummary = Json::array();
  for (const KindQuantile& s : result.summary) {
    summary +=
        csv_line({to_string(s.kind), format_double(s.quantile), format_double(s.coverage)});
    summary += "\n";
    jsummary.push_back(Json{{"kind", to_string(s.kind)},
                            {"quantile", s.quantile},
                            {"coverage", s.coverage}});
  }
  // full resolved configuration; execution-only knobs (workers, paths) are
  // excluded so outputs are byte-identical for any parallelism
  Json meta{{"command", "simulate ratios"},
            {"scheme", config.scheme},
            {"qubits", config.qubits},
            {"state", state_json(config.state)},
            {"N", config.n_samples},
            {"delta", config.delta},
            {"trials", config.trials},
            {"seed", config.master_seed},
            {"quantile_rank", 1.0 - config.delta},
            {"summary", std::move(jsummary)}};

  const std::string base = base_path(args.out);
  write_text_file(base + ".csv", detail);
  write_text_file(base + "_summary.csv", summary);
  write_text_file(base + "_meta.json", json_text(meta));
}

// --------------------------------------------------------- simulate distinguish

struct DistinguishArgs {
  std::string pair = "zero-one";
  std::string scheme = "pauli-bases";
  int qubits = 1;
  double t = 0.5;
  double delta = 0.1;
  int trials = 256;
  std::uint64_t seed = 0;
  double target = 0.5;
  double band = 0.02;
  long long n_lo = 8;
  long long n_hi = 1LL << 24;
  int steps = 12;
  std::string kinds = "A,B,R";
  int workers = 1;
  std::string out;
};

std::pair<StateSpec::Base, StateSpec::Base> parse_pair(const std::string& pair) {
  if (pair == "ghz-w") return {StateSpec::Base::ghz, StateSpec::Base::w};
  if (pair == "zero-one") return {StateSpec::Base::basis_zero, StateSpec::Base::basis_one};
  throw std::invalid_argument("unknown pair: " + pair + " (expected ghz-w or zero-one)");
}

std::vector<RegionKind> parse_kinds(const std::string& csv) {
  std::vector<RegionKind> kinds;
  std::string token;
  for (std::size_t i = 0; i <= csv.size(); ++i) {
    if (i == csv.size() || csv[i] == ',') {
      if (!token.empty()) kinds.push_back(parse_kind(token));
      token.clear();
    } else {
      token += csv[i];
    }
  }
  if (kinds.empty()) throw std::invalid_argument("no region kinds given");
  return kinds;
}

void run_sim_distinguish(const DistinguishArgs& args) {
  const auto [base1, base2] = parse_pair(args.pair);
  TrialConfig config;
  config.scheme = args.scheme;
  config.qubits = args.qubits;
  config.delta = args.delta;
  config.trials = args.trials;
  config.master_seed = args.seed;
  config.workers = args.workers;
  StateSpec s1{base1, args.t, 0};
  StateSpec s2{base2, args.t, 0};
  SearchOptions opts;
  opts.target = args.target;
  opts.band = args.band;
  opts.n_lo = args.n_lo;
  opts.n_hi = args.n_hi;
  opts.steps = args.steps;

  std::string detail = csv_line({"kind", "qubits", "n", "fraction", "n_star"}) + "\n";
  Json jresults = Json::array();
  for (RegionKind kind : parse_kinds(args.kinds)) {
    const SearchResult result = distinguish_N(config, s1, s2, kind, opts);
    for (const SearchEval& e : result.evals) {
      detail += csv_line({to_string(kind), std::to_string(config.qubits), std::to_string(e.n),
                          format_double(e.fraction), std::to_string(result.n_star)});
      detail += "\n";
    }
    jresults.push_back(Json{{"kind", to_string(kind)},
                            {"status", to_string(result.status)},
                            {"n_star", result.n_star},
                            {"fraction", result.fraction},
                            {"bracket", Json::array({result.bracket_lo, result.bracket_hi})}});
  }
  Json meta{{"command", "simulate distinguish"},
            {"pair", args.pair},
            {"scheme", config.scheme},
            {"qubits", config.qubits},
            {"t", args.t},
            {"delta", config.delta},
            {"trials", config.trials},
            {"seed", config.master_seed},
            {"target", opts.target},
            {"band", opts.band},
            {"n_lo", opts.n_lo},
            {"n_hi", opts.n_hi},
            {"steps", opts.steps},
            {"results", std::move(jresults)}};

  const std::string base = base_path(args.out);
  write_text_file(base + ".csv", detail);
  write_text_file(base + "_meta.json", json_text(meta));
}

// ---------------------------------------------------------------- certify gme

struct CertifyArgs {
  std::string state = "ghz";
  double t = 1.0;
  int qubits = 3;
  long long n_samples = 0;
  double delta = 0.1;
  std::uint64_t seed = 0;
  std::string scheme = "sic";
  std::string kind = "B";
  std::string povm_path;
  std::string counts_path;
  bool seeded = false;
  std::optional<std::string> out;
};

void run_certify_gme(const CertifyArgs& args) {
  if (args.qubits < 3 || args.qubits > 4) {
    throw std::invalid_argument("gme certification caps qubits at 3..4");
  }
  if (args.delta <= 0.0 || args.delta >= 1.0) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  const RegionKind kind = parse_kind(args.kind);
  const bool from_counts = !args.counts_path.empty();

  Json config{{"command", "certify gme"}, {"qubits", args.qubits}, {"delta", args.delta},
              {"kind", args.kind}};
  Povm povm;
  RealVector freqs;
  long long total = 0;
  std::optional<std::vector<Setting>> file_settings;
  if (from_counts) {
    if (args.povm_path.empty()) {
      throw std::invalid_argument("--counts needs --povm for the measurement description");
    }
    MeasuredData data = load_measured(args.povm_path, args.counts_path);
    if (data.povm.dim != (1 << args.qubits)) {
      throw std::invalid_argument("povm dimension does not match --qubits");
    }
    povm = std::move(data.povm);
    freqs = std::move(data.freqs);
    total = data.total;
    config["povm"] = args.povm_path;
    config["counts"] = args.counts_path;
    config["shots"] = total;
  } else {
    if (!args.seeded) {
      throw std::invalid_argument("simulated certification needs --seed");
    }
    if (args.n_samples < 1) throw std::invalid_argument("--N must be >= 1");
    const StateSpec::Base family = parse_state_base(args.state);
    const double threshold = ppt_mixture_threshold(family, args.qubits);
    if (args.t <= threshold) {
      char msg[160];
      std::snprintf(msg, sizeof(msg),
                    "t = %.3f is not above the ppt-mixture threshold %.3f for %s with %d qubits",
                    args.t, threshold, args.state.c_str(), args.qubits);
      throw std::invalid_argument(msg);
    }
    povm = build_named_scheme(args.scheme, args.qubits);
    StateSpec spec{family, args.t, 0};
    const Matrix rho = density(spec, args.qubits);
    const std::vector<long long> counts =
        sample_counts(povm, rho, args.n_samples, mix_seed(args.seed, 1));
    freqs = frequencies(counts, args.n_samples);
    total = args.n_samples;
    config["state"] = state_json(spec);
    config["scheme"] = args.scheme;
    config["N"] = args.n_samples;
    config["seed"] = args.seed;
    config["threshold"] = threshold;
  }

  auto map = std::make_shared<MeasurementMap>(build_map(povm));
  Region region;
  switch (kind) {
    case RegionKind::A:
    case RegionKind::B:
      region = build_region(map, freqs, static_cast<double>(total), args.delta, kind);
      break;
    case RegionKind::R:
      region = build_region_R(map, freqs, static_cast<double>(total), args.delta,
                              builtin_scheme_constants(povm));
      break;
    case RegionKind::G:
      if (!povm.sym) {
        throw std::invalid_argument(
            "gaussian region requires a symmetric local scheme specification");
      }
      region = build_region_G(map, freqs, static_cast<double>(total), args.delta, *povm.sym);
      break;
  }

  const FeasibilityOutcome outcome = gme_certify(region, args.qubits);
  Json j;
  j["config"] = std::move(config);
  j["region"] = region_report(region);
  j["outcome"] = outcome_report(outcome);
  j["gme_certified"] = outcome.status == FeasibilityStatus::empty_within_margin;
  emit(args.out, json_text(j));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"confidence regions for quantum state tomography"};
  app.require_subcommand(1);

  SchemeEmitArgs scheme_args;
  std::string scheme_out, region_out, certify_out;
  CLI::App* scheme = app.add_subcommand("scheme", "measurement scheme utilities");
  scheme->require_subcommand(1);
  CLI::App* scheme_emit = scheme->add_subcommand("emit", "write a built-in scheme as JSON");
  scheme_emit->add_option("--scheme", scheme_args.scheme, "pauli-bases | pauli-observables | sic")
      ->required();
  scheme_emit->add_option("--qubits", scheme_args.qubits, "number of qubits")->required();
  scheme_emit->add_option("--out", scheme_out, "output path (default stdout)");

  RegionArgs region_args;
  CLI::App* region = app.add_subcommand("region", "confidence region from measured counts");
  region->add_option("--povm", region_args.povm_path, "measurement scheme JSON")->required();
  region->add_option("--counts", region_args.counts_path, "counts JSON")->required();
  region->add_option("--kind", region_args.kind, "region kind: A | B | R | G")->required();
  region->add_option("--delta", region_args.delta, "1 - confidence level")->required();
  region->add_option("--out", region_out, "output path (default stdout)");

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo experiments");
  simulate->require_subcommand(1);

  RatiosArgs ratios_args;
  CLI::App* ratios = simulate->add_subcommand("ratios", "region tightness ratios");
  ratios->add_option("--scheme", ratios_args.scheme, "measurement scheme name");
  ratios->add_option("--qubits", ratios_args.qubits, "number of qubits");
  ratios->add_option("--state", ratios_args.state, "state family");
  ratios->add_option("--t", ratios_args.t, "depolarized weight");
  ratios->add_option("--N", ratios_args.n_samples, "samples per trial")->required();
  ratios->add_option("--delta", ratios_args.delta, "1 - confidence level");
  ratios->add_option("--trials", ratios_args.trials, "Monte Carlo trials");
  ratios->add_option("--seed", ratios_args.seed, "master seed")->required();
  ratios->add_option("--workers", ratios_args.workers, "worker threads");
  ratios->add_option("--out", ratios_args.out, "output base path")->required();

  DistinguishArgs dist_args;
  CLI::App* dist = simulate->add_subcommand("distinguish", "sample count to separate regions");
  dist->add_option("--pair", dist_args.pair, "state pair: ghz-w | zero-one")->required();
  dist->add_option("--scheme", dist_args.scheme, "measurement scheme name");
  dist->add_option("--qubits", dist_args.qubits, "number of qubits");
  dist->add_option("--t", dist_args.t, "depolarized weight for both states");
  dist->add_option("--delta", dist_args.delta, "1 - confidence level");
  dist->add_option("--trials", dist_args.trials, "trials per probe");
  dist->add_option("--seed", dist_args.seed, "master seed")->required();
  dist->add_option("--target", dist_args.target, "target non-overlap fraction");
  dist->add_option("--band", dist_args.band, "acceptance band around the target");
  dist->add_option("--n-lo", dist_args.n_lo, "search lower bound");
  dist->add_option("--n-hi", dist_args.n_hi, "search upper bound");
  dist->add_option("--steps", dist_args.steps, "bisection steps");
  dist->add_option("--kinds", dist_args.kinds, "region kinds, comma separated");
  dist->add_option("--workers", dist_args.workers, "worker threads");
  dist->add_option("--out", dist_args.out, "output base path")->required();

  CertifyArgs certify_args;
  CLI::App* certify = app.add_subcommand("certify", "certification runs");
  certify->require_subcommand(1);
  CLI::App* gme = certify->add_subcommand("gme", "genuine multipartite entanglement");
  gme->add_option("--state", certify_args.state, "state family: ghz | w");
  gme->add_option("--t", certify_args.t, "depolarized weight");
  gme->add_option("--qubits", certify_args.qubits, "number of qubits (3 or 4)");
  gme->add_option("--N", certify_args.n_samples, "samples for the simulated counts");
  gme->add_option("--delta", certify_args.delta, "1 - confidence level");
  CLI::Option* seed_opt = gme->add_option("--seed", certify_args.seed, "sampling seed");
  gme->add_option("--scheme", certify_args.scheme, "measurement scheme name");
  gme->add_option("--kind", certify_args.kind, "region kind");
  gme->add_option("--povm", certify_args.povm_path, "measured-data scheme JSON");
  gme->add_option("--counts", certify_args.counts_path, "measured-data counts JSON");
  gme->add_option("--out", certify_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (scheme_emit->parsed()) {
      if (!scheme_out.empty()) scheme_args.out = scheme_out;
      run_scheme_emit(scheme_args);
    } else if (region->parsed()) {
      if (!region_out.empty()) region_args.out = region_out;
      run_region(region_args);
    } else if (ratios->parsed()) {
      run_sim_ratios(ratios_args);
    } else if (dist->parsed()) {
      run_sim_distinguish(dist_args);
    } else if (gme->parsed()) {
      certify_args.seeded = seed_opt->count() > 0;
      if (!certify_out.empty()) certify_args.out = certify_out;
      run_certify_gme(certify_args);
    }
  } catch (const std::exception& e) {
    std::cerr << "qcr: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
