#include "qcr/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace qcr {

Json matrix_to_json(const Matrix& a) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      row.push_back(Json::array({a(i, j).real(), a(i, j).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument("matrix: expected a non-empty array of rows");
  }
  const std::size_t nrows = j.size();
  std::size_t ncols = 0;
  Matrix a;
  for (std::size_t i = 0; i < nrows; ++i) {
    const Json& row = j[i];
    if (!row.is_array() || row.empty()) {
      throw std::invalid_argument("matrix: expected a non-empty array of rows");
    }
    if (i == 0) {
      ncols = row.size();
      a.resize(static_cast<Eigen::Index>(nrows), static_cast<Eigen::Index>(ncols));
    } else if (row.size() != ncols) {
      throw std::invalid_argument("matrix: rows have differing lengths");
    }
    for (std::size_t k = 0; k < ncols; ++k) {
      const Json& entry = row[k];
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
          !entry[1].is_number()) {
        throw std::invalid_argument("matrix entry: expected [re, im]");
      }
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          Cplx(entry[0].get<double>(), entry[1].get<double>());
    }
  }
  return a;
}

Json scheme_to_json(int dim, const std::vector<Setting>& settings,
                    const std::optional<std::string>& name, int qubits) {
  Json j;
  j["dimension"] = dim;
  if (name) {
    j["scheme"] = Json{{"name", *name}, {"qubits", qubits}};
  }
  Json list = Json::array();
  for (const Setting& s : settings) {
    Json js;
    js["label"] = s.label;
    js["weight"] = s.weight;
    Json effects = Json::array();
    for (const HermOp& e : s.effects) effects.push_back(matrix_to_json(e.mat()));
    js["effects"] = std::move(effects);
    list.push_back(std::move(js));
  }
  j["settings"] = std::move(list);
  return j;
}

LoadedScheme scheme_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dimension") || !j.contains("settings")) {
    throw std::invalid_argument("scheme file: expected {dimension, settings}");
  }
  LoadedScheme out;
  if (!j["dimension"].is_number_integer() || (out.dim = j["dimension"].get<int>()) < 2) {
    throw std::invalid_argument("scheme file: dimension must be an integer >= 2");
  }
  if (j.contains("scheme")) {
    const Json& meta = j["scheme"];
    if (!meta.is_object() || !meta.contains("name") || !meta.contains("qubits")) {
      throw std::invalid_argument("scheme file: scheme metadata needs {name, qubits}");
    }
    out.name = meta["name"].get<std::string>();
    out.qubits = meta["qubits"].get<int>();
  }
  const Json& list = j["settings"];
  if (!list.is_array() || list.empty()) {
    throw std::invalid_argument("scheme file: settings must be a non-empty array");
  }
  const double default_weight = 1.0 / static_cast<double>(list.size());
  for (const Json& js : list) {
    if (!js.is_object() || !js.contains("label") || !js.contains("effects")) {
      throw std::invalid_argument("scheme file: each setting needs {label, effects}");
    }
    Setting s;
    s.label = js["label"].get<std::string>();
    s.weight = js.contains("weight") ? js["weight"].get<double>() : default_weight;
    if (!js["effects"].is_array() || js["effects"].empty()) {
      throw std::invalid_argument("scheme file: effects must be a non-empty array");
    }
    for (const Json& je : js["effects"]) {
      Matrix m = matrix_from_json(je);
      if (m.rows() != out.dim || m.cols() != out.dim) {
        throw std::invalid_argument("scheme file: effect dimension does not match");
      }
      s.effects.emplace_back(std::move(m));
    }
    out.settings.push_back(std::move(s));
  }
  return out;
}

Povm resolve_scheme(const LoadedScheme& loaded) {
  Povm merged = merge_settings(loaded.settings);
  if (merged.dim != loaded.dim) {
    throw std::invalid_argument("scheme file: dimension field does not match the effects");
  }
  if (!loaded.name) return merged;
  Povm builtin = build_named_scheme(*loaded.name, loaded.qubits);
  if (builtin.dim != merged.dim || builtin.effects.size() != merged.effects.size()) {
    throw std::invalid_argument("scheme file does not match the named built-in scheme");
  }
  for (std::size_t a = 0; a < merged.effects.size(); ++a) {
    if ((builtin.effects[a].mat() - merged.effects[a].mat()).norm() > 1e-9) {
      throw std::invalid_argument("scheme file does not match the named built-in scheme");
    }
  }
  return builtin;
}

CountsData counts_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("settings") || !j["settings"].is_array() ||
      j["settings"].empty()) {
    throw std::invalid_argument("counts file: expected {settings: [...]}");
  }
  CountsData out;
  for (const Json& js : j["settings"]) {
    if (!js.is_object() || !js.contains("label") || !js.contains("counts") ||
        !js["counts"].is_array()) {
      throw std::invalid_argument("counts file: each setting needs {label, counts}");
    }
    CountsData::SettingCounts sc;
    sc.label = js["label"].get<std::string>();
    for (const Json& c : js["counts"]) {
      if (!c.is_number_integer() || c.get<long long>() < 0) {
        throw std::invalid_argument("counts file: counts must be non-negative integers");
      }
      sc.counts.push_back(c.get<long long>());
    }
    out.settings.push_back(std::move(sc));
  }
  if (j.contains("weights")) {
    if (!j["weights"].is_array()) {
      throw std::invalid_argument("counts file: weights must be an array");
    }
    std::vector<double> w;
    for (const Json& x : j["weights"]) w.push_back(x.get<double>());
    out.weights = std::move(w);
  }
  return out;
}

Json counts_to_json(const CountsData& counts) {
  Json j;
  Json list = Json::array();
  for (const auto& sc : counts.settings) {
    Json js;
    js["label"] = sc.label;
    js["counts"] = sc.counts;
    list.push_back(std::move(js));
  }
  j["settings"] = std::move(list);
  if (counts.weights) j["weights"] = *counts.weights;
  return j;
}

RealVector assemble_frequencies(const CountsData& counts, const std::vector<Setting>& settings,
                                long long* total_shots) {
  std::unordered_map<std::string, std::size_t> by_label;
  for (std::size_t i = 0; i < counts.settings.size(); ++i) {
    if (!by_label.emplace(counts.settings[i].label, i).second) {
      throw std::invalid_argument("counts file: duplicate setting '" +
                                  counts.settings[i].label + "'");
    }
  }
  if (counts.weights && counts.weights->size() != counts.settings.size()) {
    throw std::invalid_argument("counts file: weights must align with settings");
  }

  Eigen::Index n_out = 0;
  for (const Setting& s : settings) n_out += static_cast<Eigen::Index>(s.effects.size());
  RealVector f(n_out);

  long long total = 0;
  std::vector<bool> used(counts.settings.size(), false);
  Eigen::Index flat = 0;
  for (const Setting& s : settings) {
    auto it = by_label.find(s.label);
    if (it == by_label.end()) {
      throw std::invalid_argument("counts file is missing setting '" + s.label + "'");
    }
    used[it->second] = true;
    const auto& sc = counts.settings[it->second];
    if (sc.counts.size() != s.effects.size()) {
      throw std::invalid_argument("counts file: setting '" + s.label + "' expects " +
                                  std::to_string(s.effects.size()) + " outcomes");
    }
    if (counts.weights &&
        std::abs((*counts.weights)[it->second] - s.weight) > 1e-9) {
      throw std::invalid_argument("counts file: weights do not match the measurement");
    }
    long long n_s = 0;
    for (long long c : sc.counts) n_s += c;
    if (n_s < 1) {
      throw std::invalid_argument("counts file: setting '" + s.label + "' has no shots");
    }
    for (long long c : sc.counts) {
      f(flat++) = s.weight * static_cast<double>(c) / static_cast<double>(n_s);
    }
    total += n_s;
  }
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (!used[i]) {
      throw std::invalid_argument("counts file has unknown setting '" +
                                  counts.settings[i].label + "'");
    }
  }
  if (total_shots) *total_shots = total;
  return f;
}

std::vector<Setting> fixed_design_settings(const std::vector<Setting>& settings,
                                           const CountsData& counts) {
  std::unordered_map<std::string, long long> shots;
  long long total = 0;
  for (const auto& sc : counts.settings) {
    long long n_s = 0;
    for (long long c : sc.counts) n_s += c;
    shots[sc.label] += n_s;
    total += n_s;
  }
  if (total < 1) throw std::invalid_argument("counts file has no shots");
  std::vector<Setting> out = settings;
  for (Setting& s : out) {
    auto it = shots.find(s.label);
    if (it == shots.end()) {
      throw std::invalid_argument("counts file is missing setting '" + s.label + "'");
    }
    s.weight = static_cast<double>(it->second) / static_cast<double>(total);
  }
  return out;
}

Json region_report(const Region& region) {
  Json j;
  j["kind"] = to_string(region.kind);
  j["confidence"] = 1.0 - region.delta;
  j["N"] = region.N;
  j["epsilon"] = region.epsilon;
  j["sigma"] = region.sigma;
  j["radius"] = region.radius;
  j["estimate"] = matrix_to_json(region.center.mat());
  Json semiaxes = Json::array();
  for (const Semiaxis& s : region.semiaxes) {
    semiaxes.push_back(Json{{"length", s.length}, {"multiplicity", s.multiplicity}});
  }
  j["semiaxes"] = std::move(semiaxes);
  if (region.kind == RegionKind::G) j["chi2_dof"] = region.chi2_dof;
  return j;
}

Json outcome_report(const FeasibilityOutcome& outcome) {
  Json j;
  j["status"] = to_string(outcome.status);
  j["iterations"] = outcome.iterations;
  j["final_gap"] = outcome.final_gap;
  j["witness"] = outcome.witness ? matrix_to_json(outcome.witness->blocks.at(0)) : Json();
  return j;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += fields[i];
  }
  return line;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace qcr
