#include "qcr/schemes.hpp"

#include <cmath>
#include <stdexcept>

namespace qcr {

SymmetricSpec make_symmetric_spec(int d, int r, int n, int q) {
  if (d < 2 || r < 1 || r > d || n < 1 || q < 1) {
    throw std::invalid_argument("SymmetricSpec: need d >= 2, 1 <= r <= d, n >= 1, q >= 1");
  }
  SymmetricSpec spec{d, r, n, q};
  if (r == d) {
    throw std::invalid_argument("SymmetricSpec: r = d is a trivial measurement (beta <= 0)");
  }
  if (static_cast<double>(n) * r < static_cast<double>(d) * d) {
    throw std::invalid_argument("SymmetricSpec: n < d^2/r cannot be informationally complete");
  }
  if (spec.beta() <= 0.0) {
    throw std::invalid_argument("SymmetricSpec: beta <= 0");
  }
  return spec;
}

std::string to_string(SchemeTag tag) {
  switch (tag) {
    case SchemeTag::pauli_bases: return "pauli_bases";
    case SchemeTag::pauli_observables: return "pauli_observables";
    case SchemeTag::local_symmetric: return "local_symmetric";
    case SchemeTag::custom: return "custom";
  }
  return "custom";
}

namespace {

void check_setting(const Setting& s, int dim) {
  if (s.weight <= 0.0 || s.weight > 1.0) {
    throw std::invalid_argument("setting '" + s.label + "': weight must be in (0,1]");
  }
  Matrix sum = Matrix::Zero(dim, dim);
  for (const HermOp& e : s.effects) {
    if (e.dim() != dim) {
      throw std::invalid_argument("setting '" + s.label + "': effect dimension mismatch");
    }
    if (min_eigenvalue(e.mat()) < -1e-10) {
      throw std::invalid_argument("setting '" + s.label + "': effect is not positive semidefinite");
    }
    sum += e.mat();
  }
  if (hs_norm(sum - Matrix::Identity(dim, dim)) > 1e-10 * std::sqrt(static_cast<double>(dim))) {
    throw std::invalid_argument("setting '" + s.label + "': effects do not sum to the identity");
  }
}

}  // namespace

Povm merge_settings(const std::vector<Setting>& settings) {
  if (settings.empty()) throw std::invalid_argument("merge_settings: no settings");
  const int dim = settings.front().effects.empty()
                      ? 0
                      : settings.front().effects.front().dim();
  if (dim == 0) throw std::invalid_argument("merge_settings: first setting has no effects");
  double wsum = 0.0;
  for (const Setting& s : settings) wsum += s.weight;
  if (std::abs(wsum - 1.0) > 1e-12) {
    throw std::invalid_argument("merge_settings: weights must sum to 1");
  }
  Povm povm;
  povm.dim = dim;
  povm.scheme_tag = SchemeTag::custom;
  for (const Setting& s : settings) {
    check_setting(s, dim);
    for (std::size_t a = 0; a < s.effects.size(); ++a) {
      povm.effects.push_back(s.weight * s.effects[a]);
      povm.outcome_index.emplace_back(s.label, std::to_string(a));
    }
  }
  return povm;
}

void validate_povm(const Povm& povm) {
  Matrix sum = Matrix::Zero(povm.dim, povm.dim);
  for (const HermOp& e : povm.effects) {
    if (min_eigenvalue(e.mat()) < -1e-10) {
      throw std::invalid_argument("povm: effect is not positive semidefinite");
    }
    sum += e.mat();
  }
  if (hs_norm(sum - Matrix::Identity(povm.dim, povm.dim)) > 1e-10 * std::sqrt(povm.dim)) {
    throw std::invalid_argument("povm: effects do not sum to the identity");
  }
}

namespace {

// effects (1 +/- sigma)/2 of one Pauli basis, outcome +1 first
std::pair<HermOp, HermOp> basis_projectors(const Matrix& sigma) {
  Matrix id = Matrix::Identity(2, 2);
  return {herm_trusted(0.5 * (id + sigma)), herm_trusted(0.5 * (id - sigma))};
}

const char kAxisName[3] = {'X', 'Y', 'Z'};

void check_tensor_budget(long long outcomes, long long dim) {
  // entries of the flat effect table
  const long long entries = outcomes * dim * dim;
  if (entries > kMaxTensorEntries) {
    throw std::invalid_argument(
        "tensor scheme table needs " + std::to_string(entries) +
        " complex entries, above the desk-scale cap of " + std::to_string(kMaxTensorEntries) +
        "; use the closed-form constants instead of a materialized measurement");
  }
}

}  // namespace

std::vector<Setting> pauli_bases_settings(int qubits) {
  if (qubits < 1 || qubits > 7) {
    throw std::invalid_argument("pauli bases: qubits must be in 1..7");
  }
  const int q = qubits;
  long long n_settings = 1, n_out = 1, dim = 1;
  for (int k = 0; k < q; ++k) {
    n_settings *= 3;
    n_out *= 2;
    dim *= 2;
  }
  check_tensor_budget(n_settings * n_out, dim);
  const double weight = 1.0 / static_cast<double>(n_settings);
  std::vector<Setting> settings;
  settings.reserve(n_settings);
  for (long long sidx = 0; sidx < n_settings; ++sidx) {
    // axis per qubit, qubit 0 most significant
    std::string label(q, '?');
    std::vector<int> axes(q);
    long long rem = sidx;
    for (int k = q - 1; k >= 0; --k) {
      axes[k] = static_cast<int>(rem % 3);
      rem /= 3;
      label[k] = kAxisName[axes[k]];
    }
    Setting s;
    s.label = label;
    s.weight = weight;
    s.effects.reserve(n_out);
    for (long long aidx = 0; aidx < n_out; ++aidx) {
      Matrix eff(1, 1);
      eff(0, 0) = Cplx(1, 0);
      for (int k = 0; k < q; ++k) {
        const int bit = static_cast<int>((aidx >> (q - 1 - k)) & 1);  // 0 -> +1, 1 -> -1
        auto [plus, minus] = basis_projectors(pauli(axes[k] + 1));
        eff = kron(eff, bit ? minus.mat() : plus.mat());
      }
      s.effects.push_back(HermOp(std::move(eff)));
    }
    settings.push_back(std::move(s));
  }
  return settings;
}

namespace {

std::string sign_string(long long aidx, int q) {
  std::string s(q, '+');
  for (int k = 0; k < q; ++k) {
    if ((aidx >> (q - 1 - k)) & 1) s[k] = '-';
  }
  return s;
}

}  // namespace

Povm build_pauli_bases(int qubits) {
  std::vector<Setting> settings = pauli_bases_settings(qubits);
  Povm povm = merge_settings(settings);
  // re-label outcomes as sign strings (merge numbers them 0..2^q-1 in order)
  const long long n_out = 1LL << qubits;
  for (std::size_t flat = 0; flat < povm.outcome_index.size(); ++flat) {
    povm.outcome_index[flat].second = sign_string(static_cast<long long>(flat) % n_out, qubits);
  }
  povm.scheme_tag = SchemeTag::pauli_bases;
  povm.sym = make_symmetric_spec(2, 1, 6, qubits);
  return povm;
}

std::vector<Setting> pauli_observables_settings(int qubits) {
  if (qubits < 1 || qubits > 3) {
    throw std::invalid_argument("pauli observables: qubits must be in 1..3");
  }
  const int Q = qubits;
  const long long dim = 1LL << Q;
  const long long n_strings = [&] {
    long long p = 1;
    for (int k = 0; k < 2 * Q; ++k) p *= 2;
    return p - 1;  // 4^Q - 1 non-identity Pauli strings
  }();
  const double weight = 1.0 / static_cast<double>(dim * dim - 1);
  const char name[4] = {'I', 'X', 'Y', 'Z'};
  std::vector<Setting> settings;
  settings.reserve(n_strings);
  for (long long sidx = 1; sidx <= n_strings; ++sidx) {
    std::string label(Q, 'I');
    Matrix sigma(1, 1);
    sigma(0, 0) = Cplx(1, 0);
    long long rem = sidx;
    std::vector<int> digits(Q);
    for (int k = Q - 1; k >= 0; --k) {
      digits[k] = static_cast<int>(rem % 4);
      rem /= 4;
    }
    for (int k = 0; k < Q; ++k) {
      label[k] = name[digits[k]];
      sigma = kron(sigma, pauli(digits[k]));
    }
    Matrix id = Matrix::Identity(dim, dim);
    Setting s;
    s.label = label;
    s.weight = weight;
    s.effects.push_back(herm_trusted(0.5 * (id + sigma)));
    s.effects.push_back(herm_trusted(0.5 * (id - sigma)));
    settings.push_back(std::move(s));
  }
  return settings;
}

Povm build_pauli_observables(int qubits) {
  Povm povm = merge_settings(pauli_observables_settings(qubits));
  for (std::size_t flat = 0; flat < povm.outcome_index.size(); ++flat) {
    povm.outcome_index[flat].second = (flat % 2 == 0) ? "+" : "-";
  }
  povm.scheme_tag = SchemeTag::pauli_observables;
  const int d = 1 << qubits;
  povm.sym = make_symmetric_spec(d, d / 2, 2 * (d * d - 1), 1);
  return povm;
}

std::vector<Setting> qubit_sic_settings() {
  const double s = 1.0 / std::sqrt(3.0);
  const double bloch[4][3] = {
      {s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  Setting setting;
  setting.label = "sic";
  setting.weight = 1.0;
  Matrix id = Matrix::Identity(2, 2);
  for (const auto& x : bloch) {
    Matrix proj = 0.5 * (id + x[0] * pauli_x() + x[1] * pauli_y() + x[2] * pauli_z());
    setting.effects.push_back(herm_trusted(0.5 * proj));
  }
  return {setting};
}

Povm build_qubit_sic() {
  Povm povm = merge_settings(qubit_sic_settings());
  povm.scheme_tag = SchemeTag::local_symmetric;
  povm.sym = make_symmetric_spec(2, 1, 4, 1);
  return povm;
}

std::vector<Setting> tensor_settings(const std::vector<Setting>& local, int q) {
  if (q < 1) throw std::invalid_argument("tensor_settings: q must be >= 1");
  if (local.empty()) throw std::invalid_argument("tensor_settings: empty local scheme");
  const int d = local.front().effects.front().dim();
  long long n_settings = 1, dim = 1;
  long long outcomes_per_setting = 1;
  for (int k = 0; k < q; ++k) {
    n_settings *= static_cast<long long>(local.size());
    dim *= d;
    outcomes_per_setting *= static_cast<long long>(local.front().effects.size());
  }
  check_tensor_budget(n_settings * outcomes_per_setting, dim);

  std::vector<Setting> out;
  out.reserve(n_settings);
  std::vector<int> sel(q, 0);
  for (long long sidx = 0; sidx < n_settings; ++sidx) {
    long long rem = sidx;
    for (int k = q - 1; k >= 0; --k) {
      sel[k] = static_cast<int>(rem % local.size());
      rem /= static_cast<long long>(local.size());
    }
    Setting s;
    s.weight = 1.0;
    for (int k = 0; k < q; ++k) {
      if (k) s.label += ".";
      s.label += local[sel[k]].label;
      s.weight *= local[sel[k]].weight;
    }
    // all outcome tuples of the chosen per-qudit settings
    std::vector<Matrix> acc{Matrix::Identity(1, 1)};
    std::vector<std::size_t> counts(q);
    long long n_out = 1;
    for (int k = 0; k < q; ++k) {
      counts[k] = local[sel[k]].effects.size();
      n_out *= static_cast<long long>(counts[k]);
    }
    s.effects.reserve(n_out);
    for (long long aidx = 0; aidx < n_out; ++aidx) {
      long long arem = aidx;
      std::vector<int> outc(q);
      for (int k = q - 1; k >= 0; --k) {
        outc[k] = static_cast<int>(arem % counts[k]);
        arem /= static_cast<long long>(counts[k]);
      }
      Matrix eff(1, 1);
      eff(0, 0) = Cplx(1, 0);
      for (int k = 0; k < q; ++k) {
        eff = kron(eff, local[sel[k]].effects[outc[k]].mat());
      }
      s.effects.push_back(HermOp(std::move(eff)));
    }
    out.push_back(std::move(s));
  }
  return out;
}

Povm tensor_local_scheme(const Povm& local, int q) {
  if (!local.sym) {
    throw std::invalid_argument("tensor_local_scheme: local scheme must carry symmetric-measurement parameters");
  }
  if (local.sym->q != 1) {
    throw std::invalid_argument("tensor_local_scheme: local scheme must be single-qudit");
  }
  // rebuild a settings view of the local scheme: group flat effects by setting label
  std::vector<Setting> locals;
  for (std::size_t a = 0; a < local.effects.size(); ++a) {
    const std::string& lbl = local.outcome_index[a].first;
    if (locals.empty() || locals.back().label != lbl) {
      locals.push_back(Setting{lbl, 0.0, {}});
    }
    locals.back().effects.push_back(local.effects[a]);
  }
  // weighted flat effects within one setting sum to weight * identity
  for (Setting& s : locals) {
    Matrix sum = Matrix::Zero(local.dim, local.dim);
    for (const HermOp& e : s.effects) sum += e.mat();
    s.weight = sum.trace().real() / static_cast<double>(local.dim);
    const double inv = 1.0 / s.weight;
    for (HermOp& e : s.effects) e = inv * e;
  }
  Povm povm = merge_settings(tensor_settings(locals, q));
  povm.scheme_tag = local.scheme_tag == SchemeTag::custom ? SchemeTag::custom
                                                          : SchemeTag::local_symmetric;
  povm.sym = make_symmetric_spec(local.sym->d, local.sym->r, local.sym->n, q);
  return povm;
}

Matrix swap_operator(int d) {
  Matrix s = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      s(i * d + j, j * d + i) = Cplx(1, 0);
    }
  }
  return s;
}

double symcond_residual(const std::vector<HermOp>& weighted_effects, const SymmetricSpec& spec) {
  const int d = spec.d;
  Matrix sum = Matrix::Zero(d * d, d * d);
  for (const HermOp& e : weighted_effects) {
    sum += kron(e.mat(), e.mat());
  }
  sum -= spec.alpha() * swap_operator(d);
  sum -= spec.beta() * Matrix::Identity(d * d, d * d);
  return hs_norm(sum);
}

Povm build_named_scheme(const std::string& name, int qubits) {
  if (qubits < 1) throw std::invalid_argument("build_named_scheme: qubits must be >= 1");
  if (name == "pauli-bases") return build_pauli_bases(qubits);
  if (name == "pauli-observables") return build_pauli_observables(qubits);
  if (name == "sic") {
    return qubits == 1 ? build_qubit_sic() : tensor_local_scheme(build_qubit_sic(), qubits);
  }
  throw std::invalid_argument("unknown scheme name: " + name +
                              " (expected pauli-bases, pauli-observables or sic)");
}

std::vector<Setting> named_scheme_settings(const std::string& name, int qubits) {
  if (qubits < 1) throw std::invalid_argument("named_scheme_settings: qubits must be >= 1");
  if (name == "pauli-bases") return pauli_bases_settings(qubits);
  if (name == "pauli-observables") return pauli_observables_settings(qubits);
  if (name == "sic") {
    return qubits == 1 ? qubit_sic_settings() : tensor_settings(qubit_sic_settings(), qubits);
  }
  throw std::invalid_argument("unknown scheme name: " + name +
                              " (expected pauli-bases, pauli-observables or sic)");
}

}  // namespace qcr
