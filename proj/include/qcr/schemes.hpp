#pragma once
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcr/herm.hpp"

namespace qcr {

// One measurement setting: a complete POVM {E'_{a|s}} applied with probability
// weight (the sampling weight q_s of this setting in the overall experiment).
struct Setting {
  std::string label;
  double weight = 1.0;
  std::vector<HermOp> effects;
};

// Parameters of a local symmetric measurement: n rank-r projector effects
// scaled by theta = d/(n r) so that sum_a E_a (x) E_a = alpha * SWAP + beta * 1.
struct SymmetricSpec {
  int d = 2;
  int r = 1;
  int n = 0;
  int q = 1;  // number of qudits measured with the local scheme
  double theta() const { return static_cast<double>(d) / (static_cast<double>(n) * r); }
  double alpha() const { return theta() * (d - r) / (static_cast<double>(d) * d - 1.0); }
  double beta() const { return theta() - alpha() * d; }
};

SymmetricSpec make_symmetric_spec(int d, int r, int n, int q);

enum class SchemeTag { pauli_bases, pauli_observables, local_symmetric, custom };

std::string to_string(SchemeTag tag);

// A single generalized measurement: the flat list of weighted effects
// E_a = q_s E'_{a|s}, summing to the identity.
struct Povm {
  int dim = 0;
  std::vector<HermOp> effects;
  // flat outcome index -> (setting label, outcome label)
  std::vector<std::pair<std::string, std::string>> outcome_index;
  SchemeTag scheme_tag = SchemeTag::custom;
  std::optional<SymmetricSpec> sym;
};

// Largest tensor-product effect table we are willing to materialize,
// measured in complex matrix entries (n_outcomes * d^2).
inline constexpr long long kMaxTensorEntries = 1LL << 24;

// Setting-structured forms of the built-in schemes (what `scheme emit` writes).
std::vector<Setting> pauli_bases_settings(int qubits);
std::vector<Setting> pauli_observables_settings(int qubits);
std::vector<Setting> qubit_sic_settings();

Povm build_pauli_bases(int qubits);
Povm build_pauli_observables(int qubits);
Povm build_qubit_sic();

// Tensor q copies of a single-qudit setting list (labels concatenate,
// weights multiply, effects tensor). Rejects tables over kMaxTensorEntries.
std::vector<Setting> tensor_settings(const std::vector<Setting>& local, int q);
Povm tensor_local_scheme(const Povm& local, int q);

// "pauli-bases", "pauli-observables" or "sic" (tensored beyond one qubit)
Povm build_named_scheme(const std::string& name, int qubits);
std::vector<Setting> named_scheme_settings(const std::string& name, int qubits);

// Flatten settings into one generalized measurement E_a = q_s E'_{a|s}.
// Validates weights (sum 1), per-setting completeness and positivity.
Povm merge_settings(const std::vector<Setting>& settings);

// min eigenvalue over effects and ||sum E - 1||_HS; throws if out of tolerance
void validate_povm(const Povm& povm);

// HS-norm residual of sum_a E_a (x) E_a - alpha SWAP - beta 1 for the local
// (q=1) weighted effects.
double symcond_residual(const std::vector<HermOp>& weighted_effects, const SymmetricSpec& spec);

Matrix swap_operator(int d);

}  // namespace qcr
