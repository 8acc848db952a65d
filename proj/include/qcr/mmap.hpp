#pragma once
#include <vector>

#include "qcr/schemes.hpp"

namespace qcr {

// Linear map rho -> (tr E_a rho)_a in coordinates: row a of mat is v(E_a).
// pinv is the SVD pseudoinverse with relative cutoff 1e-10 * s_max; gram
// eigenpairs of M^T M are cached (ascending eigenvalues).
struct MeasurementMap {
  int dim = 0;
  int n_out = 0;
  RealMatrix mat;        // n_out x d^2
  RealMatrix pinv;       // d^2 x n_out
  RealVector gram_eigs;  // d^2, ascending; zero entries for incomplete maps
  RealMatrix gram_vecs;  // columns are the eigendirections (coordinates)
  bool complete = false;
  int rank = 0;
};

MeasurementMap build_map(const Povm& povm);

// rho_hat = v^{-1}(pinv * f); linear, trace 1 for complete maps, not clipped to PSD
HermOp estimate_state(const MeasurementMap& map, const RealVector& freqs);

RealVector probabilities(const MeasurementMap& map, const HermOp& rho);

// largest Euclidean column norm ||G||_{2,inf}
double col_norm_max(const RealMatrix& g);

// Closed-form reference data for the Pauli-bases map on q qubits, in the same
// outcome ordering as build_pauli_bases: setting strings lexicographic in
// X<Y<Z with qubit 0 leftmost, then sign strings with + before -.
struct PauliClosedForms {
  RealMatrix pinv;              // d^2 x n_out
  std::vector<double> gram_eigs;          // distinct values 3^(chi-2q), chi = q..0
  std::vector<long long> gram_mults;      // (q choose chi) 3^(q-chi)
  RealMatrix pinv_gram;         // (M^+)^T M^+ entries 2^-q prod(1+9 a b delta)
};
PauliClosedForms pauli_closed_forms(int qubits);

enum class NormMode { A, B };  // A: columns of the left inverse; B: columns of M * left inverse

struct LeftInverseBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool pinv_is_optimal = false;
};

// Bounds on min over left inverses of the 2,inf column norm (single merged
// measurement): ||Q||_F^2 / ||Q||_{2,1} <= opt <= ||Q||_{2,inf} with Q the
// pseudoinverse quantity for the given mode.
LeftInverseBounds left_inverse_bounds(const MeasurementMap& map, NormMode mode);

struct LeftInverse {
  MeasurementMap base;
  RealMatrix kernel_basis;  // rows span ker(M^T); may have zero rows
  RealMatrix correction;    // X with G = pinv + X * kernel_basis
  double objective = 0.0;   // achieved 2,inf norm for the mode optimized
  bool converged = true;

  RealMatrix materialize() const {
    if (kernel_basis.rows() == 0) return base.pinv;
    return base.pinv + correction * kernel_basis;
  }
};

// Projected-subgradient descent on min_X || Q + P X K ||_{2,inf}; keeps the
// best iterate, never worse than the pseudoinverse.
LeftInverse optimize_left_inverse(const MeasurementMap& map, NormMode mode,
                                  int iters = 2000, double step_scale = 1.0);

}  // namespace qcr
