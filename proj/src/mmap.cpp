#include "qcr/mmap.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

namespace qcr {

MeasurementMap build_map(const Povm& povm) {
  const int d = povm.dim;
  const int n = static_cast<int>(povm.effects.size());
  MeasurementMap map;
  map.dim = d;
  map.n_out = n;
  map.mat.resize(n, d * d);
  for (int a = 0; a < n; ++a) {
    map.mat.row(a) = vectorize(povm.effects[a]).transpose();
  }

  Eigen::JacobiSVD<RealMatrix> svd(map.mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sv = svd.singularValues();
  const double cutoff = 1e-10 * sv(0);
  RealVector inv = RealVector::Zero(sv.size());
  map.rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) {
      inv(i) = 1.0 / sv(i);
      ++map.rank;
    }
  }
  map.pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  map.complete = (map.rank == d * d);

  Eigen::SelfAdjointEigenSolver<RealMatrix> es(map.mat.transpose() * map.mat);
  map.gram_eigs = es.eigenvalues();
  map.gram_vecs = es.eigenvectors();
  return map;
}

HermOp estimate_state(const MeasurementMap& map, const RealVector& freqs) {
  if (freqs.size() != map.n_out) {
    throw std::invalid_argument("estimate_state: frequency vector length mismatch");
  }
  if (freqs.minCoeff() < -1e-12) {
    throw std::invalid_argument("estimate_state: negative frequency");
  }
  if (std::abs(freqs.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("estimate_state: frequencies must sum to 1");
  }
  return unvectorize(map.pinv * freqs);
}

RealVector probabilities(const MeasurementMap& map, const HermOp& rho) {
  return map.mat * vectorize(rho);
}

double col_norm_max(const RealMatrix& g) {
  return g.colwise().norm().maxCoeff();
}

PauliClosedForms pauli_closed_forms(int qubits) {
  if (qubits < 1 || qubits > 3) {
    throw std::invalid_argument("pauli_closed_forms: oracle limited to 1..3 qubits");
  }
  const int q = qubits;
  long long n_settings = 1;
  for (int k = 0; k < q; ++k) n_settings *= 3;
  const long long n_half = 1LL << q;
  const long long n = n_settings * n_half;
  const long long dim = n_half;

  PauliClosedForms out;

  // decode flat outcome -> per-qubit (axis in 1..3, sign in {+1,-1})
  auto decode = [&](long long flat, std::vector<int>& axes, std::vector<int>& signs) {
    long long sidx = flat / n_half, aidx = flat % n_half;
    for (int k = q - 1; k >= 0; --k) {
      axes[k] = static_cast<int>(sidx % 3) + 1;
      sidx /= 3;
    }
    for (int k = 0; k < q; ++k) {
      signs[k] = ((aidx >> (q - 1 - k)) & 1) ? -1 : +1;
    }
  };

  // pinv column for outcome (a, s) is v of the tensor product of 3 P_{a|s} - 1
  out.pinv.resize(dim * dim, n);
  std::vector<int> axes(q), signs(q);
  Matrix id2 = Matrix::Identity(2, 2);
  for (long long flat = 0; flat < n; ++flat) {
    decode(flat, axes, signs);
    Matrix op(1, 1);
    op(0, 0) = Cplx(1, 0);
    for (int k = 0; k < q; ++k) {
      Matrix proj = 0.5 * (id2 + static_cast<double>(signs[k]) * pauli(axes[k]));
      op = kron(op, 3.0 * proj - id2);
    }
    out.pinv.col(flat) = vectorize(op);
  }

  for (int chi = 0; chi <= q; ++chi) {
    out.gram_eigs.push_back(std::pow(3.0, chi - 2 * q));
    long long binom = 1;
    for (int k = 0; k < chi; ++k) binom = binom * (q - k) / (k + 1);
    long long mult = binom;
    for (int k = 0; k < q - chi; ++k) mult *= 3;
    out.gram_mults.push_back(mult);
  }

  out.pinv_gram.resize(n, n);
  std::vector<int> axes2(q), signs2(q);
  const double scale = std::pow(2.0, -q);
  for (long long i = 0; i < n; ++i) {
    decode(i, axes, signs);
    for (long long j = 0; j < n; ++j) {
      decode(j, axes2, signs2);
      double v = scale;
      for (int k = 0; k < q; ++k) {
        v *= 1.0 + 9.0 * signs[k] * signs2[k] * (axes[k] == axes2[k] ? 1.0 : 0.0);
      }
      out.pinv_gram(i, j) = v;
    }
  }
  return out;
}

namespace {

RealMatrix mode_matrix(const MeasurementMap& map, NormMode mode) {
  return mode == NormMode::A ? map.pinv : RealMatrix(map.mat * map.pinv);
}

}  // namespace

LeftInverseBounds left_inverse_bounds(const MeasurementMap& map, NormMode mode) {
  if (!map.complete) {
    throw std::invalid_argument("measurement not tomographically complete");
  }
  const RealMatrix q = mode_matrix(map, mode);
  const RealVector col_norms = q.colwise().norm();
  LeftInverseBounds b;
  b.upper = col_norms.maxCoeff();
  b.lower = q.squaredNorm() / col_norms.sum();
  b.pinv_is_optimal = (b.upper - col_norms.minCoeff()) < 1e-9 * std::max(1.0, b.upper);
  return b;
}

LeftInverse optimize_left_inverse(const MeasurementMap& map, NormMode mode, int iters,
                                  double step_scale) {
  if (!map.complete) {
    throw std::invalid_argument("measurement not tomographically complete");
  }
  LeftInverse li;
  li.base = map;

  // rows spanning ker(M^T) = left singular directions with zero singular value
  Eigen::JacobiSVD<RealMatrix> svd(map.mat, Eigen::ComputeFullU);
  const int kdim = map.n_out - map.rank;
  li.kernel_basis = svd.matrixU().rightCols(kdim).transpose();
  li.correction = RealMatrix::Zero(map.dim * map.dim, kdim);

  const RealMatrix q0 = mode_matrix(map, mode);
  auto objective = [&](const RealMatrix& x) {
    RealMatrix g = q0;
    if (kdim > 0) {
      if (mode == NormMode::A) {
        g += x * li.kernel_basis;
      } else {
        g += map.mat * (x * li.kernel_basis);
      }
    }
    return col_norm_max(g);
  };

  double best = objective(li.correction);
  li.objective = best;
  if (kdim == 0) return li;  // pseudoinverse is the unique left inverse

  const LeftInverseBounds bounds = left_inverse_bounds(map, mode);
  RealMatrix x = li.correction;
  RealMatrix x_best = x;
  const double f0 = best;
  for (int it = 1; it <= iters; ++it) {
    // column achieving the max norm of Q + P X K, and its unit direction
    RealMatrix g = q0;
    if (mode == NormMode::A) {
      g += x * li.kernel_basis;
    } else {
      g += map.mat * (x * li.kernel_basis);
    }
    Eigen::Index amax = 0;
    g.colwise().norm().maxCoeff(&amax);
    const double f = g.col(amax).norm();
    if (f < best) {
      best = f;
      x_best = x;
    }
    RealVector u = g.col(amax) / std::max(f, 1e-300);
    RealVector pu = mode == NormMode::A ? u : RealVector(map.mat.transpose() * u);
    RealVector ka = li.kernel_basis.col(amax);
    RealMatrix grad = pu * ka.transpose();
    const double gn = grad.norm();
    if (gn < 1e-14) break;  // active column orthogonal to the kernel: stationary
    x -= (step_scale * f0 / (gn * std::sqrt(static_cast<double>(it)))) * grad;
  }
  li.correction = x_best;
  li.objective = best;
  li.converged = (best - bounds.lower) <= 1e-5 * std::max(1.0, bounds.lower) ||
                 best < f0 - 1e-12;
  return li;
}

}  // namespace qcr
