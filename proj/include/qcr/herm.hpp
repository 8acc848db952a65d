#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qcr {

using Cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Hermitian operator on a d-dimensional Hilbert space. Construction rejects
/// matrices whose anti-Hermitian part exceeds 1e-12 relative to the largest
/// entry magnitude; symmetrisation happens only through unvectorize().
class HermOp {
 public:
  explicit HermOp(Matrix entries);

  static HermOp identity(int dim);
  static HermOp zero(int dim);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& mat() const { return mat_; }

  Cplx operator()(int i, int j) const { return mat_(i, j); }

 private:
  struct Trusted {};
  HermOp(Matrix entries, Trusted) : mat_(std::move(entries)) {}

  Matrix mat_;

  friend HermOp unvectorize(const RealVector& coords);
  friend HermOp psd_project(const HermOp& a);
  friend HermOp herm_trusted(Matrix entries);
};

/// Wraps a matrix known to be Hermitian by construction, skipping the check.
HermOp herm_trusted(Matrix entries);

HermOp operator+(const HermOp& a, const HermOp& b);
HermOp operator-(const HermOp& a, const HermOp& b);
HermOp operator*(double s, const HermOp& a);

/// Real coordinates of a Hermitian operator: row-concatenation of
/// Re(A) + Im(A), so that vectorize(A).dot(vectorize(B)) == tr(AB).
RealVector vectorize(const HermOp& a);
RealVector vectorize(const Matrix& a);

/// Inverse of vectorize. For x outside the image this returns the symmetrised
/// reconstruction A = (V + V^T)/2 + i (V - V^T)/2 of the d x d partition V.
HermOp unvectorize(const RealVector& coords);

struct OperatorNorms {
  double hs;        // Hilbert-Schmidt (Frobenius)
  double spectral;  // largest |eigenvalue|
  double trace;     // sum of |eigenvalues|
};

OperatorNorms norms(const HermOp& a);

double hs_norm(const Matrix& a);
double spectral_norm(const Matrix& a);

/// Nearest positive semidefinite operator in Hilbert-Schmidt distance
/// (eigenvalue clipping at zero).
HermOp psd_project(const HermOp& a);

/// Low-level clip used in iterative solvers; input must be Hermitian up to
/// roundoff, output is exactly Hermitian.
Matrix psd_clip(const Matrix& a);

double min_eigenvalue(const Matrix& a);

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

/// sigma_0 = identity, sigma_1..3 = X, Y, Z.
Matrix pauli(int index);

Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace qcr
