#include "qcr/herm.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace qcr {

namespace {

double max_abs_entry(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

HermOp::HermOp(Matrix entries) : mat_(std::move(entries)) {
  if (mat_.rows() < 1 || mat_.rows() != mat_.cols()) {
    throw std::invalid_argument("HermOp: matrix must be square with dim >= 1");
  }
  const double scale = max_abs_entry(mat_);
  const double dev = max_abs_entry(mat_ - mat_.adjoint());
  if (scale > 0.0 && dev > 1e-12 * scale) {
    throw std::invalid_argument("HermOp: matrix is not Hermitian within tolerance");
  }
}

HermOp HermOp::identity(int dim) {
  return HermOp(Matrix::Identity(dim, dim), Trusted{});
}

HermOp HermOp::zero(int dim) { return HermOp(Matrix::Zero(dim, dim), Trusted{}); }

HermOp herm_trusted(Matrix entries) {
  return HermOp(std::move(entries), HermOp::Trusted{});
}

HermOp operator+(const HermOp& a, const HermOp& b) {
  return herm_trusted(a.mat() + b.mat());
}

HermOp operator-(const HermOp& a, const HermOp& b) {
  return herm_trusted(a.mat() - b.mat());
}

HermOp operator*(double s, const HermOp& a) { return herm_trusted(s * a.mat()); }

RealVector vectorize(const Matrix& a) {
  const auto d = a.rows();
  RealVector coords(d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      coords(i * d + j) = a(i, j).real() + a(i, j).imag();
    }
  }
  return coords;
}

RealVector vectorize(const HermOp& a) { return vectorize(a.mat()); }

HermOp unvectorize(const RealVector& coords) {
  const auto len = coords.size();
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(len))));
  if (d * d != len || d < 1) {
    throw std::invalid_argument("unvectorize: length is not a perfect square");
  }
  RealMatrix v(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      v(i, j) = coords(i * d + j);
    }
  }
  const RealMatrix sym = 0.5 * (v + v.transpose());
  const RealMatrix asym = 0.5 * (v - v.transpose());
  Matrix a = sym.cast<Cplx>() + Cplx(0.0, 1.0) * asym.cast<Cplx>();
  return HermOp(std::move(a), HermOp::Trusted{});
}

OperatorNorms norms(const HermOp& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat(), Eigen::EigenvaluesOnly);
  const RealVector ev = es.eigenvalues();
  return OperatorNorms{a.mat().norm(), ev.cwiseAbs().maxCoeff(), ev.cwiseAbs().sum()};
}

double hs_norm(const Matrix& a) { return a.norm(); }

double spectral_norm(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix psd_clip(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  RealVector ev = es.eigenvalues().cwiseMax(0.0);
  Matrix out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

HermOp psd_project(const HermOp& a) {
  return HermOp(psd_clip(a.mat()), HermOp::Trusted{});
}

double min_eigenvalue(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << Cplx(0, 0), Cplx(1, 0), Cplx(1, 0), Cplx(0, 0);
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << Cplx(0, 0), Cplx(0, -1), Cplx(0, 1), Cplx(0, 0);
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << Cplx(1, 0), Cplx(0, 0), Cplx(0, 0), Cplx(-1, 0);
  return m;
}

Matrix pauli(int index) {
  switch (index) {
    case 0:
      return Matrix::Identity(2, 2);
    case 1:
      return pauli_x();
    case 2:
      return pauli_y();
    case 3:
      return pauli_z();
    default:
      throw std::invalid_argument("pauli: index must be in 0..3");
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

}  // namespace qcr
