#include "qcr/feasibility.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qcr {

std::string to_string(FeasibilityStatus status) {
  switch (status) {
    case FeasibilityStatus::feasible: return "feasible";
    case FeasibilityStatus::empty_within_margin: return "empty_within_margin";
    case FeasibilityStatus::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

double ConvexSet::distance(const ProductPoint& point) const {
  ProductPoint tmp = point;
  project(tmp);
  double d2 = 0.0;
  for (int b : blocks()) {
    d2 += (point.blocks[b] - tmp.blocks[b]).squaredNorm();
  }
  return std::sqrt(d2);
}

namespace {

class PsdConeSet final : public ConvexSet {
 public:
  explicit PsdConeSet(int block) : block_(block) {}
  std::vector<int> blocks() const override { return {block_}; }
  void project(ProductPoint& p) const override { p.blocks[block_] = psd_clip(p.blocks[block_]); }
  double distance(const ProductPoint& p) const override {
    Eigen::SelfAdjointEigenSolver<Matrix> es(p.blocks[block_], Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseMin(0.0).norm();
  }
  std::string name() const override { return "psd_cone"; }

 private:
  int block_;
};

class TraceOneSet final : public ConvexSet {
 public:
  TraceOneSet(int block, int dim) : block_(block), dim_(dim) {}
  std::vector<int> blocks() const override { return {block_}; }
  void project(ProductPoint& p) const override {
    Matrix& a = p.blocks[block_];
    a += (1.0 - a.trace().real()) / dim_ * Matrix::Identity(dim_, dim_);
  }
  double distance(const ProductPoint& p) const override {
    return std::abs(1.0 - p.blocks[block_].trace().real()) / std::sqrt(static_cast<double>(dim_));
  }
  bool affine() const override { return true; }
  std::string name() const override { return "trace_one"; }

 private:
  int block_;
  int dim_;
};

class FixedPointSet final : public ConvexSet {
 public:
  FixedPointSet(int block, Matrix value) : block_(block), value_(std::move(value)) {}
  std::vector<int> blocks() const override { return {block_}; }
  void project(ProductPoint& p) const override { p.blocks[block_] = value_; }
  double distance(const ProductPoint& p) const override {
    return (p.blocks[block_] - value_).norm();
  }
  bool affine() const override { return true; }
  std::string name() const override { return "fixed_point"; }

 private:
  int block_;
  Matrix value_;
};

class HsBallSet final : public ConvexSet {
 public:
  HsBallSet(int block, Matrix center, double radius)
      : block_(block), center_(std::move(center)), radius_(radius) {}
  std::vector<int> blocks() const override { return {block_}; }
  void project(ProductPoint& p) const override {
    Matrix diff = p.blocks[block_] - center_;
    const double d = diff.norm();
    if (d > radius_) {
      p.blocks[block_] = radius_ > 0.0 ? Matrix(center_ + (radius_ / d) * diff) : center_;
    }
  }
  double distance(const ProductPoint& p) const override {
    return std::max(0.0, (p.blocks[block_] - center_).norm() - radius_);
  }
  std::string name() const override { return "hs_ball"; }

 private:
  int block_;
  Matrix center_;
  double radius_;
};

class SpectralBallSet final : public ConvexSet {
 public:
  SpectralBallSet(int block, Matrix center, double radius)
      : block_(block), center_(std::move(center)), radius_(radius) {}
  std::vector<int> blocks() const override { return {block_}; }
  void project(ProductPoint& p) const override {
    Eigen::SelfAdjointEigenSolver<Matrix> es(p.blocks[block_] - center_);
    RealVector ev = es.eigenvalues().cwiseMax(-radius_).cwiseMin(radius_);
    p.blocks[block_] =
        center_ + es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  }
  double distance(const ProductPoint& p) const override {
    Eigen::SelfAdjointEigenSolver<Matrix> es(p.blocks[block_] - center_, Eigen::EigenvaluesOnly);
    RealVector ev = es.eigenvalues();
    double d2 = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      const double exceed = std::max(0.0, std::abs(ev(i)) - radius_);
      d2 += exceed * exceed;
    }
    return std::sqrt(d2);
  }
  std::string name() const override { return "spectral_ball"; }

 private:
  int block_;
  Matrix center_;
  double radius_;
};

class MEllipsoidSet final : public ConvexSet {
 public:
  MEllipsoidSet(int block, std::shared_ptr<const MeasurementMap> map, Matrix center,
                double radius)
      : block_(block), map_(std::move(map)), center_(std::move(center)), radius_(radius) {
    if (!map_) throw std::invalid_argument("m_ellipsoid: null map");
  }
  std::vector<int> blocks() const override { return {block_}; }

  void project(ProductPoint& p) const override {
    const RealVector w = map_->gram_vecs.transpose() *
                         vectorize(herm_trusted(p.blocks[block_] - center_));
    const RealVector& xi = map_->gram_eigs;
    double quad = 0.0;
    for (Eigen::Index j = 0; j < w.size(); ++j) quad += xi(j) * w(j) * w(j);
    const double r2 = radius_ * radius_;
    if (quad <= r2) return;

    RealVector z = w;
    if (radius_ <= 0.0) {
      for (Eigen::Index j = 0; j < w.size(); ++j) {
        if (xi(j) > 0.0) z(j) = 0.0;
      }
    } else {
      // KKT: z_j = w_j / (1 + lam xi_j) with lam >= 0 s.t. sum xi z^2 = r^2
      auto g = [&](double lam) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < w.size(); ++j) {
          const double den = 1.0 + lam * xi(j);
          s += xi(j) * w(j) * w(j) / (den * den);
        }
        return s;
      };
      double lo = 0.0, hi = 1.0;
      while (g(hi) > r2) {
        hi *= 2.0;
        if (hi > 1e300) break;
      }
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > r2) {
          lo = mid;
        } else {
          hi = mid;
        }
        if (hi - lo < 1e-16 * std::max(1.0, hi)) break;
      }
      const double lam = 0.5 * (lo + hi);
      for (Eigen::Index j = 0; j < w.size(); ++j) z(j) = w(j) / (1.0 + lam * xi(j));
    }
    p.blocks[block_] = center_ + unvectorize(map_->gram_vecs * z).mat();
  }

  double distance(const ProductPoint& p) const override {
    ProductPoint tmp = p;
    project(tmp);
    return (p.blocks[block_] - tmp.blocks[block_]).norm();
  }
  std::string name() const override { return "m_ellipsoid"; }

 private:
  int block_;
  std::shared_ptr<const MeasurementMap> map_;
  Matrix center_;
  double radius_;
};

class PartialTransposePsdSet final : public ConvexSet {
 public:
  PartialTransposePsdSet(int block, int qubits, unsigned mask)
      : block_(block), qubits_(qubits), mask_(mask) {}
  std::vector<int> blocks() const override { return {block_}; }
  void project(ProductPoint& p) const override {
    p.blocks[block_] = partial_transpose(
        psd_clip(partial_transpose(p.blocks[block_], qubits_, mask_)), qubits_, mask_);
  }
  double distance(const ProductPoint& p) const override {
    Eigen::SelfAdjointEigenSolver<Matrix> es(partial_transpose(p.blocks[block_], qubits_, mask_),
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseMin(0.0).norm();
  }
  std::string name() const override { return "partial_transpose_psd"; }

 private:
  int block_;
  int qubits_;
  unsigned mask_;
};

class GmeCouplingSet final : public ConvexSet {
 public:
  GmeCouplingSet(int rho_block, std::vector<int> omega_blocks, std::vector<int> tau_blocks,
                 int qubits, std::vector<unsigned> masks)
      : rho_(rho_block),
        omegas_(std::move(omega_blocks)),
        taus_(std::move(tau_blocks)),
        qubits_(qubits),
        masks_(std::move(masks)) {
    if (omegas_.size() != taus_.size() || omegas_.size() != masks_.size() || omegas_.empty()) {
      throw std::invalid_argument("gme_coupling: block/mask count mismatch");
    }
  }
  std::vector<int> blocks() const override {
    std::vector<int> out{rho_};
    out.insert(out.end(), omegas_.begin(), omegas_.end());
    out.insert(out.end(), taus_.begin(), taus_.end());
    return out;
  }

  // nearest point of { sum_i omega_i = rho, tau_i = pt_i(omega_i) }:
  // minimizing over the omegas alone gives omega_i = b_i - (sum b - rho0)/(2+k)
  // with b_i = (omega0_i + pt_i(tau0_i))/2.
  void project(ProductPoint& p) const override {
    const std::size_t k = omegas_.size();
    const Matrix rho0 = p.blocks[rho_];
    std::vector<Matrix> b(k);
    Matrix bsum = Matrix::Zero(rho0.rows(), rho0.cols());
    for (std::size_t i = 0; i < k; ++i) {
      b[i] = 0.5 * (p.blocks[omegas_[i]] +
                    partial_transpose(p.blocks[taus_[i]], qubits_, masks_[i]));
      bsum += b[i];
    }
    const Matrix shift = (bsum - rho0) / (2.0 + static_cast<double>(k));
    Matrix rho = rho0;
    rho.setZero();
    for (std::size_t i = 0; i < k; ++i) {
      p.blocks[omegas_[i]] = b[i] - shift;
      p.blocks[taus_[i]] = partial_transpose(p.blocks[omegas_[i]], qubits_, masks_[i]);
      rho += p.blocks[omegas_[i]];
    }
    p.blocks[rho_] = rho;
  }

  double distance(const ProductPoint& p) const override {
    ProductPoint tmp = p;
    project(tmp);
    double d2 = (p.blocks[rho_] - tmp.blocks[rho_]).squaredNorm();
    for (std::size_t i = 0; i < omegas_.size(); ++i) {
      d2 += (p.blocks[omegas_[i]] - tmp.blocks[omegas_[i]]).squaredNorm();
      d2 += (p.blocks[taus_[i]] - tmp.blocks[taus_[i]]).squaredNorm();
    }
    return std::sqrt(d2);
  }
  bool affine() const override { return true; }
  std::string name() const override { return "gme_coupling"; }

 private:
  int rho_;
  std::vector<int> omegas_;
  std::vector<int> taus_;
  int qubits_;
  std::vector<unsigned> masks_;
};

}  // namespace

std::unique_ptr<ConvexSet> psd_cone(int block) { return std::make_unique<PsdConeSet>(block); }
std::unique_ptr<ConvexSet> trace_one(int block, int dim) {
  return std::make_unique<TraceOneSet>(block, dim);
}
std::unique_ptr<ConvexSet> fixed_point(int block, Matrix value) {
  return std::make_unique<FixedPointSet>(block, std::move(value));
}
std::unique_ptr<ConvexSet> hs_ball(int block, Matrix center, double radius) {
  return std::make_unique<HsBallSet>(block, std::move(center), radius);
}
std::unique_ptr<ConvexSet> spectral_ball(int block, Matrix center, double radius) {
  return std::make_unique<SpectralBallSet>(block, std::move(center), radius);
}
std::unique_ptr<ConvexSet> m_ellipsoid(int block, std::shared_ptr<const MeasurementMap> map,
                                       Matrix center, double radius) {
  return std::make_unique<MEllipsoidSet>(block, std::move(map), std::move(center), radius);
}
std::unique_ptr<ConvexSet> partial_transpose_psd(int block, int qubits, unsigned mask) {
  return std::make_unique<PartialTransposePsdSet>(block, qubits, mask);
}
std::unique_ptr<ConvexSet> gme_coupling(int rho_block, std::vector<int> omega_blocks,
                                        std::vector<int> tau_blocks, int qubits,
                                        std::vector<unsigned> masks) {
  return std::make_unique<GmeCouplingSet>(rho_block, std::move(omega_blocks),
                                          std::move(tau_blocks), qubits, std::move(masks));
}

Matrix partial_transpose(const Matrix& a, int qubits, unsigned mask) {
  const long long d = 1LL << qubits;
  if (a.rows() != d || a.cols() != d) {
    throw std::invalid_argument("partial_transpose: dimension is not 2^qubits");
  }
  // qubit k occupies bit (qubits-1-k) of the row index (qubit 0 leftmost)
  long long bits = 0;
  for (int k = 0; k < qubits; ++k) {
    if (mask & (1u << k)) bits |= 1LL << (qubits - 1 - k);
  }
  Matrix out(d, d);
  for (long long i = 0; i < d; ++i) {
    for (long long j = 0; j < d; ++j) {
      const long long ii = (i & ~bits) | (j & bits);
      const long long jj = (j & ~bits) | (i & bits);
      out(i, j) = a(ii, jj);
    }
  }
  return out;
}

FeasibilityOutcome solve_feasibility(const std::vector<const ConvexSet*>& sets,
                                     ProductPoint start, const FeasibilityOptions& opts) {
  if (sets.empty()) throw std::invalid_argument("solve_feasibility: no sets");
  const int nb = static_cast<int>(start.blocks.size());
  std::vector<std::vector<int>> touch(sets.size());
  std::vector<int> touch_count(nb, 0);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    touch[i] = sets[i]->blocks();
    for (int b : touch[i]) {
      if (b < 0 || b >= nb) throw std::invalid_argument("solve_feasibility: block out of range");
      ++touch_count[b];
    }
  }
  for (int b = 0; b < nb; ++b) {
    if (touch_count[b] == 0) {
      throw std::invalid_argument("solve_feasibility: unconstrained block");
    }
  }

  ProductPoint x = std::move(start);
  ProductPoint scratch = x;
  std::vector<std::vector<Matrix>> corr(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i]->affine()) continue;
    for (int b : touch[i]) {
      corr[i].push_back(Matrix::Zero(x.blocks[b].rows(), x.blocks[b].cols()));
    }
  }
  std::vector<Matrix> accum(nb);
  std::vector<Matrix> pre;

  FeasibilityOutcome out;
  out.status = FeasibilityStatus::inconclusive;
  out.final_gap = 0.0;
  out.iterations = 0;
  int stall = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  int stale_probes = 0;
  for (long long it = 1; it <= opts.max_iters; ++it) {
    for (int b = 0; b < nb; ++b) {
      accum[b] = Matrix::Zero(x.blocks[b].rows(), x.blocks[b].cols());
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const bool aff = sets[i]->affine();
      pre.clear();
      for (std::size_t j = 0; j < touch[i].size(); ++j) {
        const int b = touch[i][j];
        scratch.blocks[b] = x.blocks[b];
        if (!aff) scratch.blocks[b] += corr[i][j];
        if (!aff) pre.push_back(scratch.blocks[b]);
      }
      sets[i]->project(scratch);
      for (std::size_t j = 0; j < touch[i].size(); ++j) {
        const int b = touch[i][j];
        accum[b] += scratch.blocks[b];
        if (!aff) corr[i][j] = pre[j] - scratch.blocks[b];
      }
    }
    double movement2 = 0.0;
    for (int b = 0; b < nb; ++b) {
      accum[b] /= static_cast<double>(touch_count[b]);
      movement2 += (accum[b] - x.blocks[b]).squaredNorm();
      x.blocks[b] = accum[b];
    }
    stall = std::sqrt(movement2) < opts.tol_stall ? stall + 1 : 0;
    out.iterations = it;

    // residuals cost as much as the projections; probe them on a cadence
    if (it % 4 != 1 && stall < opts.stall_window && it != opts.max_iters) continue;
    double gap = 0.0, worst = 0.0;
    for (const ConvexSet* s : sets) {
      const double d = s->distance(x);
      gap += d;
      worst = std::max(worst, d);
    }
    out.final_gap = gap;
    if (worst < opts.tol_feas) {
      out.status = FeasibilityStatus::feasible;
      out.witness = x;
      return out;
    }
    if (gap < best_gap * (1.0 - opts.gap_rel_improve)) {
      best_gap = gap;
      stale_probes = 0;
    } else {
      ++stale_probes;
    }
    if ((stall >= opts.stall_window || stale_probes >= opts.stall_window) &&
        gap > 10.0 * opts.tol_feas) {
      out.status = FeasibilityStatus::empty_within_margin;
      return out;
    }
  }
  out.status = FeasibilityStatus::inconclusive;
  return out;
}

namespace {

std::unique_ptr<ConvexSet> region_set(int block, const Region& region) {
  switch (region.kind) {
    case RegionKind::A:
      return hs_ball(block, region.center.mat(), region.radius);
    case RegionKind::R:
      return spectral_ball(block, region.center.mat(), region.radius);
    case RegionKind::B:
    case RegionKind::G:
      return m_ellipsoid(block, region.map, region.center.mat(), region.radius);
  }
  throw std::logic_error("region_set: unknown kind");
}

}  // namespace

FeasibilityOutcome regions_overlap(const Region& a, const Region& b,
                                   const FeasibilityOptions& opts) {
  const int d = a.center.dim();
  if (b.center.dim() != d) throw std::invalid_argument("regions_overlap: dimension mismatch");
  auto s_psd = psd_cone(0);
  auto s_tr = trace_one(0, d);
  auto s_a = region_set(0, a);
  auto s_b = region_set(0, b);
  ProductPoint start;
  start.blocks.push_back(0.5 * (a.center.mat() + b.center.mat()));
  return solve_feasibility({s_psd.get(), s_tr.get(), s_a.get(), s_b.get()}, std::move(start),
                           opts);
}

namespace {

std::vector<unsigned> gme_masks(int qubits) {
  // subsets of qubits that contain qubit 0, excluding the full set
  std::vector<unsigned> masks;
  const unsigned full = (1u << qubits) - 1;
  for (unsigned m = 1; m < full; ++m) {
    if (m & 1u) masks.push_back(m);
  }
  return masks;
}

FeasibilityOutcome gme_solve(std::unique_ptr<ConvexSet> rho_constraint, bool add_trace,
                             const Matrix& rho_start, int qubits,
                             const FeasibilityOptions& opts) {
  if (qubits < 3 || qubits > 4) {
    throw std::invalid_argument("gme certification: qubits must be 3 or 4");
  }
  const int d = 1 << qubits;
  if (rho_start.rows() != d) {
    throw std::invalid_argument("gme certification: state dimension is not 2^qubits");
  }
  const std::vector<unsigned> masks = gme_masks(qubits);
  const int k = static_cast<int>(masks.size());

  ProductPoint start;
  start.blocks.resize(1 + 2 * k);
  Matrix rho0 = psd_clip(rho_start);
  const double tr = rho0.trace().real();
  rho0 = tr > 1e-12 ? Matrix(rho0 / tr) : Matrix(Matrix::Identity(d, d) / d);
  start.blocks[0] = rho0;
  std::vector<int> omega_blocks(k), tau_blocks(k);
  for (int i = 0; i < k; ++i) {
    omega_blocks[i] = 1 + i;
    tau_blocks[i] = 1 + k + i;
    start.blocks[1 + i] = rho0 / k;
    start.blocks[1 + k + i] = partial_transpose(start.blocks[1 + i], qubits, masks[i]);
  }

  std::vector<std::unique_ptr<ConvexSet>> owned;
  owned.push_back(std::move(rho_constraint));
  if (add_trace) owned.push_back(trace_one(0, d));
  for (int i = 0; i < k; ++i) owned.push_back(psd_cone(omega_blocks[i]));
  for (int i = 0; i < k; ++i) owned.push_back(psd_cone(tau_blocks[i]));
  owned.push_back(gme_coupling(0, omega_blocks, tau_blocks, qubits, masks));

  std::vector<const ConvexSet*> sets;
  for (const auto& s : owned) sets.push_back(s.get());
  return solve_feasibility(sets, std::move(start), opts);
}

}  // namespace

FeasibilityOutcome gme_certify(const Region& region, int qubits,
                               const FeasibilityOptions& opts) {
  return gme_solve(region_set(0, region), true, region.center.mat(), qubits, opts);
}

FeasibilityOutcome gme_certify(const HermOp& rho, int qubits, const FeasibilityOptions& opts) {
  return gme_solve(fixed_point(0, rho.mat()), false, rho.mat(), qubits, opts);
}

}  // namespace qcr
