#pragma once
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qcr/regions.hpp"

namespace qcr {

// Point in a product of Hermitian-operator spaces (one matrix per variable).
struct ProductPoint {
  std::vector<Matrix> blocks;
};

// Convex constraint on one or more blocks, exposing the HS-nearest-point
// projection. Affine sets need no Dykstra correction.
class ConvexSet {
 public:
  virtual ~ConvexSet() = default;
  virtual std::vector<int> blocks() const = 0;
  // replaces the touched blocks with the nearest point of the set
  virtual void project(ProductPoint& point) const = 0;
  virtual double distance(const ProductPoint& point) const;
  virtual bool affine() const { return false; }
  virtual std::string name() const = 0;
};

std::unique_ptr<ConvexSet> psd_cone(int block);
std::unique_ptr<ConvexSet> trace_one(int block, int dim);
std::unique_ptr<ConvexSet> fixed_point(int block, Matrix value);
std::unique_ptr<ConvexSet> hs_ball(int block, Matrix center, double radius);
std::unique_ptr<ConvexSet> spectral_ball(int block, Matrix center, double radius);
// { x : ||M v(x - center)||_2 <= radius }
std::unique_ptr<ConvexSet> m_ellipsoid(int block, std::shared_ptr<const MeasurementMap> map,
                                       Matrix center, double radius);
// { x : partial transpose of x over the qubits in mask is PSD }
std::unique_ptr<ConvexSet> partial_transpose_psd(int block, int qubits, unsigned mask);
// couples rho (block 0 by convention of the caller) with omegas and taus:
// sum_i omega_i = rho and tau_i = partial_transpose(omega_i, mask_i)
std::unique_ptr<ConvexSet> gme_coupling(int rho_block, std::vector<int> omega_blocks,
                                        std::vector<int> tau_blocks, int qubits,
                                        std::vector<unsigned> masks);

Matrix partial_transpose(const Matrix& a, int qubits, unsigned mask);

enum class FeasibilityStatus { feasible, empty_within_margin, inconclusive };

std::string to_string(FeasibilityStatus status);

struct FeasibilityOutcome {
  FeasibilityStatus status = FeasibilityStatus::inconclusive;
  std::optional<ProductPoint> witness;
  double final_gap = 0.0;  // sum of set distances at the last iterate
  long long iterations = 0;
};

struct FeasibilityOptions {
  double tol_feas = 1e-7;
  double tol_stall = 1e-9;
  int stall_window = 200;
  long long max_iters = 200000;
  // relative gap decrease per residual probe that still counts as progress;
  // a window of probes without it is the second stall trigger
  double gap_rel_improve = 1e-3;
};

// Averaged projections over the product space with Dykstra corrections for
// the non-affine sets. feasible: all residuals < tol_feas. empty_within_margin:
// the iteration stalls while the residual gap stays > 10 * tol_feas. Two stall
// signals: the iterate movement drops below tol_stall for a window (small-gap
// instances), or the probed gap stops shrinking for a window of probes
// (cone-dominated instances, where movement only decays like gap/k).
FeasibilityOutcome solve_feasibility(const std::vector<const ConvexSet*>& sets,
                                     ProductPoint start, const FeasibilityOptions& opts = {});

// Is there a quantum state in both regions?
FeasibilityOutcome regions_overlap(const Region& a, const Region& b,
                                   const FeasibilityOptions& opts = {});

// Is there a PPT mixture inside the region? empty_within_margin certifies
// genuine multipartite entanglement at the region's confidence level.
FeasibilityOutcome gme_certify(const Region& region, int qubits,
                               const FeasibilityOptions& opts = {});
// zero-width variant: the state is fixed instead of region-constrained
FeasibilityOutcome gme_certify(const HermOp& rho, int qubits,
                               const FeasibilityOptions& opts = {});

}  // namespace qcr
