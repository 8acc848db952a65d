#pragma once
#include <memory>
#include <optional>
#include <vector>

#include "qcr/mmap.hpp"

namespace qcr {

enum class RegionKind { A, B, R, G };

std::string to_string(RegionKind kind);

struct Semiaxis {
  double length = 0;
  int multiplicity = 0;
};

// A confidence region around the linear-inversion estimate:
//   A: HS-norm ball of radius eps * sigma_A
//   B: ellipsoid ||M v(rho - center)||_2 <= eps * sigma_B
//   R: spectral-norm ball of radius eps * sigma_R
//   G: ellipsoid ||M v(rho - center)||_2 <= eps (Gaussian comparison)
struct Region {
  RegionKind kind = RegionKind::A;
  HermOp center = HermOp::zero(2);
  double epsilon = 0;
  double sigma = 0;
  double radius = 0;  // epsilon * sigma
  double delta = 0;
  double N = 0;
  std::shared_ptr<const MeasurementMap> map;  // kinds B and G
  std::vector<Semiaxis> semiaxes;             // kinds B and G, grouped by length
  int chi2_dof = 0;                           // kind G
};

Region build_region(const std::shared_ptr<const MeasurementMap>& map, const RealVector& freqs,
                    double N, double delta, RegionKind kind);

struct SymmetricRegionConstants {
  double sigma_A = 0;
  double sigma_B = 0;
  std::vector<Semiaxis> semiaxes;  // per unit epsilon, descending length
};

// Closed forms for a q-fold tensor power of a local symmetric measurement:
// sigma_A_local = sqrt((r/d)(d^2-1)^2/(d-r) + 1/d), sigma_A = sigma_A_local^q,
// sigma_B = (d/sqrt(n))^q, semiaxis lengths (r(d^2-1)/(d-r))^{(q-chi)/2} d^{q/2}
// with multiplicity (q choose chi)(d^2-1)^{q-chi}.
SymmetricRegionConstants symmetric_region_constants(const SymmetricSpec& spec);

struct SchemeConstants {
  double sigma_R = 0;
  double eta_R = 0;
};

// Spectral-norm region constants for the built-in schemes; empty for POVMs
// without a known pair.
std::optional<SchemeConstants> builtin_scheme_constants(const Povm& povm);

Region build_region_R(const std::shared_ptr<const MeasurementMap>& map, const RealVector& freqs,
                      double N, double delta,
                      const std::optional<SchemeConstants>& constants);

// Inverse survival function of the chi-square distribution: S_k(x) = delta.
double chi2_inv_survival(int dof, double delta);

// eps_G = sqrt(theta^q * S^{-1}_{d^{2q}-1}(delta) / N)
double gaussian_region_size(const SymmetricSpec& spec, double N, double delta);

Region build_region_G(const std::shared_ptr<const MeasurementMap>& map, const RealVector& freqs,
                      double N, double delta, const SymmetricSpec& spec);

// Generic ellipsoid with caller-chosen covariance scale and dof (the
// symmetric overload uses scale = theta^q, dof = d^{2q} - 1).
Region build_region_G(const std::shared_ptr<const MeasurementMap>& map, const RealVector& freqs,
                      double N, double delta, double scale, int dof);

// Covariance scale for the Gaussian region: theta^q when the scheme is
// symmetric; otherwise the projective bound max_s 1/(2 q_s) or the effect-norm
// bound max ||E'||_inf / q_s.
double gaussian_scale(const Povm& povm, bool projective);

// size ratio of region B to the Gaussian comparison region,
// (r/d)^{q/2} sqrt(2 d^{2q} log(8/delta) / S^{-1}(delta)), x sqrt(2) when the
// per-setting measurements are projective.
double region_ratio_BG(const SymmetricSpec& spec, double delta, bool projective_variant);

bool region_membership(const Region& region, const HermOp& rho);

}  // namespace qcr
