#include "qcr/regions.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "qcr/bernstein.hpp"

namespace qcr {

std::string to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::A: return "A";
    case RegionKind::B: return "B";
    case RegionKind::R: return "R";
    case RegionKind::G: return "G";
  }
  return "A";
}

namespace {

std::vector<Semiaxis> grouped_semiaxes(const RealVector& gram_eigs, double scale) {
  // ascending eigenvalues -> descending lengths scale / sqrt(xi)
  std::vector<Semiaxis> out;
  for (Eigen::Index j = 0; j < gram_eigs.size(); ++j) {
    const double len = scale / std::sqrt(gram_eigs(j));
    if (!out.empty() && std::abs(out.back().length - len) < 1e-7 * out.back().length) {
      ++out.back().multiplicity;
    } else {
      out.push_back(Semiaxis{len, 1});
    }
  }
  return out;
}

void check_inputs(const std::shared_ptr<const MeasurementMap>& map, double N, double delta) {
  if (!map) throw std::invalid_argument("region: null measurement map");
  if (N < 1.0) throw std::invalid_argument("region: N must be >= 1");
  if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("region: delta must be in (0,1)");
}

}  // namespace

Region build_region(const std::shared_ptr<const MeasurementMap>& map, const RealVector& freqs,
                    double N, double delta, RegionKind kind) {
  check_inputs(map, N, delta);
  if (kind != RegionKind::A && kind != RegionKind::B) {
    throw std::invalid_argument("build_region handles kinds A and B only");
  }
  if (!map->complete) {
    throw std::invalid_argument("region: measurement not tomographically complete");
  }
  Region region;
  region.kind = kind;
  region.center = estimate_state(*map, freqs);
  region.delta = delta;
  region.N = N;
  region.epsilon = epsilon_for_confidence(N, delta, 2.0);
  if (kind == RegionKind::A) {
    region.sigma = col_norm_max(map->pinv);
  } else {
    region.sigma = col_norm_max(map->mat * map->pinv);
    region.map = map;
    region.semiaxes = grouped_semiaxes(map->gram_eigs, region.epsilon * region.sigma);
  }
  region.radius = region.epsilon * region.sigma;
  return region;
}

SymmetricRegionConstants symmetric_region_constants(const SymmetricSpec& spec) {
  if (spec.r >= spec.d) {
    throw std::invalid_argument("symmetric constants: r = d is a trivial measurement");
  }
  const double d = spec.d, r = spec.r, n = spec.n;
  const int q = spec.q;
  SymmetricRegionConstants out;
  const double sigma_A_local = std::sqrt((r / d) * (d * d - 1) * (d * d - 1) / (d - r) + 1.0 / d);
  out.sigma_A = std::pow(sigma_A_local, q);
  out.sigma_B = std::pow(d / std::sqrt(n), q);
  for (int chi = 0; chi <= q; ++chi) {
    Semiaxis ax;
    ax.length = std::pow(r * (d * d - 1) / (d - r), 0.5 * (q - chi)) * std::pow(d, 0.5 * q);
    long long binom = 1;
    for (int k = 0; k < chi; ++k) binom = binom * (q - k) / (k + 1);
    double mult = static_cast<double>(binom) * std::pow(d * d - 1, q - chi);
    ax.multiplicity = static_cast<int>(std::llround(mult));
    out.semiaxes.push_back(ax);
  }
  return out;
}

std::optional<SchemeConstants> builtin_scheme_constants(const Povm& povm) {
  if (povm.scheme_tag == SchemeTag::pauli_bases && povm.sym) {
    const int q = povm.sym->q;
    return SchemeConstants{std::pow(3.0, 0.5 * q), 2.0 * std::pow(4.0 / 3.0, 0.5 * q)};
  }
  if (povm.scheme_tag == SchemeTag::pauli_observables) {
    return SchemeConstants{static_cast<double>(povm.dim), 2.0};
  }
  if (povm.sym && povm.sym->q == 1 && povm.sym->r == 1) {
    const double d = povm.dim;
    return SchemeConstants{std::sqrt(2.0 * d), std::sqrt(d / 2.0)};
  }
  return std::nullopt;
}

Region build_region_R(const std::shared_ptr<const MeasurementMap>& map, const RealVector& freqs,
                      double N, double delta,
                      const std::optional<SchemeConstants>& constants) {
  check_inputs(map, N, delta);
  if (!constants) {
    throw std::invalid_argument(
        "spectral region: no sigma_R/eta_R constants known for this measurement; built-in pairs "
        "exist for the Pauli-bases, Pauli-observable and rank-1 single-qudit symmetric schemes, "
        "otherwise supply constants explicitly");
  }
  Region region;
  region.kind = RegionKind::R;
  region.center = estimate_state(*map, freqs);
  region.delta = delta;
  region.N = N;
  region.sigma = constants->sigma_R;
  const double eta = constants->eta_R;
  const double u = eta * eta * std::log(2.0 * map->dim / delta) / (18.0 * N);
  region.epsilon = 6.0 / eta * (u + std::sqrt(u * (u + 1.0)));
  region.radius = region.epsilon * region.sigma;
  return region;
}

double chi2_inv_survival(int dof, double delta) {
  if (dof < 1) throw std::invalid_argument("chi2_inv_survival: dof must be >= 1");
  if (delta <= 0.0 || delta >= 1.0) {
    throw std::invalid_argument("chi2_inv_survival: delta must be in (0,1)");
  }
  const double k = dof;
  auto survival = [k](double x) { return boost::math::gamma_q(0.5 * k, 0.5 * x); };
  double lo = k * 1e-6;
  double hi = k + 40.0 * std::sqrt(k) + 40.0;
  while (survival(hi) > delta) hi *= 2.0;  // only for extreme deltas
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double s = survival(mid);
    if (std::abs(s - delta) < 1e-15) return mid;
    if (s > delta) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-13 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

double gaussian_region_size(const SymmetricSpec& spec, double N, double delta) {
  const double D2 = std::pow(static_cast<double>(spec.d), 2.0 * spec.q);
  const int dof = static_cast<int>(std::llround(D2)) - 1;
  const double scale = std::pow(spec.theta(), spec.q);
  return std::sqrt(scale * chi2_inv_survival(dof, delta) / N);
}

Region build_region_G(const std::shared_ptr<const MeasurementMap>& map, const RealVector& freqs,
                      double N, double delta, double scale, int dof) {
  check_inputs(map, N, delta);
  if (!map->complete) {
    throw std::invalid_argument("region: measurement not tomographically complete");
  }
  Region region;
  region.kind = RegionKind::G;
  region.center = estimate_state(*map, freqs);
  region.delta = delta;
  region.N = N;
  region.sigma = 1.0;
  region.chi2_dof = dof;
  region.epsilon = std::sqrt(scale * chi2_inv_survival(dof, delta) / N);
  region.radius = region.epsilon;
  region.map = map;
  region.semiaxes = grouped_semiaxes(map->gram_eigs, region.epsilon);
  return region;
}

Region build_region_G(const std::shared_ptr<const MeasurementMap>& map, const RealVector& freqs,
                      double N, double delta, const SymmetricSpec& spec) {
  const double D2 = std::pow(static_cast<double>(spec.d), 2.0 * spec.q);
  return build_region_G(map, freqs, N, delta, std::pow(spec.theta(), spec.q),
                        static_cast<int>(std::llround(D2)) - 1);
}

double gaussian_scale(const Povm& povm, bool projective) {
  if (povm.sym) return std::pow(povm.sym->theta(), povm.sym->q);
  // group flat outcomes by setting, recover q_s as tr(sum of weighted effects)/d
  std::vector<double> weights;
  std::vector<double> eff_norm_max;
  Matrix sum = Matrix::Zero(povm.dim, povm.dim);
  double cur_norm = 0.0;
  for (std::size_t a = 0; a < povm.effects.size(); ++a) {
    const bool last = a + 1 == povm.effects.size();
    sum += povm.effects[a].mat();
    cur_norm = std::max(cur_norm, spectral_norm(povm.effects[a].mat()));
    if (last || povm.outcome_index[a + 1].first != povm.outcome_index[a].first) {
      weights.push_back(sum.trace().real() / povm.dim);
      eff_norm_max.push_back(cur_norm);
      sum.setZero();
      cur_norm = 0.0;
    }
  }
  double scale = 0.0;
  for (std::size_t s = 0; s < weights.size(); ++s) {
    if (projective) {
      scale = std::max(scale, 1.0 / (2.0 * weights[s]));
    } else {
      // ||E'||_inf / q_s with E' = E / q_s
      scale = std::max(scale, eff_norm_max[s] / (weights[s] * weights[s]));
    }
  }
  return scale;
}

double region_ratio_BG(const SymmetricSpec& spec, double delta, bool projective_variant) {
  const double d = spec.d, r = spec.r;
  const int q = spec.q;
  const double D2 = std::pow(d, 2.0 * q);
  const int dof = static_cast<int>(std::llround(D2)) - 1;
  double ratio = std::pow(r / d, 0.5 * q) *
                 std::sqrt(2.0 * D2 * std::log(8.0 / delta) / chi2_inv_survival(dof, delta));
  if (projective_variant) ratio *= std::sqrt(2.0);
  return ratio;
}

bool region_membership(const Region& region, const HermOp& rho) {
  if (rho.dim() != region.center.dim()) {
    throw std::invalid_argument("region_membership: dimension mismatch");
  }
  const Matrix diff = rho.mat() - region.center.mat();
  switch (region.kind) {
    case RegionKind::A:
      return hs_norm(diff) <= region.radius;
    case RegionKind::R:
      return spectral_norm(diff) <= region.radius;
    case RegionKind::B:
    case RegionKind::G: {
      if (!region.map) throw std::logic_error("region_membership: ellipsoid without a map");
      return (region.map->mat * vectorize(herm_trusted(diff))).norm() <= region.radius;
    }
  }
  return false;
}

}  // namespace qcr
