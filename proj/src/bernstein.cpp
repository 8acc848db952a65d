#include "qcr/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcr {

double w_factor(double x, WVariant variant) {
  if (x < 0.0) throw std::invalid_argument("w_factor: x must be >= 0");
  switch (variant) {
    case WVariant::T: {
      // (2/x^2)[(x+1)log(x+1) - x]; series for small x to avoid cancellation:
      // 1 - x/3 + x^2/6 - x^3/10 + ...
      if (x < 1e-4) {
        return 1.0 - x / 3.0 + x * x / 6.0 - x * x * x / 10.0;
      }
      return 2.0 / (x * x) * ((x + 1.0) * std::log1p(x) - x);
    }
    case WVariant::S:
      return 3.0 / (3.0 + x);
    case WVariant::R:
      return 3.0 / (4.0 * std::max(1.0, x));
  }
  return 0.0;
}

double tail_bound(const TailParams& params, double epsilon) {
  if (epsilon <= 0.0) throw std::invalid_argument("tail_bound: epsilon must be > 0");
  const double exponent =
      -(params.N * epsilon * epsilon / 2.0) * w_factor(params.eta * epsilon, WVariant::S);
  return std::min(1.0, 8.0 * std::exp(exponent));
}

double epsilon_for_confidence(double N, double delta, double eta) {
  if (N < 1.0) throw std::invalid_argument("epsilon_for_confidence: N must be >= 1");
  if (delta <= 0.0 || delta >= 1.0) {
    throw std::invalid_argument("epsilon_for_confidence: delta must be in (0,1)");
  }
  if (eta <= 0.0) throw std::invalid_argument("epsilon_for_confidence: eta must be > 0");
  const double u = eta * eta / (18.0 * N) * std::log(8.0 / delta);
  // sqrt(u)(sqrt(u) + sqrt(u+1)) = u + sqrt(u(u+1)); accurate for all u > 0
  return 6.0 / eta * (u + std::sqrt(u * (u + 1.0)));
}

SigmaEta sigma_eta(const MultinomialModel& model) {
  if (model.gammas.size() != model.weights.size() || model.gammas.empty()) {
    throw std::invalid_argument("sigma_eta: gamma/weight size mismatch");
  }
  double wsum = 0.0;
  for (double w : model.weights) wsum += w;
  if (std::abs(wsum - 1.0) > 1e-12) {
    throw std::invalid_argument("sigma_eta: weights must sum to 1");
  }
  double s2 = 0.0, ratio_max = 0.0;
  for (std::size_t i = 0; i < model.gammas.size(); ++i) {
    const double g = model.gammas[i], q = model.weights[i];
    if (g < 0.0) throw std::invalid_argument("sigma_eta: negative gamma");
    if (q <= 0.0) {
      if (g > 0.0) {
        throw std::invalid_argument("sigma_eta: setting never sampled but contributes");
      }
      continue;
    }
    s2 += g * g / q;
    ratio_max = std::max(ratio_max, g / q);
  }
  SigmaEta out;
  out.sigma = std::sqrt(s2);
  out.eta = out.sigma > 0.0 ? 2.0 * ratio_max / out.sigma : 0.0;
  return out;
}

std::vector<double> optimal_sampling(const std::vector<double>& gammas) {
  double total = 0.0;
  for (double g : gammas) {
    if (g < 0.0) throw std::invalid_argument("optimal_sampling: negative gamma");
    total += g;
  }
  if (total <= 0.0) throw std::invalid_argument("optimal_sampling: all gammas zero");
  std::vector<double> q(gammas.size());
  for (std::size_t i = 0; i < gammas.size(); ++i) q[i] = gammas[i] / total;
  return q;
}

double exact_variance_term(const RealMatrix& g, const RealVector& p) {
  if (p.size() != g.cols()) throw std::invalid_argument("exact_variance_term: size mismatch");
  if (p.minCoeff() < -1e-12 || std::abs(p.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("exact_variance_term: p must lie on the simplex");
  }
  double mean_sq = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    mean_sq += p(j) * g.col(j).squaredNorm();
  }
  return mean_sq - (g * p).squaredNorm();
}

double lambda_bound(const std::vector<double>& gammas) {
  double m = 0.0;
  for (double g : gammas) m = std::max(m, g);
  return 2.0 * m;
}

}  // namespace qcr
