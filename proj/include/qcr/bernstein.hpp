#pragma once
#include <vector>

#include "qcr/herm.hpp"

namespace qcr {

// Tail weight factors; ordering w_T >= w_S >= w_R pointwise on x >= 0.
// T: (2/x^2)[(x+1)log(x+1) - x], S: 3/(3+x), R: 3/(4 max(1,x)).
enum class WVariant { T, S, R };
double w_factor(double x, WVariant variant);

struct TailParams {
  double N = 1;
  double sigma = 1;
  double eta = 2;
  double delta = 0.05;
};

// P(||.|| >= eps * sigma) <= min(1, 8 exp[-(N eps^2 / 2) * 3/(3 + eta eps)])
double tail_bound(const TailParams& params, double epsilon);

// eps = (6/eta) sqrt(u) (sqrt(u) + sqrt(u+1)), u = (eta^2 / 18N) log(8/delta);
// plugging back into tail_bound returns exactly delta.
double epsilon_for_confidence(double N, double delta, double eta);

// Per-setting data of a multi-setting experiment: gamma_s = ||G_s||_{2,inf}
// and the sampling weight q_s of each setting.
struct MultinomialModel {
  std::vector<double> gammas;
  std::vector<double> weights;
};

struct SigmaEta {
  double sigma = 0;
  double eta = 0;
};

// sigma = sqrt(sum gamma^2 / q), eta = (2/sigma) max(gamma/q); a single
// merged measurement gives eta = 2 exactly.
SigmaEta sigma_eta(const MultinomialModel& model);

// q_s = gamma_s / sum(gamma); minimizes sigma over the weight simplex and
// makes eta = 2.
std::vector<double> optimal_sampling(const std::vector<double>& gammas);

// S = sum_j p_j ||col_j G||^2 - ||G p||^2, the exact per-shot variance term;
// bounded above by ||G||_{2,inf}^2.
double exact_variance_term(const RealMatrix& g, const RealVector& p);

// lambda = sqrt(Lambda_max) = 2 max gamma
double lambda_bound(const std::vector<double>& gammas);

}  // namespace qcr
