#pragma once

#include <Eigen/Dense>

#include "borps/model.hpp"
#include "borps/rng.hpp"

namespace borps {

// Full Gibbs state, mutated once per sweep in the order (sigma, v, beta, z,
// delta). After every full sweep: sigma > 0, all v_i > 0, cutpoints strictly
// increasing, and delta[y_i - 1] < z_i < delta[y_i] for every i.
struct ChainState {
  Eigen::VectorXd beta;
  double sigma = 1.0;
  Eigen::VectorXd v;  // latent mixture weights, v_i = sigma * w_i
  Eigen::VectorXd z;  // latent continuous responses
  Cutpoints cutpoints;
};

struct TraceSummary {
  double mean;
  double sd;
  double min;
  double max;
};

struct PosteriorSummary {
  Eigen::VectorXd mean_beta;
  Eigen::VectorXd mean_cutpoints;  // interior means, length C-1
  double mean_sigma = 0.0;
  Eigen::VectorXd ratios;          // mean_beta / mean_cutpoints[C-2]
  // One retained draw per row: p beta columns, C-1 interior cutpoint
  // columns, then sigma.
  Eigen::MatrixXd retained_draws;
  std::vector<TraceSummary> diagnostics;  // per retained column
  int p = 0;
  int categories = 0;
};

// beta = 0, z = 1, v = 1; interior cutpoints from scaled uniform draws
// against quantiles of R = rowwise covariate sum, redrawn until increasing.
ChainState init_state(const OrdinalDataset& dataset, Rng& rng);

// Collapsed sigma update: sigma^-1 ~ Gamma(c0+n, d0 + sum rho_q(z - x'beta)).
// Reads only (z, beta); v never enters.
double step_sigma_collapsed(const Eigen::VectorXd& z,
                            const Eigen::VectorXd& xbeta,
                            const OrdinalDataset& dataset,
                            const QuantileSpec& spec, const Hyperparams& hyper,
                            Rng& rng);

// Non-collapsed sigma update from the joint posterior with V retained
// (full-Gibbs variant): sigma^-1 ~ Gamma(c0 + 3n/2, d0 + sum v_i + Q/(2tau^2))
// with Q the V-weighted quadratic form of the adjusted-response residuals.
double step_sigma_full(const ChainState& state, const Eigen::VectorXd& xbeta,
                       const OrdinalDataset& dataset, const QuantileSpec& spec,
                       const Hyperparams& hyper, Rng& rng);

// v_i^-1 ~ IG(1/(q(1-q)|z_i - x_i'beta|), 1/(2 sigma q(1-q))); residual
// magnitude floored at 1e-10.
void step_v(ChainState& state, const Eigen::VectorXd& xbeta,
            const QuantileSpec& spec, Rng& rng);

// beta ~ MVN(beta_hat, (q(1-q)/(2 sigma) X'VX + B0^-1)^-1), V = diag(1/v_i),
// adjusted response u_i = z_i - theta v_i.
void step_beta(ChainState& state, const OrdinalDataset& dataset,
               const QuantileSpec& spec, const Hyperparams& hyper, Rng& rng);

// z_i ~ TN_(delta[y_i-1], delta[y_i])(x_i'beta + theta v_i, tau^2 sigma v_i).
void step_z(ChainState& state, const Eigen::VectorXd& xbeta,
            const OrdinalDataset& dataset, const QuantileSpec& spec, Rng& rng);

// delta_c ~ U(L_c, U_c), L_c = max{max(z|y=c), delta[c-1]},
// U_c = min{min(z|y=c+1), delta[c+1]}.
void step_delta(ChainState& state, const OrdinalDataset& dataset, Rng& rng);

// Posterior means and identifiable ratios from the retained draw matrix.
PosteriorSummary summarize(const Eigen::MatrixXd& retained, int p,
                           int categories);

// init_state plus `iterations` sweeps; retains post-burn-in draws.
PosteriorSummary run_chain(const OrdinalDataset& dataset, double q,
                           const Hyperparams& hyper, const FitConfig& config,
                           Rng& rng);

}  // namespace borps
