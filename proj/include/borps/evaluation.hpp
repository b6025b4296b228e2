#pragma once

#include <Eigen/Dense>
#include <vector>

#include "borps/model.hpp"
#include "borps/parallel.hpp"
#include "borps/sampler.hpp"
#include "borps/simulation.hpp"

namespace borps {

// sqrt((1/n) sum (est_i - truth)^2).
double rmse(const std::vector<double>& estimates, double truth);

struct BootstrapResult {
  Eigen::VectorXd point;  // ratios from the full-data fit
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double level = 0.95;
  Eigen::MatrixXd replicates;  // B x p ratio estimates
};

// B with-replacement resamples, each refit with run_chain; percentile CI
// from the replicate ratios. Replicate b uses substream (seed, b+1);
// resamples dropping a category are redrawn (up to 100 attempts).
BootstrapResult bootstrap_ci(const OrdinalDataset& dataset, double q,
                             const Hyperparams& hyper, const FitConfig& config,
                             int b_count, double level, std::uint64_t seed,
                             int threads = default_thread_count());

// True iff the CI for that covariate excludes 0.
bool significant(const BootstrapResult& result, int covariate);

// Frequentist continuous-QR baseline: minimizes the check loss over
// (intercept, beta) with the response treated as continuous. Returns the
// p+1 coefficient vector, intercept first. Smoothed-Newton solver with the
// smoothing radius decreased geometrically 1e-1 -> 1e-8.
Eigen::VectorXd qr_baseline(const Eigen::VectorXd& responses,
                            const Eigen::MatrixXd& covariates, double q);

// Check-loss objective of the baseline (exposed for the oracle tests).
double qr_objective(const Eigen::VectorXd& responses,
                    const Eigen::MatrixXd& covariates,
                    const Eigen::VectorXd& coef, double q);

enum class Method { Borps, BorpsFull, FixedCutpoints, QrBaseline };

struct CellSpec {
  Design design;
  ErrorLaw error_law;
  double q;
  Method method;
  std::vector<double> fixed_delta;  // FixedCutpoints only
};

struct CellResult {
  Eigen::MatrixXd estimates;     // runs x p ratio (or coefficient) estimates
  Eigen::VectorXd truth;         // per-covariate ground truth
  std::vector<double> rmse_per_covariate;
  int runs = 0;
};

// Generates the scenario fresh per run (substream (seed, run)), fits with
// the chosen method, scores RMSE against the ground truth.
CellResult run_experiment(const CellSpec& cell, int runs,
                          const FitConfig& base_config, std::uint64_t seed,
                          int threads = default_thread_count());

}  // namespace borps
