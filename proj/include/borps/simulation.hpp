#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "borps/model.hpp"
#include "borps/rng.hpp"

namespace borps {

enum class Design { SingleNonNull, SingleNull, MultiNonNull, MultiPartialNull };
enum class ErrorLaw { Normal, Laplace };

struct GroundTruth {
  Eigen::VectorXd ratios;  // beta / last interior cutpoint
  Eigen::VectorXd beta;
  std::vector<double> cutpoints;  // interior
};

struct SimulationScenario {
  Design design;
  ErrorLaw error_law;
  double q;
  int n = 300;
  Eigen::VectorXd true_beta;
  std::vector<double> true_cutpoints{5.0, 8.0};
  double error_shift = 0.0;  // -quantile_of(error_law, q)
};

// Shift making the q-quantile of the shifted standard error zero.
double shift_for_quantile(ErrorLaw law, double q);

// Left-closed/right-open binning: category j iff delta[j-1] <= z < delta[j].
int threshold(double z, const std::vector<double>& interior);

// Single-covariate families: x ~ U(0,4); non-null z = 3x + shifted error,
// null z = 12 * standard error; thresholds (5, 8).
std::pair<OrdinalDataset, GroundTruth> gen_single(Design design, ErrorLaw law,
                                                  double q, int n, Rng& rng);

// Two-covariate families: x1 ~ U(0,4), x2 ~ U(0,2); non-null
// z = 3x1 + 2x2 + error, partial null z = 3x1 + error.
std::pair<OrdinalDataset, GroundTruth> gen_multi(Design design, ErrorLaw law,
                                                 double q, int n, Rng& rng);

// Arbitrary generator used by the identifiability invariance checks:
// z_i = intercept + x_i'beta + e_i, covariates U(0,4) per column. Seeding
// two calls identically shares the covariate/error uniform stream.
OrdinalDataset gen_custom(const Eigen::VectorXd& beta,
                          const std::vector<double>& interior_cutpoints,
                          double intercept,
                          const std::function<double(Rng&)>& error_sampler,
                          int n, Rng& rng);

}  // namespace borps
