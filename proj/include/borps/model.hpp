#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "borps/distributions.hpp"

namespace borps {

// Ordinal regression data: responses coded 1..C against an n x p covariate
// matrix with no intercept column.
struct OrdinalDataset {
  std::vector<int> responses;          // codes in {1..C}
  Eigen::MatrixXd covariates;          // n x p
  int n = 0;
  int p = 0;
  int c = 0;                           // category count, >= 2
  std::vector<std::string> category_labels;
};

// Checks the dataset invariants; throws std::domain_error on violation.
void validate(const OrdinalDataset& dataset);

struct Hyperparams {
  double c0 = 1e-3;
  double d0 = 1e-3;
  Eigen::VectorXd b0;   // prior mean for beta
  Eigen::MatrixXd B0;   // prior covariance for beta, SPD

  static Hyperparams defaults(int p);  // c0=d0=1e-3, b0=0, B0=1e6*I
};

void validate(const Hyperparams& hyper, int p);

enum class Variant { Collapsed, FullGibbs, FixedCutpoints };

struct FitConfig {
  int iterations = 20000;
  int burnin = 10000;
  int thin = 1;
  Variant variant = Variant::Collapsed;
  std::vector<double> fixed_cutpoints;  // C-1 increasing values, fixed variant
};

void validate(const FitConfig& config);

// Cutpoint vector delta[0..C] with delta[0] = -inf and delta[C] = +inf.
struct Cutpoints {
  std::vector<double> delta;

  static Cutpoints from_interior(const std::vector<double>& interior);
  int categories() const { return static_cast<int>(delta.size()) - 1; }
  std::vector<double> interior() const;
  bool strictly_increasing() const;
};

// Codes raw labels as 1..C following label_order; every category must occur.
OrdinalDataset encode_dataset(const std::vector<std::string>& raw_labels,
                              const Eigen::MatrixXd& covariates,
                              const std::vector<std::string>& label_order);

struct Standardization {
  OrdinalDataset dataset;
  Eigen::VectorXd means;
  Eigen::VectorXd sds;  // sample standard deviations (n-1 denominator)
};

// Z-scores every covariate column; errors on a constant column.
Standardization standardize_covariates(const OrdinalDataset& dataset);

// Mixture constants theta, tau for the target quantile.
QuantileSpec mixture_constants(double q);

}  // namespace borps
