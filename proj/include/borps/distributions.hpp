#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "borps/rng.hpp"

namespace borps {

// Thrown when a linear-algebra step fails after the jitter policy.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Target quantile q with the mixture constants used throughout the sampler:
// theta = (1-2q)/(q(1-q)), tau = sqrt(2/(q(1-q))).
struct QuantileSpec {
  double q;
  double theta;
  double tau;
};

struct AldParams {
  double mu;
  double sigma;  // > 0
  double q;      // in (0,1)
};

void validate(const AldParams& params);

// Check function rho_q(u) = u(q - I(u<0)).
double check_loss(double u, double q);

// Asymmetric Laplace density/CDF with location mu, scale sigma, skew q.
double ald_pdf(double u, const AldParams& params);
double ald_cdf(double u, const AldParams& params);

// Draw from the ALD via its normal-exponential mixture:
// mu + sigma*theta*w + sigma*tau*sqrt(w)*u, w ~ Exp(1), u ~ N(0,1).
double sample_ald_mixture(const AldParams& params, Rng& rng);

// Standard normal helpers (quantile is Acklam's rational approximation
// refined by one Newton step; accurate to ~1e-15).
double normal_pdf(double x);
double normal_cdf(double x);
double normal_quantile(double p);

double sample_normal(Rng& rng);                       // N(0,1)
double sample_exponential(Rng& rng);                  // Exp(1)
double sample_gamma(double shape, double rate, Rng& rng);

// Inverse Gaussian IG(mean, shape) via the Michael-Schucany-Haas transform.
double sample_inverse_gaussian(double mean, double shape, Rng& rng);

// N(mean, variance) restricted to (lo, hi); either bound may be infinite.
// Inverse-CDF for mild truncation, exponential-proposal rejection when the
// interval starts beyond 4 standard deviations into a tail.
double sample_truncated_normal(double mean, double variance, double lo,
                               double hi, Rng& rng);

// Gaussian draw with the given moments; Cholesky with diagonal jitter
// escalation 1e-12 -> 1e-6 before throwing NumericError.
Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& covariance, Rng& rng);

enum class RefDist { StandardNormal, StandardLaplace };

// Quantile of the reference distribution at p in (0,1).
double quantile_of(RefDist dist, double p);

}  // namespace borps
