#include "borps/distributions.hpp"

#include <cmath>
#include <limits>

namespace borps {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("quantile must lie in (0,1)");
  }
}

}  // namespace

void validate(const AldParams& params) {
  require_quantile(params.q);
  if (!(params.sigma > 0.0)) {
    throw std::domain_error("ALD scale must be positive");
  }
  if (!std::isfinite(params.mu)) {
    throw std::domain_error("ALD location must be finite");
  }
}

double check_loss(double u, double q) {
  require_quantile(q);
  return u * (q - (u < 0.0 ? 1.0 : 0.0));
}

double ald_pdf(double u, const AldParams& params) {
  validate(params);
  const double t = (u - params.mu) / params.sigma;
  return params.q * (1.0 - params.q) / params.sigma *
         std::exp(-check_loss(t, params.q));
}

double ald_cdf(double u, const AldParams& params) {
  validate(params);
  const double q = params.q;
  const double t = (u - params.mu) / params.sigma;
  if (t < 0.0) {
    return q * std::exp((1.0 - q) * t);
  }
  return 1.0 - (1.0 - q) * std::exp(-q * t);
}

double sample_ald_mixture(const AldParams& params, Rng& rng) {
  validate(params);
  const double q = params.q;
  const double theta = (1.0 - 2.0 * q) / (q * (1.0 - q));
  const double tau = std::sqrt(2.0 / (q * (1.0 - q)));
  const double w = sample_exponential(rng);
  const double u = sample_normal(rng);
  return params.mu + params.sigma * theta * w +
         params.sigma * tau * std::sqrt(w) * u;
}

double normal_pdf(double x) {
  return 0.3989422804014326779 * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal quantile requires p in (0,1)");
  }
  // Acklam's rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double r = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
        ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
  } else if (p > 1.0 - plow) {
    const double r = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
        ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
  } else {
    const double r = p - 0.5;
    const double s = r * r;
    x = (((((a[0] * s + a[1]) * s + a[2]) * s + a[3]) * s + a[4]) * s + a[5]) *
        r /
        (((((b[0] * s + b[1]) * s + b[2]) * s + b[3]) * s + b[4]) * s + 1.0);
  }
  // One Newton step on the CDF.
  const double err = normal_cdf(x) - p;
  const double dens = normal_pdf(x);
  if (dens > 0.0) {
    x -= err / dens;
  }
  return x;
}

double sample_normal(Rng& rng) { return normal_quantile(rng.uniform()); }

double sample_exponential(Rng& rng) { return -std::log(rng.uniform()); }

double sample_gamma(double shape, double rate, Rng& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::domain_error("gamma shape and rate must be positive");
  }
  // Marsaglia-Tsang squeeze; shape < 1 handled by the boost u^(1/shape).
  double boost = 1.0;
  double a = shape;
  if (a < 1.0) {
    boost = std::pow(rng.uniform(), 1.0 / a);
    a += 1.0;
  }
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = sample_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) {
      return boost * d * v / rate;
    }
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return boost * d * v / rate;
    }
  }
}

double sample_inverse_gaussian(double mean, double shape, Rng& rng) {
  if (!(mean > 0.0) || !(shape > 0.0)) {
    throw std::domain_error("inverse Gaussian parameters must be positive");
  }
  const double nu = sample_normal(rng);
  const double y = nu * nu;
  // Smaller root of the quadratic, written without the cancellation that
  // destroys it when mean*y >> shape:
  //   x = mean * (1 - 2w / (w + sqrt(w) sqrt(w + 4 shape))), w = mean * y.
  const double w = mean * y;
  double x = mean;
  if (w > 0.0) {
    x = mean * (1.0 - 2.0 * w / (w + std::sqrt(w) * std::sqrt(w + 4.0 * shape)));
    if (!(x > 0.0)) x = std::numeric_limits<double>::min();
  }
  const double u = rng.uniform();
  if (u <= mean / (mean + x)) {
    return x;
  }
  const double other = mean * mean / x;
  return std::isfinite(other) ? other : std::numeric_limits<double>::max();
}

namespace {

// Robert's one-sided rejection sampler for the standard normal truncated to
// (a, b) with a >= 0; exponential proposal tilted at the optimal rate.
double truncated_std_normal_tail(double a, double b, Rng& rng) {
  // Narrow windows starve the exponential proposal (acceptance ~ a(b-a)), so
  // use a uniform proposal with the exact density ratio instead; its
  // acceptance is at least exp(-(b-a)(b+a)/2) >= exp(-1) here.
  if ((b - a) * a <= 1.0) {
    for (;;) {
      const double x = a + (b - a) * rng.uniform();
      if (std::log(rng.uniform()) <= 0.5 * (a - x) * (a + x)) {
        return x;
      }
    }
  }
  const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double x = a + sample_exponential(rng) / alpha;
    if (x >= b) continue;
    const double diff = x - alpha;
    if (std::log(rng.uniform()) <= -0.5 * diff * diff) {
      return x;
    }
  }
}

// Standard normal truncated to (a, b); assumes the interval is not entirely
// beyond 4 sd on the right (callers mirror for the left tail).
double truncated_std_normal(double a, double b, Rng& rng) {
  if (a >= 4.0) {
    return truncated_std_normal_tail(a, b, rng);
  }
  if (b <= -4.0) {
    return -truncated_std_normal_tail(-b, -a, rng);
  }
  // Mirror so the CDF values are evaluated on the accurate (lower) side.
  if (a + b > 0.0) {
    return -truncated_std_normal(-b, -a, rng);
  }
  const double fa = normal_cdf(a);
  const double fb = normal_cdf(b);
  double u = fa + (fb - fa) * rng.uniform();
  // A degenerate-width interval can round u onto a boundary.
  u = std::min(std::max(u, 5e-324), 1.0 - 1e-16);
  return normal_quantile(u);
}

}  // namespace

double sample_truncated_normal(double mean, double variance, double lo,
                               double hi, Rng& rng) {
  if (!(lo < hi)) {
    throw std::domain_error("truncation interval requires lo < hi");
  }
  if (!(variance > 0.0)) {
    throw std::domain_error("truncated normal variance must be positive");
  }
  const double sd = std::sqrt(variance);
  const double a = lo == -kInf ? -kInf : (lo - mean) / sd;
  const double b = hi == kInf ? kInf : (hi - mean) / sd;
  double z;
  if (a == -kInf && b == kInf) {
    z = sample_normal(rng);
  } else {
    z = truncated_std_normal(a == -kInf ? -40.0 : a, b == kInf ? 40.0 : b, rng);
  }
  double x = mean + sd * z;
  // Floating rounding can land exactly on a finite bound; nudge inward.
  if (x <= lo) x = std::nextafter(lo, hi);
  if (x >= hi) x = std::nextafter(hi, lo);
  return x;
}

Eigen::VectorXd sample_mvn(const Eigen::VectorXd& mean,
                           const Eigen::MatrixXd& covariance, Rng& rng) {
  const Eigen::Index p = mean.size();
  if (covariance.rows() != p || covariance.cols() != p) {
    throw std::domain_error("covariance dimension mismatch");
  }
  const double max_diag = covariance.diagonal().cwiseAbs().maxCoeff();
  if (max_diag == 0.0 && covariance.cwiseAbs().maxCoeff() == 0.0) {
    return mean;
  }
  const double scale = std::max(1.0, max_diag);
  for (double jitter = 0.0; jitter <= 1e-6;
       jitter = (jitter == 0.0 ? 1e-12 : jitter * 10.0)) {
    Eigen::MatrixXd c = covariance;
    c.diagonal().array() += jitter * scale;
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd z(p);
      for (Eigen::Index i = 0; i < p; ++i) z[i] = sample_normal(rng);
      return mean + llt.matrixL() * z;
    }
  }
  throw NumericError(
      "covariance Cholesky failed after jitter escalation; max diagonal = " +
      std::to_string(max_diag));
}

double quantile_of(RefDist dist, double p) {
  require_quantile(p);
  switch (dist) {
    case RefDist::StandardNormal:
      return normal_quantile(p);
    case RefDist::StandardLaplace:
      return p <= 0.5 ? std::log(2.0 * p) : -std::log(2.0 * (1.0 - p));
  }
  throw std::domain_error("unknown reference distribution");
}

}  // namespace borps
