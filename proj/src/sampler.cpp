#include "borps/sampler.hpp"

#include <cmath>
#include <limits>

#include "borps/distributions.hpp"
#include "borps/stats.hpp"

namespace borps {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kResidualFloor = 1e-10;

std::vector<double> initial_interior_cutpoints(const OrdinalDataset& dataset,
                                               Rng& rng) {
  const int k = dataset.c - 1;
  const std::vector<double> row_sums = [&] {
    Eigen::VectorXd r = dataset.covariates.rowwise().sum();
    return std::vector<double>(r.data(), r.data() + r.size());
  }();
  std::vector<double> anchors(k);
  for (int j = 0; j < k; ++j) {
    // The three-category recipe uses the 0.33/0.67 quantiles of R;
    // higher C spreads anchors evenly at j/C.
    const double prob =
        dataset.c == 3 ? (j == 0 ? 0.33 : 0.67) : double(j + 1) / dataset.c;
    anchors[j] = empirical_quantile(row_sums, prob);
  }
  std::vector<double> interior(k);
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (int j = 0; j < k; ++j) {
      interior[j] = 2.0 * rng.uniform() * anchors[j];
    }
    if (std::is_sorted(interior.begin(), interior.end(),
                       std::less_equal<double>())) {
      return interior;
    }
  }
  std::sort(interior.begin(), interior.end());
  for (int j = 1; j < k; ++j) {
    if (!(interior[j] > interior[j - 1])) {
      interior[j] = interior[j - 1] + 1e-6 * (1.0 + std::abs(interior[j - 1]));
    }
  }
  return interior;
}

}  // namespace

ChainState init_state(const OrdinalDataset& dataset, Rng& rng) {
  ChainState state;
  state.beta = Eigen::VectorXd::Zero(dataset.p);
  state.z = Eigen::VectorXd::Ones(dataset.n);
  state.v = Eigen::VectorXd::Ones(dataset.n);
  state.sigma = 1.0;
  state.cutpoints =
      Cutpoints::from_interior(initial_interior_cutpoints(dataset, rng));
  return state;
}

double step_sigma_collapsed(const Eigen::VectorXd& z,
                            const Eigen::VectorXd& xbeta,
                            const OrdinalDataset& dataset,
                            const QuantileSpec& spec, const Hyperparams& hyper,
                            Rng& rng) {
  double loss = 0.0;
  for (int i = 0; i < dataset.n; ++i) {
    loss += check_loss(z[i] - xbeta[i], spec.q);
  }
  const double precision =
      sample_gamma(hyper.c0 + dataset.n, hyper.d0 + loss, rng);
  return 1.0 / precision;
}

double step_sigma_full(const ChainState& state, const Eigen::VectorXd& xbeta,
                       const OrdinalDataset& dataset, const QuantileSpec& spec,
                       const Hyperparams& hyper, Rng& rng) {
  const double tau2 = spec.tau * spec.tau;
  double v_sum = 0.0;
  double quad = 0.0;
  for (int i = 0; i < dataset.n; ++i) {
    v_sum += state.v[i];
    const double r = state.z[i] - spec.theta * state.v[i] - xbeta[i];
    quad += r * r / state.v[i];
  }
  const double shape = hyper.c0 + 1.5 * dataset.n;
  const double rate = hyper.d0 + v_sum + quad / (2.0 * tau2);
  return 1.0 / sample_gamma(shape, rate, rng);
}

void step_v(ChainState& state, const Eigen::VectorXd& xbeta,
            const QuantileSpec& spec, Rng& rng) {
  const double q1q = spec.q * (1.0 - spec.q);
  const double ig_shape = 1.0 / (2.0 * state.sigma * q1q);
  for (int i = 0; i < state.v.size(); ++i) {
    const double resid =
        std::max(std::abs(state.z[i] - xbeta[i]), kResidualFloor);
    const double ig_mean = 1.0 / (q1q * resid);
    state.v[i] = 1.0 / sample_inverse_gaussian(ig_mean, ig_shape, rng);
  }
}

void step_beta(ChainState& state, const OrdinalDataset& dataset,
               const QuantileSpec& spec, const Hyperparams& hyper, Rng& rng) {
  const int p = dataset.p;
  const double coef = spec.q * (1.0 - spec.q) / (2.0 * state.sigma);
  const Eigen::VectorXd inv_v = state.v.cwiseInverse();
  const Eigen::VectorXd adjusted = state.z - spec.theta * state.v;
  const Eigen::MatrixXd xtvx = dataset.covariates.transpose() *
                               inv_v.asDiagonal() * dataset.covariates;
  const Eigen::MatrixXd b0_inv =
      hyper.B0.llt().solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::MatrixXd precision = coef * xtvx + b0_inv;
  const Eigen::VectorXd rhs =
      coef * (dataset.covariates.transpose() * inv_v.cwiseProduct(adjusted)) +
      b0_inv * hyper.b0;
  const double scale = std::max(1.0, precision.diagonal().maxCoeff());
  for (double jitter = 0.0; jitter <= 1e-6;
       jitter = (jitter == 0.0 ? 1e-12 : jitter * 10.0)) {
    Eigen::MatrixXd a = precision;
    a.diagonal().array() += jitter * scale;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) continue;
    const Eigen::VectorXd beta_hat = llt.solve(rhs);
    Eigen::VectorXd noise(p);
    for (int j = 0; j < p; ++j) noise[j] = sample_normal(rng);
    // L^-T noise has covariance A^-1.
    state.beta = beta_hat + Eigen::MatrixXd(llt.matrixL())
                                .transpose()
                                .triangularView<Eigen::Upper>()
                                .solve(noise);
    return;
  }
  throw NumericError("beta precision matrix not positive definite; max diag " +
                     std::to_string(precision.diagonal().maxCoeff()));
}

void step_z(ChainState& state, const Eigen::VectorXd& xbeta,
            const OrdinalDataset& dataset, const QuantileSpec& spec,
            Rng& rng) {
  const double tau2_sigma = spec.tau * spec.tau * state.sigma;
  for (int i = 0; i < dataset.n; ++i) {
    const int c = dataset.responses[i];
    const double mean = xbeta[i] + spec.theta * state.v[i];
    const double var = tau2_sigma * state.v[i];
    state.z[i] = sample_truncated_normal(mean, var, state.cutpoints.delta[c - 1],
                                         state.cutpoints.delta[c], rng);
  }
}

void step_delta(ChainState& state, const OrdinalDataset& dataset, Rng& rng) {
  const int c_count = dataset.c;
  std::vector<double> z_max(c_count + 1, -kInf);
  std::vector<double> z_min(c_count + 1, kInf);
  for (int i = 0; i < dataset.n; ++i) {
    const int c = dataset.responses[i];
    z_max[c] = std::max(z_max[c], state.z[i]);
    z_min[c] = std::min(z_min[c], state.z[i]);
  }
  auto& delta = state.cutpoints.delta;
  for (int c = 1; c <= c_count - 1; ++c) {
    const double lo = std::max(z_max[c], delta[c - 1]);
    const double hi = std::min(z_min[c + 1], delta[c + 1]);
    if (!(lo < hi)) {
      throw NumericError("empty cutpoint interval at delta_" +
                         std::to_string(c) + "; z violates current cutpoints");
    }
    delta[c] = rng.uniform(lo, hi);
  }
}

PosteriorSummary summarize(const Eigen::MatrixXd& retained, int p,
                           int categories) {
  if (retained.rows() < 1) {
    throw std::domain_error("summarize needs at least one retained draw");
  }
  const int k = categories - 1;
  if (retained.cols() != p + k + 1) {
    throw std::domain_error("retained draw width mismatch");
  }
  PosteriorSummary s;
  s.p = p;
  s.categories = categories;
  const Eigen::VectorXd means = retained.colwise().mean();
  s.mean_beta = means.head(p);
  s.mean_cutpoints = means.segment(p, k);
  s.mean_sigma = means[p + k];
  const double delta_last = s.mean_cutpoints[k - 1];
  if (std::abs(delta_last) < 1e-8) {
    throw NumericError("posterior mean of delta_{C-1} is degenerate (near 0)");
  }
  s.ratios = s.mean_beta / delta_last;
  s.retained_draws = retained;
  s.diagnostics.reserve(retained.cols());
  for (Eigen::Index j = 0; j < retained.cols(); ++j) {
    const auto col = retained.col(j);
    const double mean = means[j];
    const double var =
        (col.array() - mean).square().sum() / std::max<double>(1, col.size() - 1);
    s.diagnostics.push_back({mean, std::sqrt(var), col.minCoeff(), col.maxCoeff()});
  }
  return s;
}

PosteriorSummary run_chain(const OrdinalDataset& dataset, double q,
                           const Hyperparams& hyper, const FitConfig& config,
                           Rng& rng) {
  validate(dataset);
  validate(hyper, dataset.p);
  validate(config);
  const QuantileSpec spec = mixture_constants(q);

  ChainState state = init_state(dataset, rng);
  if (config.variant == Variant::FixedCutpoints) {
    if (static_cast<int>(config.fixed_cutpoints.size()) != dataset.c - 1) {
      throw std::domain_error("fixed cutpoints must have C-1 entries");
    }
    state.cutpoints = Cutpoints::from_interior(config.fixed_cutpoints);
  }

  const int k = dataset.c - 1;
  const int retained_count = (config.iterations - config.burnin) / config.thin;
  Eigen::MatrixXd retained(retained_count, dataset.p + k + 1);
  int row = 0;

  Eigen::VectorXd xbeta = dataset.covariates * state.beta;
  for (int t = 1; t <= config.iterations; ++t) {
    state.sigma =
        config.variant == Variant::FullGibbs
            ? step_sigma_full(state, xbeta, dataset, spec, hyper, rng)
            : step_sigma_collapsed(state.z, xbeta, dataset, spec, hyper, rng);
    step_v(state, xbeta, spec, rng);
    step_beta(state, dataset, spec, hyper, rng);
    xbeta.noalias() = dataset.covariates * state.beta;
    step_z(state, xbeta, dataset, spec, rng);
    if (config.variant != Variant::FixedCutpoints) {
      step_delta(state, dataset, rng);
    }
    if (t > config.burnin && (t - config.burnin) % config.thin == 0 &&
        row < retained_count) {
      retained.row(row).head(dataset.p) = state.beta;
      for (int j = 0; j < k; ++j) {
        retained(row, dataset.p + j) = state.cutpoints.delta[j + 1];
      }
      retained(row, dataset.p + k) = state.sigma;
      ++row;
    }
  }
  return summarize(retained, dataset.p, dataset.c);
}

}  // namespace borps
