#include <doctest.h>

#include <cmath>
#include <limits>

#include "borps/distributions.hpp"
#include "borps/sampler.hpp"
#include "borps/simulation.hpp"

using namespace borps;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

OrdinalDataset small_dataset() {
  OrdinalDataset ds;
  ds.n = 6;
  ds.p = 1;
  ds.c = 3;
  ds.responses = {1, 1, 2, 2, 3, 3};
  ds.covariates.resize(6, 1);
  ds.covariates << 0.5, 1.0, 1.5, 2.0, 2.5, 3.0;
  ds.category_labels = {"1", "2", "3"};
  return ds;
}

double gamma_logpdf_unnorm(double x, double shape, double rate) {
  return (shape - 1.0) * std::log(x) - rate * x;
}

}  // namespace

TEST_CASE("init_state starting values") {
  const auto ds = small_dataset();
  Rng rng(1);
  const ChainState state = init_state(ds, rng);
  CHECK(state.beta.isZero());
  CHECK((state.v.array() == 1.0).all());
  CHECK((state.z.array() == 1.0).all());
  CHECK(state.sigma == 1.0);
  CHECK(state.cutpoints.strictly_increasing());
  CHECK(state.cutpoints.delta.size() == 4);
}

TEST_CASE("init_state cutpoints from unit covariate") {
  OrdinalDataset ds = small_dataset();
  ds.covariates.setOnes();
  for (int seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const ChainState state = init_state(ds, rng);
    const auto interior = state.cutpoints.interior();
    // R quantiles are all 1, so each delta_j = 2 u_j in (0,2).
    CHECK(interior[0] > 0.0);
    CHECK(interior[1] < 2.0);
    CHECK(interior[0] < interior[1]);
  }
}

TEST_CASE("collapsed sigma step gamma-mean oracle") {
  OrdinalDataset ds;
  ds.n = 2;
  ds.p = 1;
  ds.c = 2;
  ds.responses = {1, 2};
  ds.covariates = Eigen::MatrixXd::Zero(2, 1);
  ds.category_labels = {"1", "2"};

  Eigen::VectorXd z(2);
  z << 1.0, 2.0;
  const Eigen::VectorXd xbeta = Eigen::VectorXd::Zero(2);
  const QuantileSpec spec = mixture_constants(0.5);
  const Hyperparams hyper = Hyperparams::defaults(1);

  // S = 0.5*1 + 0.5*2 = 1.5, so sigma^-1 ~ Gamma(c0+2, d0+1.5).
  Rng rng(77);
  const int n = 100000;
  double sum_inv = 0.0;
  for (int i = 0; i < n; ++i) {
    sum_inv += 1.0 / step_sigma_collapsed(z, xbeta, ds, spec, hyper, rng);
  }
  const double expected = (hyper.c0 + 2.0) / (hyper.d0 + 1.5);
  CHECK(std::abs(sum_inv / n - expected) < 0.01 * expected);

  // Zero residuals: rate collapses to d0.
  Rng rng2(78);
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    sum2 += 1.0 / step_sigma_collapsed(xbeta, xbeta, ds, spec, hyper, rng2);
  }
  CHECK(std::abs(sum2 / n - (hyper.c0 + 2.0) / hyper.d0) <
        0.02 * (hyper.c0 + 2.0) / hyper.d0);
}

TEST_CASE("v step inverse-gaussian plug-in parameters") {
  OrdinalDataset ds = small_dataset();
  ChainState state;
  state.beta = Eigen::VectorXd::Zero(1);
  state.sigma = 1.0;
  state.v = Eigen::VectorXd::Ones(ds.n);
  state.z = Eigen::VectorXd::Constant(ds.n, 2.0);  // residual 2 everywhere
  state.cutpoints = Cutpoints::from_interior({5.0, 8.0});
  const Eigen::VectorXd xbeta = Eigen::VectorXd::Zero(ds.n);
  const QuantileSpec spec = mixture_constants(0.5);

  // v^-1 ~ IG(mean 1/(0.25*2) = 2, shape 1/(2*0.25) = 2):
  // E[v^-1] = 2, Var[v^-1] = mean^3/shape = 4.
  Rng rng(5);
  const int reps = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int r = 0; r < reps; ++r) {
    step_v(state, xbeta, spec, rng);
    const double inv = 1.0 / state.v[0];
    sum += inv;
    sumsq += inv * inv;
  }
  const double mean = sum / reps;
  const double var = sumsq / reps - mean * mean;
  CHECK(std::abs(mean - 2.0) < 0.02);
  CHECK(std::abs(var - 4.0) < 0.15);

  // Zero residual hits the floor but stays finite and positive.
  state.z.setZero();
  step_v(state, xbeta, spec, rng);
  for (int i = 0; i < ds.n; ++i) {
    CHECK(state.v[i] > 0.0);
    CHECK(std::isfinite(state.v[i]));
  }
}

TEST_CASE("beta step matches the weighted-least-squares hand computation") {
  OrdinalDataset ds;
  ds.n = 2;
  ds.p = 1;
  ds.c = 2;
  ds.responses = {1, 2};
  ds.covariates = Eigen::MatrixXd::Ones(2, 1);
  ds.category_labels = {"1", "2"};

  ChainState state;
  state.beta = Eigen::VectorXd::Zero(1);
  state.sigma = 0.5;
  state.v = Eigen::VectorXd::Ones(2);
  state.z.resize(2);
  state.z << 2.0, 4.0;
  state.cutpoints = Cutpoints::from_interior({3.0});

  const QuantileSpec spec = mixture_constants(0.5);
  Hyperparams hyper = Hyperparams::defaults(1);
  hyper.B0(0, 0) = 1e12;  // flat prior limit

  // beta_hat = 3 with posterior variance 1/(0.25/(2*0.5) * 2) = 2.
  Rng rng(9);
  const int reps = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int r = 0; r < reps; ++r) {
    step_beta(state, ds, spec, hyper, rng);
    sum += state.beta[0];
    sumsq += state.beta[0] * state.beta[0];
  }
  const double mean = sum / reps;
  const double var = sumsq / reps - mean * mean;
  CHECK(std::abs(mean - 3.0) < 0.02);
  CHECK(std::abs(var - 2.0) < 0.05);
}

TEST_CASE("z step respects the truncation intervals") {
  const auto ds = small_dataset();
  ChainState state;
  state.beta = Eigen::VectorXd::Constant(1, 2.0);
  state.sigma = 1.0;
  state.v = Eigen::VectorXd::Ones(ds.n);
  state.z = Eigen::VectorXd::Ones(ds.n);
  state.cutpoints = Cutpoints::from_interior({5.0, 8.0});
  const QuantileSpec spec = mixture_constants(0.25);
  const Eigen::VectorXd xbeta = ds.covariates * state.beta;

  Rng rng(2);
  for (int rep = 0; rep < 500; ++rep) {
    step_z(state, xbeta, ds, spec, rng);
    for (int i = 0; i < ds.n; ++i) {
      const int c = ds.responses[i];
      CHECK(state.z[i] > state.cutpoints.delta[c - 1]);
      CHECK(state.z[i] < state.cutpoints.delta[c]);
    }
  }
}

TEST_CASE("z step matches an independent truncated-normal oracle") {
  OrdinalDataset ds;
  ds.n = 2;
  ds.p = 1;
  ds.c = 2;
  ds.responses = {1, 2};
  ds.covariates = Eigen::MatrixXd::Ones(2, 1);
  ds.category_labels = {"1", "2"};

  ChainState state;
  state.beta = Eigen::VectorXd::Constant(1, 1.0);
  state.sigma = 0.7;
  state.v = Eigen::VectorXd::Constant(2, 0.4);
  state.z = Eigen::VectorXd::Ones(2);
  state.cutpoints = Cutpoints::from_interior({2.0});
  const QuantileSpec spec = mixture_constants(0.3);
  const Eigen::VectorXd xbeta = ds.covariates * state.beta;

  // Oracle CDF for observation 0: N(mean, var) restricted to (-inf, 2).
  const double mean = xbeta[0] + spec.theta * state.v[0];
  const double sd = std::sqrt(spec.tau * spec.tau * state.sigma * state.v[0]);
  const double fb = normal_cdf((2.0 - mean) / sd);
  auto oracle_cdf = [&](double x) {
    return normal_cdf((x - mean) / sd) / fb;
  };

  Rng rng(13);
  const int reps = 100000;
  std::vector<double> draws(reps);
  for (int r = 0; r < reps; ++r) {
    step_z(state, xbeta, ds, spec, rng);
    draws[r] = state.z[0];
  }
  std::sort(draws.begin(), draws.end());
  double d = 0.0;
  for (int i = 0; i < reps; ++i) {
    const double f = oracle_cdf(draws[i]);
    d = std::max(d, std::max(std::abs((i + 1.0) / reps - f),
                             std::abs(double(i) / reps - f)));
  }
  CHECK(d < 0.01);
}

TEST_CASE("delta step bounds by brute force") {
  const auto ds = small_dataset();
  ChainState state;
  state.beta = Eigen::VectorXd::Zero(1);
  state.sigma = 1.0;
  state.v = Eigen::VectorXd::Ones(ds.n);
  state.z.resize(ds.n);
  state.z << 3.1, 4.8, 5.3, 7.7, 8.2, 9.9;
  state.cutpoints = Cutpoints::from_interior({5.0, 8.0});

  // Brute-force bounds from the z vector.
  double max_z1 = -kInf, min_z2 = kInf, max_z2 = -kInf, min_z3 = kInf;
  for (int i = 0; i < ds.n; ++i) {
    if (ds.responses[i] == 1) max_z1 = std::max(max_z1, state.z[i]);
    if (ds.responses[i] == 2) {
      min_z2 = std::min(min_z2, state.z[i]);
      max_z2 = std::max(max_z2, state.z[i]);
    }
    if (ds.responses[i] == 3) min_z3 = std::min(min_z3, state.z[i]);
  }

  Rng rng(3);
  for (int rep = 0; rep < 5000; ++rep) {
    ChainState trial = state;
    step_delta(trial, ds, rng);
    const auto interior = trial.cutpoints.interior();
    CHECK(interior[0] > max_z1);  // 4.8
    CHECK(interior[0] < min_z2);  // 5.3
    CHECK(interior[1] > max_z2);  // 7.7
    CHECK(interior[1] < min_z3);  // 8.2
    CHECK(interior[0] < interior[1]);
  }
}

TEST_CASE("full-gibbs sigma conditional matches the joint-posterior profile") {
  // 3-point state; the sigma profile of the joint posterior must equal the
  // gamma conditional up to normalization.
  const int n = 3;
  const double q = 0.3;
  const QuantileSpec spec = mixture_constants(q);
  const double tau2 = spec.tau * spec.tau;
  const Hyperparams hyper = Hyperparams::defaults(1);

  Eigen::VectorXd z(n), v(n), xbeta(n);
  z << 1.2, -0.4, 2.7;
  v << 0.8, 1.5, 0.3;
  xbeta << 0.5, 0.1, 1.9;

  // Oracle: log of the sigma-dependent joint factors, density in phi=1/sigma.
  auto log_profile = [&](double phi) {
    double lp = (hyper.c0 - 1.0) * std::log(phi) - hyper.d0 * phi;  // prior
    for (int i = 0; i < n; ++i) {
      const double var = tau2 * v[i] / phi;  // likelihood normal terms
      const double r = z[i] - xbeta[i] - spec.theta * v[i];
      lp += -0.5 * std::log(var) - r * r / (2.0 * var);
      lp += std::log(phi) - phi * v[i];  // v_i ~ Gamma(1, phi)
    }
    return lp;
  };

  // Implementation's conditional: Gamma(c0 + 3n/2, d0 + sum v + Q/(2 tau^2)).
  double v_sum = 0.0, quad = 0.0;
  for (int i = 0; i < n; ++i) {
    v_sum += v[i];
    const double r = z[i] - spec.theta * v[i] - xbeta[i];
    quad += r * r / v[i];
  }
  const double shape = hyper.c0 + 1.5 * n;
  const double rate = hyper.d0 + v_sum + quad / (2.0 * tau2);

  for (auto [p1, p2] : std::vector<std::pair<double, double>>{
           {0.5, 2.0}, {1.0, 3.7}, {0.2, 0.9}}) {
    const double lhs = log_profile(p2) - log_profile(p1);
    const double rhs = gamma_logpdf_unnorm(p2, shape, rate) -
                       gamma_logpdf_unnorm(p1, shape, rate);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("full-gibbs sigma step rate with zero residuals") {
  OrdinalDataset ds = small_dataset();
  ChainState state;
  state.beta = Eigen::VectorXd::Zero(1);
  state.sigma = 1.0;
  state.v = Eigen::VectorXd::Constant(ds.n, 0.9);
  const QuantileSpec spec = mixture_constants(0.4);
  // Make the adjusted-response residuals exactly zero.
  const Eigen::VectorXd xbeta = Eigen::VectorXd::Zero(ds.n);
  state.z = spec.theta * state.v;
  state.cutpoints = Cutpoints::from_interior({5.0, 8.0});
  const Hyperparams hyper = Hyperparams::defaults(1);

  // rate = d0 + sum v, shape = c0 + 3n/2.
  Rng rng(31);
  const int reps = 100000;
  double sum_inv = 0.0;
  for (int r = 0; r < reps; ++r) {
    sum_inv += 1.0 / step_sigma_full(state, xbeta, ds, spec, hyper, rng);
  }
  const double expected =
      (hyper.c0 + 1.5 * ds.n) / (hyper.d0 + 0.9 * ds.n);
  CHECK(std::abs(sum_inv / reps - expected) < 0.01 * expected);
}

TEST_CASE("summarize ratios and error cases") {
  // Columns: beta, delta1, delta2, sigma (p=1, C=3).
  Eigen::MatrixXd retained(2, 4);
  retained << 3.0, 5.0, 8.0, 1.0, 3.0, 5.0, 8.0, 1.0;
  const auto s = summarize(retained, 1, 3);
  CHECK(s.ratios[0] == doctest::Approx(0.375));
  CHECK(s.mean_sigma == doctest::Approx(1.0));

  // Two covariates.
  Eigen::MatrixXd r2(1, 5);
  r2 << 3.0, 2.0, 5.0, 8.0, 1.0;
  const auto s2 = summarize(r2, 2, 3);
  CHECK(s2.ratios[0] == doctest::Approx(0.375));
  CHECK(s2.ratios[1] == doctest::Approx(0.25));

  // Ratio is mean(beta)/mean(delta), not the mean of per-draw ratios.
  Eigen::MatrixXd r3(2, 4);
  r3 << 2.0, 3.0, 4.0, 1.0, 4.0, 3.0, 12.0, 1.0;
  CHECK(summarize(r3, 1, 3).ratios[0] == doctest::Approx(3.0 / 8.0));

  Eigen::MatrixXd degenerate(1, 4);
  degenerate << 3.0, -1.0, 0.0, 1.0;
  CHECK_THROWS_AS(summarize(degenerate, 1, 3), NumericError);
}

TEST_CASE("run_chain is deterministic and keeps the sweep invariants") {
  Rng gen(101);
  auto [ds, truth] =
      gen_single(Design::SingleNonNull, ErrorLaw::Normal, 0.5, 120, gen);

  FitConfig config;
  config.iterations = 400;
  config.burnin = 200;
  const Hyperparams hyper = Hyperparams::defaults(ds.p);

  Rng a(555), b(555);
  const auto s1 = run_chain(ds, 0.5, hyper, config, a);
  const auto s2 = run_chain(ds, 0.5, hyper, config, b);
  CHECK(s1.retained_draws == s2.retained_draws);
  CHECK(s1.ratios == s2.ratios);
  CHECK(s1.retained_draws.rows() == 200);

  // Every retained draw keeps sigma > 0 and ordered cutpoints.
  for (Eigen::Index r = 0; r < s1.retained_draws.rows(); ++r) {
    CHECK(s1.retained_draws(r, 1) < s1.retained_draws(r, 2));
    CHECK(s1.retained_draws(r, 3) > 0.0);
  }
}

TEST_CASE("run_chain thinning controls the retained count") {
  Rng gen(7);
  auto [ds, truth] =
      gen_single(Design::SingleNonNull, ErrorLaw::Normal, 0.5, 80, gen);
  FitConfig config;
  config.iterations = 300;
  config.burnin = 100;
  config.thin = 4;
  Rng rng(1);
  const auto s = run_chain(ds, 0.5, Hyperparams::defaults(1), config, rng);
  CHECK(s.retained_draws.rows() == 50);
}

TEST_CASE("fixed-cutpoints variant keeps the supplied cutpoints") {
  Rng gen(15);
  auto [ds, truth] =
      gen_single(Design::SingleNonNull, ErrorLaw::Normal, 0.5, 120, gen);
  FitConfig config;
  config.iterations = 300;
  config.burnin = 100;
  config.variant = Variant::FixedCutpoints;
  config.fixed_cutpoints = {5.0, 8.0};
  Rng rng(2);
  const auto s = run_chain(ds, 0.5, Hyperparams::defaults(1), config, rng);
  for (Eigen::Index r = 0; r < s.retained_draws.rows(); ++r) {
    CHECK(s.retained_draws(r, 1) == 5.0);
    CHECK(s.retained_draws(r, 2) == 8.0);
  }
}

TEST_CASE("short chain already lands near the simulated ratio") {
  Rng gen(23);
  auto [ds, truth] =
      gen_single(Design::SingleNonNull, ErrorLaw::Normal, 0.5, 300, gen);
  FitConfig config;
  config.iterations = 4000;
  config.burnin = 2000;
  Rng rng(3);
  const auto s = run_chain(ds, 0.5, Hyperparams::defaults(1), config, rng);
  CHECK(std::abs(s.ratios[0] - 0.375) < 0.06);
}
