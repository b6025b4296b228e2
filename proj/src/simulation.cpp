#include "borps/simulation.hpp"

#include <cmath>

#include "borps/distributions.hpp"

namespace borps {

namespace {

double sample_error(ErrorLaw law, Rng& rng) {
  const double u = rng.uniform();
  return law == ErrorLaw::Normal ? normal_quantile(u)
                                 : quantile_of(RefDist::StandardLaplace, u);
}

std::vector<std::string> three_labels() { return {"1", "2", "3"}; }

// Builds a dataset from a latent-variable recipe, regenerating when a
// category comes up empty (possible at extreme quantiles with small n).
template <typename RowFn>
OrdinalDataset generate_thresholded(int n, int p,
                                    const std::vector<double>& interior,
                                    RowFn&& fill_row, Rng& rng) {
  OrdinalDataset ds;
  ds.n = n;
  ds.p = p;
  ds.c = static_cast<int>(interior.size()) + 1;
  ds.covariates.resize(n, p);
  ds.responses.resize(n);
  ds.category_labels.resize(ds.c);
  for (int c = 0; c < ds.c; ++c) ds.category_labels[c] = std::to_string(c + 1);

  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<int> counts(ds.c, 0);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd x(p);
      const double z = fill_row(x, rng);
      ds.covariates.row(i) = x;
      ds.responses[i] = threshold(z, interior);
      ++counts[ds.responses[i] - 1];
    }
    bool all_seen = true;
    for (int c : counts) all_seen = all_seen && c > 0;
    if (all_seen) return ds;
  }
  throw std::domain_error(
      "failed to observe every category after 100 regenerations");
}

}  // namespace

double shift_for_quantile(ErrorLaw law, double q) {
  return -quantile_of(law == ErrorLaw::Normal ? RefDist::StandardNormal
                                              : RefDist::StandardLaplace,
                      q);
}

int threshold(double z, const std::vector<double>& interior) {
  int c = 1;
  for (double d : interior) {
    if (z < d) break;
    ++c;
  }
  return c;
}

std::pair<OrdinalDataset, GroundTruth> gen_single(Design design, ErrorLaw law,
                                                  double q, int n, Rng& rng) {
  if (design != Design::SingleNonNull && design != Design::SingleNull) {
    throw std::domain_error("gen_single expects a single-covariate design");
  }
  const std::vector<double> interior{5.0, 8.0};
  const double shift = shift_for_quantile(law, q);
  const bool non_null = design == Design::SingleNonNull;

  OrdinalDataset ds = generate_thresholded(
      n, 1, interior,
      [&](Eigen::VectorXd& x, Rng& r) {
        x[0] = r.uniform(0.0, 4.0);
        const double e = sample_error(law, r);
        return non_null ? 3.0 * x[0] + e + shift : 12.0 * e;
      },
      rng);

  GroundTruth truth;
  truth.beta = Eigen::VectorXd::Constant(1, non_null ? 3.0 : 0.0);
  truth.cutpoints = interior;
  truth.ratios = truth.beta / interior.back();
  return {std::move(ds), std::move(truth)};
}

std::pair<OrdinalDataset, GroundTruth> gen_multi(Design design, ErrorLaw law,
                                                 double q, int n, Rng& rng) {
  if (design != Design::MultiNonNull && design != Design::MultiPartialNull) {
    throw std::domain_error("gen_multi expects a two-covariate design");
  }
  const std::vector<double> interior{5.0, 8.0};
  const double shift = shift_for_quantile(law, q);
  const bool non_null = design == Design::MultiNonNull;

  OrdinalDataset ds = generate_thresholded(
      n, 2, interior,
      [&](Eigen::VectorXd& x, Rng& r) {
        x[0] = r.uniform(0.0, 4.0);
        x[1] = r.uniform(0.0, 2.0);
        const double e = sample_error(law, r) + shift;
        return non_null ? 3.0 * x[0] + 2.0 * x[1] + e : 3.0 * x[0] + e;
      },
      rng);

  GroundTruth truth;
  truth.beta = Eigen::VectorXd(2);
  truth.beta << 3.0, (non_null ? 2.0 : 0.0);
  truth.cutpoints = interior;
  truth.ratios = truth.beta / interior.back();
  return {std::move(ds), std::move(truth)};
}

OrdinalDataset gen_custom(const Eigen::VectorXd& beta,
                          const std::vector<double>& interior_cutpoints,
                          double intercept,
                          const std::function<double(Rng&)>& error_sampler,
                          int n, Rng& rng) {
  const int p = static_cast<int>(beta.size());
  return generate_thresholded(
      n, p, interior_cutpoints,
      [&](Eigen::VectorXd& x, Rng& r) {
        for (int j = 0; j < p; ++j) x[j] = r.uniform(0.0, 4.0);
        return intercept + beta.dot(x) + error_sampler(r);
      },
      rng);
}

}  // namespace borps
