#include "borps/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace borps {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void validate(const OrdinalDataset& dataset) {
  if (dataset.c < 2) {
    throw std::domain_error("need at least 2 ordinal categories");
  }
  if (dataset.n != static_cast<int>(dataset.responses.size()) ||
      dataset.covariates.rows() != dataset.n ||
      dataset.covariates.cols() != dataset.p) {
    throw std::domain_error("dataset dimension mismatch");
  }
  std::vector<int> counts(dataset.c, 0);
  for (int y : dataset.responses) {
    if (y < 1 || y > dataset.c) {
      throw std::domain_error("response code outside {1.." +
                              std::to_string(dataset.c) + "}");
    }
    ++counts[y - 1];
  }
  for (int c = 0; c < dataset.c; ++c) {
    if (counts[c] == 0) {
      throw std::domain_error("unobserved category " + std::to_string(c + 1));
    }
  }
  if (!dataset.covariates.allFinite()) {
    throw std::domain_error("covariate matrix has non-finite entries");
  }
}

Hyperparams Hyperparams::defaults(int p) {
  Hyperparams h;
  h.b0 = Eigen::VectorXd::Zero(p);
  h.B0 = 1e6 * Eigen::MatrixXd::Identity(p, p);
  return h;
}

void validate(const Hyperparams& hyper, int p) {
  if (!(hyper.c0 > 0.0) || !(hyper.d0 > 0.0)) {
    throw std::domain_error("c0 and d0 must be positive");
  }
  if (hyper.b0.size() != p || hyper.B0.rows() != p || hyper.B0.cols() != p) {
    throw std::domain_error("hyperparameter dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(hyper.B0);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error("B0 must be symmetric positive definite");
  }
}

void validate(const FitConfig& config) {
  if (config.iterations <= 0 || config.burnin < 0 ||
      config.burnin >= config.iterations || config.thin <= 0) {
    throw std::domain_error("need 0 <= burnin < iterations and thin >= 1");
  }
  if (config.variant == Variant::FixedCutpoints) {
    if (config.fixed_cutpoints.empty() ||
        !std::is_sorted(config.fixed_cutpoints.begin(),
                        config.fixed_cutpoints.end(),
                        std::less_equal<double>())) {
      throw std::domain_error(
          "fixed-cutpoints variant needs strictly increasing interior values");
    }
    for (double d : config.fixed_cutpoints) {
      if (!std::isfinite(d)) {
        throw std::domain_error("fixed cutpoints must be finite");
      }
    }
  }
}

Cutpoints Cutpoints::from_interior(const std::vector<double>& interior) {
  Cutpoints cp;
  cp.delta.reserve(interior.size() + 2);
  cp.delta.push_back(-kInf);
  cp.delta.insert(cp.delta.end(), interior.begin(), interior.end());
  cp.delta.push_back(kInf);
  if (!cp.strictly_increasing()) {
    throw std::domain_error("cutpoints must be strictly increasing");
  }
  return cp;
}

std::vector<double> Cutpoints::interior() const {
  return {delta.begin() + 1, delta.end() - 1};
}

bool Cutpoints::strictly_increasing() const {
  for (std::size_t j = 1; j < delta.size(); ++j) {
    if (!(delta[j - 1] < delta[j])) return false;
  }
  return true;
}

OrdinalDataset encode_dataset(const std::vector<std::string>& raw_labels,
                              const Eigen::MatrixXd& covariates,
                              const std::vector<std::string>& label_order) {
  if (static_cast<Eigen::Index>(raw_labels.size()) != covariates.rows()) {
    throw std::domain_error("label count does not match covariate rows");
  }
  std::unordered_map<std::string, int> code;
  for (std::size_t j = 0; j < label_order.size(); ++j) {
    if (!code.emplace(label_order[j], static_cast<int>(j) + 1).second) {
      throw std::domain_error("duplicate label in order: " + label_order[j]);
    }
  }
  OrdinalDataset ds;
  ds.n = static_cast<int>(raw_labels.size());
  ds.p = static_cast<int>(covariates.cols());
  ds.c = static_cast<int>(label_order.size());
  ds.covariates = covariates;
  ds.category_labels = label_order;
  ds.responses.reserve(raw_labels.size());
  for (const auto& label : raw_labels) {
    auto it = code.find(label);
    if (it == code.end()) {
      throw std::domain_error("unknown label: " + label);
    }
    ds.responses.push_back(it->second);
  }
  validate(ds);
  return ds;
}

Standardization standardize_covariates(const OrdinalDataset& dataset) {
  Standardization out;
  out.dataset = dataset;
  const int n = dataset.n;
  const int p = dataset.p;
  if (n < 2) {
    throw std::domain_error("standardization needs at least 2 rows");
  }
  out.means = dataset.covariates.colwise().mean();
  out.sds.resize(p);
  for (int j = 0; j < p; ++j) {
    const Eigen::VectorXd centered =
        dataset.covariates.col(j).array() - out.means[j];
    const double var = centered.squaredNorm() / (n - 1);
    if (!(var > 0.0)) {
      throw std::domain_error("covariate column " + std::to_string(j + 1) +
                              " is constant");
    }
    out.sds[j] = std::sqrt(var);
    out.dataset.covariates.col(j) = centered / out.sds[j];
  }
  return out;
}

QuantileSpec mixture_constants(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("quantile must lie in (0,1)");
  }
  const double denom = q * (1.0 - q);
  return {q, (1.0 - 2.0 * q) / denom, std::sqrt(2.0 / denom)};
}

}  // namespace borps
