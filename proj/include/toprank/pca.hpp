#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace toprank::pca {

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Dominant eigenpair of a symmetric positive semidefinite matrix. Stops when
/// the unit iterate moves less than `tolerance` between steps.
EigenPair power_iteration(const Eigen::MatrixXd& symmetric, double tolerance = 1e-9,
                          std::size_t max_iterations = 1000, std::uint64_t seed = 0);

struct PcaResult {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;  // one column per component
  Eigen::VectorXd eigenvalues;
  double total_variance = 0.0;

  double explained_fraction() const;
};

/// Top `count` principal components of row-sample data (population
/// covariance), found by power iteration with deflation. Components beyond the
/// data dimension are zero.
PcaResult principal_components(const Eigen::MatrixXd& data, std::size_t count = 2,
                               double tolerance = 1e-9, std::size_t max_iterations = 1000);

/// Centered data times components; one row per sample.
Eigen::MatrixXd project(const PcaResult& pca, const Eigen::MatrixXd& data);

}  // namespace toprank::pca
