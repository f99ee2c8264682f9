#include "toprank/pca.hpp"

#include <random>

#include "toprank/errors.hpp"

namespace toprank::pca {

EigenPair power_iteration(const Eigen::MatrixXd& symmetric, double tolerance,
                          std::size_t max_iterations, std::uint64_t seed) {
  const Eigen::Index n = symmetric.rows();
  if (n == 0 || symmetric.cols() != n) throw InvalidArgument("power_iteration: need a square matrix");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  EigenPair out;
  out.vector.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) out.vector[k] = normal(rng);
  out.vector.normalize();

  for (std::size_t it = 1; it <= max_iterations; ++it) {
    Eigen::VectorXd next = symmetric * out.vector;
    const double norm = next.norm();
    out.iterations = it;
    if (norm == 0.0) {  // the iterate lies in the null space
      out.value = 0.0;
      out.converged = true;
      return out;
    }
    next /= norm;
    if (next.dot(out.vector) < 0.0) next = -next;
    const double step = (next - out.vector).norm();
    out.vector = next;
    if (step < tolerance) {
      out.converged = true;
      break;
    }
  }
  out.value = out.vector.dot(symmetric * out.vector);
  return out;
}

double PcaResult::explained_fraction() const {
  return total_variance > 0.0 ? eigenvalues.sum() / total_variance : 1.0;
}

PcaResult principal_components(const Eigen::MatrixXd& data, std::size_t count,
                               double tolerance, std::size_t max_iterations) {
  if (data.rows() == 0 || data.cols() == 0) throw InvalidArgument("pca: empty data");
  PcaResult out;
  out.mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - out.mean.transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(data.rows());
  out.total_variance = cov.trace();

  const auto k = static_cast<Eigen::Index>(count);
  out.components = Eigen::MatrixXd::Zero(data.cols(), k);
  out.eigenvalues = Eigen::VectorXd::Zero(k);
  for (Eigen::Index c = 0; c < std::min(k, data.cols()); ++c) {
    const auto pair = power_iteration(cov, tolerance, max_iterations, static_cast<std::uint64_t>(c));
    out.components.col(c) = pair.vector;
    out.eigenvalues[c] = pair.value;
    cov -= pair.value * pair.vector * pair.vector.transpose();
  }
  return out;
}

Eigen::MatrixXd project(const PcaResult& pca, const Eigen::MatrixXd& data) {
  if (data.cols() != pca.mean.size()) throw InvalidArgument("pca project: dimension mismatch");
  return (data.rowwise() - pca.mean.transpose()) * pca.components;
}

}  // namespace toprank::pca
