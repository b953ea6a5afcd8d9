#include "radiomap/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace radiomap {

namespace {

double jitter_scale(const Eigen::MatrixXd& m) {
  const double d = m.diagonal().cwiseAbs().mean();
  return d > 0.0 ? d : 1.0;
}

}  // namespace

Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& m) {
  const double scale = jitter_scale(m);
  for (double jitter = 0.0;;) {
    Eigen::MatrixXd a = m;
    if (jitter > 0.0) a.diagonal().array() += jitter * scale;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    if (jitter == 0.0) {
      jitter = 1e-12;
    } else if (jitter < 1e-6) {
      jitter *= 100.0;
    } else {
      throw std::runtime_error("cholesky_with_jitter: matrix not positive definite after jitter escalation");
    }
  }
}

namespace {

template <typename Rhs>
Rhs solve_spd_impl(const Eigen::MatrixXd& a, const Rhs& b) {
  const double scale = jitter_scale(a);
  for (double jitter = 0.0;;) {
    Eigen::MatrixXd m = a;
    if (jitter > 0.0) m.diagonal().array() += jitter * scale;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      Rhs x = ldlt.solve(b);
      double residual = (m * x - b).norm();
      for (int refine = 0; refine < 3 && residual > 1e-12 * (b.norm() + 1.0); ++refine) {
        x += ldlt.solve(b - m * x);
        residual = (m * x - b).norm();
      }
      if (residual <= 1e-8 * (b.norm() + 1.0)) return x;
    }
    if (jitter == 0.0) {
      jitter = 1e-12;
    } else if (jitter < 1e-6) {
      jitter *= 100.0;
    } else {
      throw std::runtime_error("solve_spd: system not solvable after jitter escalation");
    }
  }
}

}  // namespace

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  return solve_spd_impl(a, b);
}

Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return solve_spd_impl(a, b);
}

double spectral_norm(const Eigen::MatrixXd& a, int iterations) {
  if (a.size() == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(a.cols());
  v.normalize();
  double sigma2 = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd w = a.transpose() * (a * v);
    const double n = w.norm();
    if (n == 0.0) return 0.0;
    v = w / n;
    sigma2 = n;
  }
  return std::sqrt(sigma2);
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double threshold) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = soft_threshold(v(i), threshold);
  return out;
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations) {
  const Eigen::Index n = a.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Eigen::VectorXd w = a.transpose() * (b - a * x);
  const double tol = 1e-12 * (1.0 + b.norm());

  auto solve_passive = [&](const std::vector<bool>& set) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (set[static_cast<std::size_t>(j)]) idx.push_back(j);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    if (idx.empty()) return z;
    Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
    Eigen::VectorXd zp = ap.completeOrthogonalDecomposition().solve(b);
    for (std::size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zp(static_cast<Eigen::Index>(k));
    return z;
  };

  for (int outer = 0; outer < max_iterations; ++outer) {
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    Eigen::VectorXd z = solve_passive(passive);
    int inner = 0;
    while (true) {
      double min_passive = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)]) min_passive = std::min(min_passive, z(j));
      }
      if (min_passive > -tol || ++inner > max_iterations) break;
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0 && x(j) != z(j)) {
          alpha = std::min(alpha, x(j) / (x(j) - z(j)));
        }
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x(j) <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x(j) = 0.0;
        }
      }
      z = solve_passive(passive);
    }
    x = z;
    w = a.transpose() * (b - a * x);
  }
  return x.cwiseMax(0.0);
}

}  // namespace radiomap
