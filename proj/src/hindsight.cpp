#include "oql/hindsight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace oql {

namespace {

// Isometry between N x N Hermitian matrices and R^{N^2}:
// Tr(A B) = <phi(A), phi(B)>.
Eigen::VectorXd phi(const CMatrix& h) {
  const auto n = h.rows();
  Eigen::VectorXd x(n * n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) x(k++) = h(i, i).real();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      x(k++) = std::numbers::sqrt2 * h(i, j).real();
      x(k++) = std::numbers::sqrt2 * h(i, j).imag();
    }
  return x;
}

CMatrix unphi(const Eigen::VectorXd& x, Eigen::Index n) {
  CMatrix h(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = x(k++);
  const double s = std::numbers::sqrt2 / 2.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Complex z(s * x(k), s * x(k + 1));
      k += 2;
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  return h;
}

double sign0(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

double sum_loss(const Eigen::VectorXd& pred, const Eigen::VectorXd& y, LossKind loss) {
  const Eigen::VectorXd r = pred - y;
  return loss == LossKind::l1 ? r.cwiseAbs().sum() : r.squaredNorm();
}

}  // namespace

RVector project_to_simplex(const RVector& v) {
  const auto n = v.size();
  if (n == 0) throw std::invalid_argument("project_to_simplex: empty vector");
  RVector u = v;
  std::sort(u.data(), u.data() + n, std::greater<>());
  double cumsum = 0.0, theta = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cumsum += u(j);
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u(j) - t > 0) theta = t;
  }
  RVector out = (v.array() - theta).cwiseMax(0.0);
  return out / out.sum();
}

DensityMatrix project_to_density(const CMatrix& hermitian) {
  const auto eig = hermitian_eigen(HermitianOperator(hermitian));
  const RVector w = project_to_simplex(eig.values);
  CMatrix m = eig.vectors * w.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityMatrix(std::move(m));
}

double total_loss(const std::vector<Measurement>& measurements, const std::vector<double>& labels,
                  LossKind loss, const DensityMatrix& state) {
  if (measurements.size() != labels.size())
    throw std::invalid_argument("total_loss: measurement and label counts differ");
  double s = 0.0;
  for (std::size_t t = 0; t < measurements.size(); ++t)
    s += loss_value(loss, expectation(measurements[t], state), labels[t]);
  return s;
}

HindsightResult best_in_hindsight(const std::vector<Measurement>& measurements,
                                  const std::vector<double>& labels, LossKind loss,
                                  const HindsightOptions& options) {
  if (measurements.empty()) throw std::invalid_argument("best_in_hindsight: empty history");
  if (measurements.size() != labels.size())
    throw std::invalid_argument("best_in_hindsight: measurement and label counts differ");
  const int n = measurements.front().dim();
  const auto rounds = static_cast<Eigen::Index>(measurements.size());

  Eigen::MatrixXd a(rounds, static_cast<Eigen::Index>(n) * n);
  Eigen::VectorXd y(rounds);
  for (Eigen::Index t = 0; t < rounds; ++t) {
    if (measurements[t].dim() != n) throw std::invalid_argument("best_in_hindsight: mixed dims");
    a.row(t) = phi(measurements[t].matrix()).transpose();
    y(t) = labels[t];
  }

  HindsightResult best{DensityMatrix::maximally_mixed(n), 0.0, false, 0};
  best.loss = sum_loss(a * phi(best.state.matrix()), y, loss);
  for (const auto& c : options.candidates) {
    if (c.dim() != n) throw std::invalid_argument("best_in_hindsight: candidate dim mismatch");
    const double l = sum_loss(a * phi(c.matrix()), y, loss);
    if (l < best.loss) best = {c, l, false, 0};
  }
  if (best.loss <= 0.0) {
    best.converged = true;
    return best;
  }

  Eigen::VectorXd theta = phi(best.state.matrix());
  auto project = [n](const Eigen::VectorXd& x) { return project_to_density(unphi(x, n)); };

  if (loss == LossKind::l2) {
    const Eigen::MatrixXd q = a.transpose() * a;
    const Eigen::VectorXd b = a.transpose() * y;
    const double lipschitz =
        2.0 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q, Eigen::EigenvaluesOnly)
                  .eigenvalues()
                  .maxCoeff();
    if (!(lipschitz > 0.0)) {
      best.converged = true;
      return best;
    }
    for (int k = 1; k <= options.max_iterations; ++k) {
      best.iterations = k;
      const Eigen::VectorXd grad = 2.0 * (q * theta - b);
      // Frank-Wolfe gap <grad, rho> - min_sigma <grad, sigma> bounds f(rho) - f*.
      const double lmin =
          hermitian_eigen(HermitianOperator(unphi(grad, n))).values.minCoeff();
      if (grad.dot(theta) - lmin <= options.tolerance) {
        best.converged = true;
        break;
      }
      DensityMatrix next = project(theta - grad / lipschitz);
      theta = phi(next.matrix());
      const double l = sum_loss(a * theta, y, loss);
      if (l <= best.loss) {
        best.state = std::move(next);
        best.loss = l;
      }
    }
    return best;
  }

  constexpr int kWindow = 1000;
  // Restarted from the best iterate with a halved step scale whenever a
  // window brings no progress.
  double scale = std::numbers::sqrt2;
  double checkpoint = best.loss;
  int local = 0;
  for (int k = 1; k <= options.max_iterations; ++k) {
    best.iterations = k;
    ++local;
    const Eigen::VectorXd r = a * theta - y;
    const Eigen::VectorXd g = a.transpose() * r.unaryExpr(&sign0);
    const double gnorm = g.norm();
    if (gnorm == 0.0) {
      best.converged = true;
      break;
    }
    DensityMatrix next = project(theta - (scale / (gnorm * std::sqrt(static_cast<double>(local)))) * g);
    theta = phi(next.matrix());
    const double l = sum_loss(a * theta, y, loss);
    if (l < best.loss) {
      best.state = std::move(next);
      best.loss = l;
    }
    if (best.loss <= 0.0) {
      best.converged = true;
      break;
    }
    if (k % kWindow == 0) {
      if (checkpoint - best.loss <= options.tolerance) {
        scale *= 0.5;
        if (scale < options.tolerance) {
          best.converged = true;
          break;
        }
        theta = phi(best.state.matrix());
        local = 0;
      }
      checkpoint = best.loss;
    }
  }
  return best;
}

}  // namespace oql
