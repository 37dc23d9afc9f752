#include "oql/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

namespace oql {

namespace {

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw ValidationError(os.str());
  }
}

void require_hermitian(const CMatrix& m, const char* what) {
  require_square(m, what);
  int r = 0, c = 0;
  const double asym = max_asymmetry(m, &r, &c);
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if (!(asym <= tol::hermitian * scale)) {
    std::ostringstream os;
    os << what << ": not Hermitian, max asymmetry " << asym << " at entry (" << r << ", " << c
       << ")";
    throw ValidationError(os.str());
  }
}

CMatrix symmetrized(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

double max_asymmetry(const CMatrix& m, int* row, int* col) {
  double best = 0.0;
  int br = 0, bc = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      const double d = std::abs(m(i, j) - std::conj(m(j, i)));
      if (d > best || std::isnan(d)) {
        best = d;
        br = static_cast<int>(i);
        bc = static_cast<int>(j);
      }
    }
  }
  if (row) *row = br;
  if (col) *col = bc;
  return best;
}

HermitianOperator::HermitianOperator(CMatrix m) : m_(std::move(m)) {
  require_hermitian(m_, "HermitianOperator");
}

HermitianOperator HermitianOperator::zero(int dim) {
  return HermitianOperator(CMatrix::Zero(dim, dim), Unchecked{});
}

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(CMatrix::Identity(dim, dim), Unchecked{});
}

Measurement::Measurement(CMatrix m) : HermitianOperator(std::move(m)) {
  const auto eig = hermitian_eigen(*this);
  const double lo = eig.values(0);
  const double hi = eig.values(eig.values.size() - 1);
  if (lo < -tol::spectrum || hi > 1.0 + tol::spectrum) {
    std::ostringstream os;
    os << "Measurement: spectrum [" << lo << ", " << hi << "] not inside [0, 1]";
    throw ValidationError(os.str());
  }
}

Measurement Measurement::projector(const PureState& v) {
  const CVector& a = v.amplitudes();
  return Measurement(a * a.adjoint(), Unchecked{});
}

Measurement Measurement::basis_projector(int dim, int index) {
  return projector(PureState::basis(dim, index));
}

PureState::PureState(CVector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw ValidationError("PureState: empty amplitude vector");
  const double norm2 = amps_.squaredNorm();
  if (!(std::abs(norm2 - 1.0) <= tol::unit_norm)) {
    std::ostringstream os;
    os << "PureState: squared norm " << norm2 << " is not 1";
    throw ValidationError(os.str());
  }
}

PureState PureState::basis(int dim, int index) {
  if (dim < 1 || index < 0 || index >= dim) {
    std::ostringstream os;
    os << "PureState::basis: index " << index << " outside [0, " << dim << ")";
    throw std::invalid_argument(os.str());
  }
  CVector v = CVector::Zero(dim);
  v(index) = 1.0;
  return PureState(std::move(v));
}

DensityMatrix::DensityMatrix(CMatrix m) : m_(std::move(m)) {
  require_square(m_, "DensityMatrix");
  const DensityCheck check = is_density(m_);
  if (!check.pass) {
    std::ostringstream os;
    os << "DensityMatrix: invalid (min eigenvalue " << check.min_eigenvalue
       << ", trace residual " << check.trace_residual << ", hermiticity residual "
       << check.hermiticity_residual << ")";
    throw ValidationError(os.str());
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  const CVector& a = psi.amplitudes();
  return DensityMatrix(a * a.adjoint(), Unchecked{});
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim < 1) throw std::invalid_argument("maximally_mixed: dim must be positive");
  return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim), Unchecked{});
}

EigenDecomposition hermitian_eigen(const HermitianOperator& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(symmetrized(m.matrix()));
  if (solver.info() != Eigen::Success) throw std::runtime_error("hermitian_eigen: no convergence");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double trace_product(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.cols() || a.cols() != b.rows()) {
    std::ostringstream os;
    os << "trace_product: dimension mismatch " << a.rows() << " vs " << b.rows();
    throw std::invalid_argument(os.str());
  }
  return a.cwiseProduct(b.transpose()).sum().real();
}

double expectation(const Measurement& e, const DensityMatrix& rho) {
  if (e.dim() != rho.dim()) {
    std::ostringstream os;
    os << "expectation: measurement dim " << e.dim() << " != state dim " << rho.dim();
    throw std::invalid_argument(os.str());
  }
  return trace_product(e.matrix(), rho.matrix());
}

HermitianOperator matrix_exp_hermitian(const HermitianOperator& h) {
  const auto eig = hermitian_eigen(h);
  const RVector w = eig.values.array().exp().matrix();
  CMatrix out = eig.vectors * w.asDiagonal() * eig.vectors.adjoint();
  return HermitianOperator(symmetrized(out));
}

DensityCheck is_density(const CMatrix& m, const DensityCheckTolerance& tolerance) {
  DensityCheck out;
  if (m.rows() != m.cols() || m.rows() == 0) return out;
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  out.hermiticity_residual = max_asymmetry(m);
  out.trace_residual = std::abs(m.trace() - Complex(1.0, 0.0));
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(symmetrized(m), Eigen::EigenvaluesOnly);
  out.min_eigenvalue = solver.eigenvalues()(0);
  out.pass = out.hermiticity_residual <= tolerance.hermitian * scale &&
             out.min_eigenvalue >= -tolerance.psd && out.trace_residual <= tolerance.trace;
  return out;
}

Measurement projector(const PureState& v) { return Measurement::projector(v); }

double purity(const DensityMatrix& rho) { return trace_product(rho.matrix(), rho.matrix()); }

PureState random_pure_state(int dim, Rng& rng) {
  if (dim < 2) throw std::invalid_argument("random_pure_state: dim must be >= 2");
  CVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(rng.normal(), rng.normal());
  v /= v.norm();
  return PureState(std::move(v));
}

DensityMatrix random_state(StateKind kind, int dim, Rng& rng) {
  if (dim < 2) throw std::invalid_argument("random_state: dim must be >= 2");
  if (kind == StateKind::pure) return DensityMatrix::from_pure(random_pure_state(dim, rng));
  // Ginibre ensemble: G G^dagger / Tr.
  CMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(symmetrized(rho));
}

DensityMatrix random_state(StateKind kind, int dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_state(kind, dim, rng);
}

Measurement random_measurement(int dim, Rng& rng) {
  if (dim < 2) throw std::invalid_argument("random_measurement: dim must be >= 2");
  return projector(random_pure_state(dim, rng));
}

Measurement random_measurement(int dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_measurement(dim, rng);
}

std::string matrix_hash(const CMatrix& m) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](double x) {
    if (x == 0.0) x = 0.0;  // fold -0 into +0
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &x, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  };
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      feed(m(i, j).real());
      feed(m(i, j).imag());
    }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace oql
