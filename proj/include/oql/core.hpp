#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "oql/rng.hpp"

namespace oql {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

namespace tol {
inline constexpr double hermitian = 1e-10;       // relative to 1 + max|entry|
inline constexpr double psd = 1e-9;              // min eigenvalue floor
inline constexpr double trace = 1e-9;
inline constexpr double spectrum = 1e-9;         // measurement eigenvalues in [0,1]
inline constexpr double unit_norm = 1e-9;
inline constexpr double eigen_roundtrip = 1e-8;  // relative to 1 + max|entry|
}  // namespace tol

// Raised when a matrix or vector violates the invariant of the type it is
// being turned into.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PureState;

class HermitianOperator {
 public:
  explicit HermitianOperator(CMatrix m);

  static HermitianOperator zero(int dim);
  static HermitianOperator identity(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }

 protected:
  struct Unchecked {};
  HermitianOperator(CMatrix m, Unchecked) : m_(std::move(m)) {}

  CMatrix m_;
};

// Two-outcome POVM element: Hermitian with spectrum in [0, 1].
class Measurement : public HermitianOperator {
 public:
  explicit Measurement(CMatrix m);
  explicit Measurement(const HermitianOperator& op) : Measurement(op.matrix()) {}

  // Rank-1 projector |v><v|; exact by construction for a unit vector.
  static Measurement projector(const PureState& v);
  static Measurement basis_projector(int dim, int index);

 private:
  Measurement(CMatrix m, Unchecked) : HermitianOperator(std::move(m), Unchecked{}) {}
};

class PureState {
 public:
  explicit PureState(CVector amplitudes);

  static PureState basis(int dim, int index);

  int dim() const { return static_cast<int>(amps_.size()); }
  const CVector& amplitudes() const { return amps_; }

 private:
  CVector amps_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix m);

  // |psi><psi| is positive semidefinite with unit trace whenever psi is a
  // unit vector, so no spectral check is needed.
  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }

 private:
  struct Unchecked {};
  DensityMatrix(CMatrix m, Unchecked) : m_(std::move(m)) {}

  CMatrix m_;
};

struct EigenDecomposition {
  RVector values;   // ascending
  CMatrix vectors;  // orthonormal columns
};

EigenDecomposition hermitian_eigen(const HermitianOperator& m);

// Re Tr(E rho).
double expectation(const Measurement& e, const DensityMatrix& rho);
// Re Tr(A B) for arbitrary square matrices of equal size.
double trace_product(const CMatrix& a, const CMatrix& b);

HermitianOperator matrix_exp_hermitian(const HermitianOperator& h);

struct DensityCheckTolerance {
  double hermitian = tol::hermitian;
  double psd = tol::psd;
  double trace = tol::trace;
};

struct DensityCheck {
  bool pass = false;
  double min_eigenvalue = 0.0;
  double trace_residual = 0.0;
  double hermiticity_residual = 0.0;
};

DensityCheck is_density(const CMatrix& m, const DensityCheckTolerance& tolerance = {});

Measurement projector(const PureState& v);

double purity(const DensityMatrix& rho);

// max |M - M^dagger| entry, reporting its location.
double max_asymmetry(const CMatrix& m, int* row = nullptr, int* col = nullptr);

enum class StateKind { pure, mixed };

PureState random_pure_state(int dim, Rng& rng);
DensityMatrix random_state(StateKind kind, int dim, Rng& rng);
DensityMatrix random_state(StateKind kind, int dim, std::uint64_t seed);
Measurement random_measurement(int dim, Rng& rng);
Measurement random_measurement(int dim, std::uint64_t seed);

// Stable short fingerprint of a matrix, used as a measurement id in transcripts.
std::string matrix_hash(const CMatrix& m);

}  // namespace oql
