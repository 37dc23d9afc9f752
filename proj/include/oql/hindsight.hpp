#pragma once

#include <vector>

#include "oql/core.hpp"
#include "oql/loss.hpp"

namespace oql {

// Euclidean projection onto {x >= 0, sum x = 1}.
RVector project_to_simplex(const RVector& v);

// Frobenius-nearest density matrix to a Hermitian matrix: eigendecompose,
// project the spectrum onto the simplex, reassemble.
DensityMatrix project_to_density(const CMatrix& hermitian);

double total_loss(const std::vector<Measurement>& measurements, const std::vector<double>& labels,
                  LossKind loss, const DensityMatrix& state);

struct HindsightOptions {
  int max_iterations = 10000;
  double tolerance = 1e-6;
  // Starting points; the result is never worse than any of them.
  std::vector<DensityMatrix> candidates;
};

struct HindsightResult {
  DensityMatrix state;
  double loss = 0.0;
  bool converged = false;
  int iterations = 0;
};

// argmin over density matrices of sum_t loss(Tr(E_t rho), y_t).
// L2: projected gradient with step 1/L, stopped on a Frank-Wolfe gap below
// tolerance. L1: projected subgradient with step ~ 1/sqrt(k), best iterate
// kept, restarted from the best iterate at half the step scale after 1000
// iterations without improvement above tolerance; converged means zero loss,
// a zero subgradient, or the step scale falling below tolerance.
HindsightResult best_in_hindsight(const std::vector<Measurement>& measurements,
                                  const std::vector<double>& labels, LossKind loss,
                                  const HindsightOptions& options = {});

}  // namespace oql
