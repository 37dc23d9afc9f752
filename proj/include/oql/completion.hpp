#pragma once

#include <vector>

#include "oql/core.hpp"

namespace oql {

// Real symmetric N x N partial matrix specified on its diagonal and first
// row/column only. The diagonal is fixed: w_11 = 1/2, w_ii = 1/(2(N-1)).
// Off-star entries are free.
class PartialStarMatrix {
 public:
  PartialStarMatrix(int dim, std::vector<double> first_row);

  int dim() const { return dim_; }
  // (w_12, ..., w_1N)
  const std::vector<double>& first_row() const { return first_row_; }

  double head_diagonal() const { return 0.5; }
  double tail_diagonal() const { return 0.5 / (dim_ - 1); }
  // 1 / (2 sqrt(N-1))
  double entry_bound() const;

 private:
  int dim_;
  std::vector<double> first_row_;
};

// Raised by complete_to_density when the entry bound fails.
class PatternError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct PatternViolation {
  int column = 0;  // 1-based matrix column i of w_1i, i >= 2
  double value = 0.0;
  double excess = 0.0;  // |w_1i| - bound
};

struct PatternReport {
  bool pass = true;
  std::vector<PatternViolation> violations;
};

PatternReport validate_star_pattern(const PartialStarMatrix& p);

struct CliqueResult {
  int column = 0;  // clique {1, column}
  double determinant = 0.0;
  bool psd = true;
};

struct CliqueReport {
  bool pass = true;
  std::vector<CliqueResult> cliques;
};

// 2x2 principal submatrix test on every edge clique {1, i} of the star graph.
CliqueReport clique_psd_check(const PartialStarMatrix& p);

// Fills the free entries with M_ij = 2 w_1i w_1j (i, j >= 2, i != j). Then
// M = u u^T + diag(0, d_2, ..., d_N) with u = (1/sqrt2, sqrt2 w_12, ...),
// d_i = 1/(2(N-1)) - 2 w_1i^2 >= 0, so M is a density matrix whenever the
// entry bound holds. Specified entries are copied verbatim.
DensityMatrix complete_to_density(const PartialStarMatrix& p);

}  // namespace oql
