#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "oql/core.hpp"
#include "oql/trees.hpp"

namespace oql {

enum class VerifyMode { exhaustive, sampled };
std::string_view to_string(VerifyMode m);

struct VerifyOptions {
  std::size_t budget = 10000;  // max paths; exhaustive when 2^depth <= budget
  std::uint64_t seed = 0;
  bool record_paths = false;
  unsigned workers = 0;
};

struct PathMargin {
  Path bits;
  double min_margin = 0.0;
  int level = 0;  // 1-based level attaining min_margin
};

// Worst-case numerical health of the witnesses seen during verification.
struct WitnessDiagnostics {
  double min_eigenvalue = 1.0;
  double max_trace_residual = 0.0;
  double max_norm_residual = 0.0;     // pure witnesses only
  double max_purity_residual = 0.0;   // pure witnesses only
};

struct ShatterReport {
  VerifyMode mode = VerifyMode::exhaustive;
  std::size_t paths_checked = 0;
  double delta = 0.0;
  double min_margin = 0.0;
  bool pass_at_half_delta = false;
  bool pass_at_delta = false;
  Path worst_path;
  int worst_level = 0;
  WitnessDiagnostics witness;
  std::vector<PathMargin> paths;  // filled when record_paths
};

// min over levels of eps_t [Tr(x_t(eps) omega(eps)) - v_t(eps)] for one full path.
PathMargin path_margin(const ShatterTree& tree, const DensityMatrix& witness, Bits path);

// Raises ValidationError naming the path when a witness is not a density matrix.
ShatterReport verify_shattering(const ShatterTree& tree, const WitnessMap& witness, double delta,
                                const VerifyOptions& options = {});

struct PrefixReport {
  std::size_t pairs_checked = 0;
  double max_discrepancy = 0.0;
  Path path_a;
  Path path_b;
  int level = 0;
};

// Pairs of full paths sharing the first t-1 bits; reports max |v_t(a) - v_t(b)|.
// Each sample also tries the extreme suffixes (all +1 vs all -1).
PrefixReport check_prefix_measurability(const ShatterTree& tree, std::size_t budget = 10000,
                                        std::uint64_t seed = 0);

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Largest T <= t_max such that some depth-T tree over the measurement grid,
// with v-values on the grid {k delta/4} in [0,1], is shattered by the
// hypotheses at margin delta/2. Exhaustive with memoization; throws
// BudgetExceeded rather than returning a truncated answer.
int brute_force_sfat(const std::vector<DensityMatrix>& hypotheses,
                     const std::vector<Measurement>& measurements, double delta, int t_max,
                     std::size_t budget = 20'000'000);

struct HypothesisSet {
  bool all_states = false;  // sup over every density matrix (exact mode)
  std::vector<DensityMatrix> states;

  static HypothesisSet all();
  // count random pure states + I/N + the N basis projectors.
  static HypothesisSet sampled(int dim, std::size_t count, std::uint64_t seed);
};

struct RademacherEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::size_t num_paths = 0;
};

// (1/T) E_eps[ sup_h sum_t eps_t Tr(x_t(eps) h) ] by Monte Carlo over paths.
RademacherEstimate sequential_rademacher_estimate(const ShatterTree& x_tree,
                                                  const HypothesisSet& hypotheses,
                                                  std::size_t num_paths, std::uint64_t seed,
                                                  unsigned workers = 0);

struct RegretBounds {
  double upper = 0.0;
  double lower = 0.0;
  double alpha = 0.0;  // minimizer of the upper bound on the grid
};

// Upper: inf_alpha 4 alpha T L + 12 L sqrt(T) int_alpha^1 sqrt(sfat_b log(2eT/b)) db,
// lower: (1/(4 sqrt2)) sqrt(delta^2 T min(sfat_delta, T)), with sfat_b = n / b^2.
RegretBounds theoretical_bounds(int n_qubits, double horizon, double delta, double lipschitz);

}  // namespace oql
