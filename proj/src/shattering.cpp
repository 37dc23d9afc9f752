#include "oql/shattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <unordered_map>

#include "oql/parallel.hpp"

namespace oql {

namespace {

std::string format_path(Bits bits) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < bits.size(); ++i) os << (i ? "," : "") << (bits[i] > 0 ? "+1" : "-1");
  os << ']';
  return os.str();
}

Path path_from_index(std::uint64_t index, int depth) {
  Path p(static_cast<std::size_t>(depth));
  for (int k = 0; k < depth; ++k) p[k] = ((index >> k) & 1u) ? -1 : 1;
  return p;
}

Path random_path(int depth, Rng& rng) {
  Path p(static_cast<std::size_t>(depth));
  for (auto& b : p) b = rng.sign();
  return p;
}

struct PathResult {
  PathMargin margin;
  WitnessDiagnostics diag;
};

}  // namespace

std::string_view to_string(VerifyMode m) {
  return m == VerifyMode::exhaustive ? "exhaustive" : "sampled";
}

PathMargin path_margin(const ShatterTree& tree, const DensityMatrix& witness, Bits path) {
  if (static_cast<int>(path.size()) != tree.depth) {
    std::ostringstream os;
    os << "path_margin: path length " << path.size() << " != tree depth " << tree.depth;
    throw std::invalid_argument(os.str());
  }
  if (witness.dim() != tree.dim) throw std::invalid_argument("path_margin: witness dim mismatch");
  // The alphabet is small; evaluate every letter once.
  std::vector<double> values(tree.alphabet.size());
  for (std::size_t j = 0; j < values.size(); ++j) values[j] = expectation(tree.alphabet[j], witness);

  PathMargin out;
  out.bits.assign(path.begin(), path.end());
  out.min_margin = std::numeric_limits<double>::infinity();
  for (int t = 1; t <= tree.depth; ++t) {
    const auto prefix = path.first(static_cast<std::size_t>(t - 1));
    const double tr = values.at(tree.x_index(prefix));
    const double m = path[t - 1] * (tr - tree.v_value(path, t));
    if (m < out.min_margin) {
      out.min_margin = m;
      out.level = t;
    }
  }
  return out;
}

ShatterReport verify_shattering(const ShatterTree& tree, const WitnessMap& witness, double delta,
                                const VerifyOptions& options) {
  if (options.budget < 1) throw std::invalid_argument("verify_shattering: budget must be >= 1");
  if (tree.depth < 1) throw std::invalid_argument("verify_shattering: empty tree");
  if (!witness.state) throw std::invalid_argument("verify_shattering: tree has no witness map");

  ShatterReport report;
  report.delta = delta;
  const bool exhaustive =
      tree.depth < 63 && (std::uint64_t{1} << tree.depth) <= options.budget;
  report.mode = exhaustive ? VerifyMode::exhaustive : VerifyMode::sampled;
  const std::size_t count =
      exhaustive ? (std::size_t{1} << tree.depth) : options.budget + 2;

  auto make_path = [&](std::size_t i) -> Path {
    if (exhaustive) return path_from_index(i, tree.depth);
    if (i == options.budget) return Path(tree.depth, 1);
    if (i == options.budget + 1) return Path(tree.depth, -1);
    Rng rng = Rng(options.seed).split(i);
    return random_path(tree.depth, rng);
  };

  std::vector<PathResult> results(count);
  parallel_for(
      count,
      [&](std::size_t i) {
        const Path p = make_path(i);
        PathResult r;
        try {
          if (witness.pure) {
            const PureState psi = witness.pure(p);
            const DensityMatrix rho = DensityMatrix::from_pure(psi);
            r.diag.max_norm_residual = std::abs(psi.amplitudes().squaredNorm() - 1.0);
            r.diag.max_purity_residual = std::abs(purity(rho) - 1.0);
            const DensityCheck c = is_density(rho.matrix());
            r.diag.min_eigenvalue = c.min_eigenvalue;
            r.diag.max_trace_residual = c.trace_residual;
            r.margin = path_margin(tree, rho, p);
          } else {
            const DensityMatrix rho = witness.state(p);
            const DensityCheck c = is_density(rho.matrix());
            r.diag.min_eigenvalue = c.min_eigenvalue;
            r.diag.max_trace_residual = c.trace_residual;
            r.margin = path_margin(tree, rho, p);
          }
        } catch (const ValidationError& e) {
          throw ValidationError("witness for path " + format_path(p) + " is invalid: " + e.what());
        }
        results[i] = std::move(r);
      },
      options.workers);

  report.paths_checked = count;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (auto& r : results) {
    if (r.margin.min_margin < report.min_margin) {
      report.min_margin = r.margin.min_margin;
      report.worst_path = r.margin.bits;
      report.worst_level = r.margin.level;
    }
    auto& w = report.witness;
    w.min_eigenvalue = std::min(w.min_eigenvalue, r.diag.min_eigenvalue);
    w.max_trace_residual = std::max(w.max_trace_residual, r.diag.max_trace_residual);
    w.max_norm_residual = std::max(w.max_norm_residual, r.diag.max_norm_residual);
    w.max_purity_residual = std::max(w.max_purity_residual, r.diag.max_purity_residual);
    if (options.record_paths) report.paths.push_back(std::move(r.margin));
  }
  constexpr double slack = 1e-9;
  report.pass_at_delta = report.min_margin >= delta - slack;
  report.pass_at_half_delta = report.min_margin >= delta / 2 - slack;
  return report;
}

PrefixReport check_prefix_measurability(const ShatterTree& tree, std::size_t budget,
                                        std::uint64_t seed) {
  PrefixReport report;
  if (tree.depth < 1) return report;
  Rng base(seed);
  auto consider = [&](const Path& a, const Path& b, int level) {
    ++report.pairs_checked;
    const double d = std::abs(tree.v_value(a, level) - tree.v_value(b, level));
    if (d > report.max_discrepancy || report.pairs_checked == 1) {
      report.max_discrepancy = d;
      report.path_a = a;
      report.path_b = b;
      report.level = level;
    }
  };
  for (std::size_t i = 0; i < budget; ++i) {
    Rng rng = base.split(i);
    const int level = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(tree.depth)));
    Path a = random_path(tree.depth, rng);
    Path b = a;
    for (int k = level - 1; k < tree.depth; ++k) b[k] = rng.sign();
    consider(a, b, level);
    for (int k = level - 1; k < tree.depth; ++k) {
      a[k] = 1;
      b[k] = -1;
    }
    consider(a, b, level);
  }
  return report;
}

namespace {

struct SfatSearch {
  std::vector<std::vector<double>> values;  // [measurement][hypothesis]
  std::vector<double> grid;
  double half_margin;
  std::size_t budget;
  std::size_t work = 0;
  std::unordered_map<std::uint64_t, int> memo[5];

  int depth(std::uint64_t mask, int cap) {
    if (mask == 0) return -1;
    if (cap == 0) return 0;
    if (auto it = memo[cap].find(mask); it != memo[cap].end()) return it->second;
    int best = 0;
    std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
    for (const auto& row : values) {
      for (double v : grid) {
        if (++work > budget) {
          std::ostringstream os;
          os << "brute_force_sfat: search budget of " << budget << " node evaluations exceeded";
          throw BudgetExceeded(os.str());
        }
        std::uint64_t plus = 0, minus = 0;
        for (std::size_t h = 0; h < row.size(); ++h) {
          if (!((mask >> h) & 1u)) continue;
          if (row[h] - v >= half_margin - 1e-12) plus |= std::uint64_t{1} << h;
          if (v - row[h] >= half_margin - 1e-12) minus |= std::uint64_t{1} << h;
        }
        if (!plus || !minus || !seen.insert({plus, minus}).second) continue;
        const int d = 1 + std::min(depth(plus, cap - 1), depth(minus, cap - 1));
        best = std::max(best, d);
        if (best == cap) break;
      }
      if (best == cap) break;
    }
    memo[cap][mask] = best;
    return best;
  }
};

}  // namespace

int brute_force_sfat(const std::vector<DensityMatrix>& hypotheses,
                     const std::vector<Measurement>& measurements, double delta, int t_max,
                     std::size_t budget) {
  if (t_max < 0 || t_max > 4) throw std::invalid_argument("brute_force_sfat: t_max must be in [0, 4]");
  if (!(delta > 0.0)) throw std::invalid_argument("brute_force_sfat: delta must be positive");
  if (hypotheses.size() > 64)
    throw BudgetExceeded("brute_force_sfat: at most 64 hypotheses are supported");
  if (hypotheses.empty() || measurements.empty()) return 0;

  SfatSearch s;
  s.half_margin = delta / 2;
  s.budget = budget;
  for (const auto& e : measurements) {
    std::vector<double> row;
    for (const auto& h : hypotheses) row.push_back(expectation(e, h));
    s.values.push_back(std::move(row));
  }
  const double step = delta / 4;
  for (int k = 0; k * step <= 1.0 + 1e-12; ++k) s.grid.push_back(k * step);
  const std::uint64_t all =
      hypotheses.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << hypotheses.size()) - 1;
  return std::max(0, s.depth(all, t_max));
}

HypothesisSet HypothesisSet::all() {
  HypothesisSet h;
  h.all_states = true;
  return h;
}

HypothesisSet HypothesisSet::sampled(int dim, std::size_t count, std::uint64_t seed) {
  HypothesisSet h;
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i)
    h.states.push_back(DensityMatrix::from_pure(random_pure_state(dim, rng)));
  h.states.push_back(DensityMatrix::maximally_mixed(dim));
  for (int i = 0; i < dim; ++i) h.states.push_back(DensityMatrix::from_pure(PureState::basis(dim, i)));
  return h;
}

RademacherEstimate sequential_rademacher_estimate(const ShatterTree& x_tree,
                                                  const HypothesisSet& hypotheses,
                                                  std::size_t num_paths, std::uint64_t seed,
                                                  unsigned workers) {
  if (num_paths < 1) throw std::invalid_argument("sequential_rademacher_estimate: num_paths >= 1");
  if (!hypotheses.all_states && hypotheses.states.empty())
    throw std::invalid_argument("sequential_rademacher_estimate: empty hypothesis set");
  const int depth = x_tree.depth;
  std::vector<double> samples(num_paths);
  parallel_for(
      num_paths,
      [&](std::size_t i) {
        Rng rng = Rng(seed).split(i);
        const Path eps = random_path(depth, rng);
        std::vector<double> coeff(x_tree.alphabet.size(), 0.0);
        for (int t = 1; t <= depth; ++t)
          coeff.at(x_tree.x_index(Bits(eps).first(static_cast<std::size_t>(t - 1)))) += eps[t - 1];
        CMatrix m = CMatrix::Zero(x_tree.dim, x_tree.dim);
        for (std::size_t j = 0; j < coeff.size(); ++j)
          if (coeff[j] != 0.0) m += coeff[j] * x_tree.alphabet[j].matrix();
        double sup;
        if (hypotheses.all_states) {
          sup = hermitian_eigen(HermitianOperator(m)).values.maxCoeff();
        } else {
          sup = -std::numeric_limits<double>::infinity();
          for (const auto& h : hypotheses.states) sup = std::max(sup, trace_product(m, h.matrix()));
        }
        samples[i] = sup / depth;
      },
      workers);

  RademacherEstimate out;
  out.num_paths = num_paths;
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(num_paths);
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  out.value = mean;
  out.standard_error =
      num_paths > 1 ? std::sqrt(var / static_cast<double>(num_paths - 1) / num_paths) : 0.0;
  return out;
}

RegretBounds theoretical_bounds(int n_qubits, double horizon, double delta, double lipschitz) {
  RegretBounds b;
  if (horizon <= 0.0 || n_qubits <= 0 || delta <= 0.0 || lipschitz <= 0.0) return b;
  const double n = n_qubits;
  const double sfat = n / (delta * delta);
  b.lower = std::sqrt(delta * delta * horizon * std::min(sfat, horizon)) / (4.0 * std::numbers::sqrt2);

  // With u = ln(beta) the integrand sqrt(n / beta^2 * log(2eT/beta)) d beta
  // becomes sqrt(n * log(2eT) - n u) du, smooth on the log grid below.
  constexpr int kGrid = 4000;
  constexpr double kLogAlphaMin = -30.0;
  const double log_2eT = std::log(2.0 * std::numbers::e * horizon);
  auto integrand = [&](double u) { return std::sqrt(n * std::max(0.0, log_2eT - u)); };
  const double h = -kLogAlphaMin / kGrid;
  double integral = 0.0;  // int_{alpha}^{1}, accumulated from beta = 1 downward
  b.upper = 4.0 * horizon * lipschitz;  // alpha = 1
  b.alpha = 1.0;
  for (int k = 1; k <= kGrid; ++k) {
    const double u_hi = -(k - 1) * h;
    const double u_lo = -k * h;
    integral += 0.5 * h * (integrand(u_hi) + integrand(u_lo));
    const double alpha = std::exp(u_lo);
    const double value =
        4.0 * alpha * horizon * lipschitz + 12.0 * lipschitz * std::sqrt(horizon) * integral;
    if (value < b.upper) {
      b.upper = value;
      b.alpha = alpha;
    }
  }
  return b;
}

}  // namespace oql
