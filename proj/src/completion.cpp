#include "oql/completion.hpp"

#include <cmath>
#include <sstream>

namespace oql {

namespace {
constexpr double kEntrySlack = 1e-12;
}

PartialStarMatrix::PartialStarMatrix(int dim, std::vector<double> first_row)
    : dim_(dim), first_row_(std::move(first_row)) {
  if (dim_ < 2) throw std::invalid_argument("PartialStarMatrix: dim must be >= 2");
  if (static_cast<int>(first_row_.size()) != dim_ - 1) {
    std::ostringstream os;
    os << "PartialStarMatrix: first row needs " << dim_ - 1 << " entries, got "
       << first_row_.size();
    throw std::invalid_argument(os.str());
  }
  for (double w : first_row_)
    if (!std::isfinite(w)) throw std::invalid_argument("PartialStarMatrix: non-finite entry");
}

double PartialStarMatrix::entry_bound() const { return 0.5 / std::sqrt(dim_ - 1.0); }

PatternReport validate_star_pattern(const PartialStarMatrix& p) {
  PatternReport report;
  const double bound = p.entry_bound();
  for (std::size_t k = 0; k < p.first_row().size(); ++k) {
    const double w = p.first_row()[k];
    if (std::abs(w) > bound + kEntrySlack) {
      report.pass = false;
      report.violations.push_back({static_cast<int>(k) + 2, w, std::abs(w) - bound});
    }
  }
  return report;
}

CliqueReport clique_psd_check(const PartialStarMatrix& p) {
  CliqueReport report;
  const double a = p.head_diagonal();
  const double d = p.tail_diagonal();
  // Same slack as the entry bound, expressed on the determinant.
  const double b = p.entry_bound();
  const double det_slack = 2.0 * b * kEntrySlack + kEntrySlack * kEntrySlack;
  for (std::size_t k = 0; k < p.first_row().size(); ++k) {
    const double w = p.first_row()[k];
    const double det = a * d - w * w;
    const bool psd = det >= -det_slack;  // diagonal entries are positive
    report.cliques.push_back({static_cast<int>(k) + 2, det, psd});
    report.pass = report.pass && psd;
  }
  return report;
}

DensityMatrix complete_to_density(const PartialStarMatrix& p) {
  const PatternReport report = validate_star_pattern(p);
  if (!report.pass) {
    const auto& v = report.violations.front();
    std::ostringstream os;
    os << "complete_to_density: entry w_1" << v.column << " = " << v.value
       << " exceeds bound " << p.entry_bound() << " by " << v.excess;
    throw PatternError(os.str());
  }
  const int n = p.dim();
  const auto& w = p.first_row();
  CMatrix m(n, n);
  m(0, 0) = p.head_diagonal();
  for (int i = 1; i < n; ++i) {
    m(0, i) = w[i - 1];
    m(i, 0) = w[i - 1];
    m(i, i) = p.tail_diagonal();
    for (int j = i + 1; j < n; ++j) {
      const double fill = 2.0 * w[i - 1] * w[j - 1];
      m(i, j) = fill;
      m(j, i) = fill;
    }
  }
  return DensityMatrix(std::move(m));
}

}  // namespace oql
