#include "oql/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace oql {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path);
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("error while writing " + path);
}

json matrix_to_json(const CMatrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array(), c = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      r.push_back(m(i, j).real());
      c.push_back(m(i, j).imag());
    }
    re.push_back(std::move(r));
    im.push_back(std::move(c));
  }
  return {{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

CMatrix matrix_from_json(const json& j) {
  try {
    const int n = j.at("dim").get<int>();
    if (n < 1) throw std::invalid_argument("matrix JSON: dim must be positive");
    const auto& re = j.at("re");
    const json im = j.contains("im") ? j.at("im") : json();
    if (!re.is_array() || static_cast<int>(re.size()) != n)
      throw std::invalid_argument("matrix JSON: \"re\" must have dim rows");
    CMatrix m(n, n);
    for (int r = 0; r < n; ++r) {
      if (!re[r].is_array() || static_cast<int>(re[r].size()) != n)
        throw std::invalid_argument("matrix JSON: ragged \"re\" row");
      for (int c = 0; c < n; ++c) {
        const double imag = im.is_null() ? 0.0 : im.at(r).at(c).get<double>();
        m(r, c) = Complex(re[r][c].get<double>(), imag);
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("matrix JSON: ") + e.what());
  }
}

json partial_to_json(const PartialStarMatrix& p) {
  return {{"dim", p.dim()}, {"first_row", p.first_row()}};
}

PartialStarMatrix partial_from_json(const json& j) {
  try {
    const auto& row = j.at("first_row");
    for (const auto& w : row)
      if (!w.is_number()) throw std::invalid_argument("partial matrix JSON: entries must be real numbers");
    return PartialStarMatrix(j.at("dim").get<int>(), row.get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("partial matrix JSON: ") + e.what());
  }
}

json path_to_json(Bits bits) { return json(std::vector<int>(bits.begin(), bits.end())); }

json certificate_json(const ShatterTree& tree, const ShatterReport& report, std::uint64_t seed) {
  json paths = json::array();
  if (!report.paths.empty()) {
    for (const auto& p : report.paths)
      paths.push_back({{"bits", path_to_json(p.bits)}, {"min_margin", p.min_margin}});
  } else {
    paths.push_back({{"bits", path_to_json(report.worst_path)}, {"min_margin", report.min_margin}});
  }
  json j = {
      {"construction", std::string(to_string(tree.tag))},
      {"n", tree.n_qubits},
      {"T", tree.block_depth},
      {"depth", tree.depth},
      {"delta", report.delta},
      {"paths", std::move(paths)},
      {"mode", std::string(to_string(report.mode))},
      {"sample_count", report.paths_checked},
      {"seed", seed},
      {"pass_at_delta", report.pass_at_delta},
      {"pass_at_half_delta", report.pass_at_half_delta},
      {"min_margin", report.min_margin},
      {"worst_level", report.worst_level},
      {"witness",
       {{"min_eigenvalue", report.witness.min_eigenvalue},
        {"max_trace_residual", report.witness.max_trace_residual},
        {"max_norm_residual", report.witness.max_norm_residual},
        {"max_purity_residual", report.witness.max_purity_residual}}},
  };
  return j;
}

namespace {

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

std::string transcript_csv(const GameTranscript& tr, double mistake_epsilon) {
  std::ostringstream os;
  os << "round,measurement_hash,prediction,label,loss,cum_loss,cum_regret_true,"
        "cum_regret_hindsight,mistake_flag\n";
  double cum = 0.0, cum_true = 0.0, cum_hind = 0.0;
  for (std::size_t t = 0; t < tr.rounds.size(); ++t) {
    const auto& r = tr.rounds[t];
    cum += r.loss;
    os << t + 1 << ',' << r.measurement_hash << ',' << num(r.prediction) << ',' << num(r.label) << ','
       << num(r.loss) << ',' << num(cum) << ',';
    if (tr.true_state) {
      cum_true += r.loss - loss_value(tr.loss, r.true_value, r.label);
      os << num(cum_true);
    }
    os << ',';
    if (tr.hindsight_state) {
      const double c = expectation(tr.measurements[t], *tr.hindsight_state);
      cum_hind += r.loss - loss_value(tr.loss, c, r.label);
      os << num(cum_hind);
    }
    os << ',';
    if (tr.true_state) os << (std::abs(r.prediction - r.true_value) > mistake_epsilon ? 1 : 0);
    os << '\n';
  }
  return os.str();
}

}  // namespace oql
