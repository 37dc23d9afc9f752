#include "oql/learners.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace oql {

std::string_view to_string(LossKind k) { return k == LossKind::l1 ? "l1" : "l2"; }

std::optional<LossKind> parse_loss(std::string_view name) {
  if (name == "l1" || name == "L1") return LossKind::l1;
  if (name == "l2" || name == "L2") return LossKind::l2;
  return std::nullopt;
}

double loss_value(LossKind kind, double prediction, double label) {
  const double r = prediction - label;
  return kind == LossKind::l1 ? std::abs(r) : r * r;
}

double loss_subgradient_scale(LossKind kind, double prediction, double label) {
  const double r = prediction - label;
  if (kind == LossKind::l2) return 2.0 * r;
  return r > 0 ? 1.0 : (r < 0 ? -1.0 : 0.0);
}

double default_eta(int dim, int horizon) {
  if (dim < 2 || horizon < 1) throw std::invalid_argument("default_eta: need N >= 2 and T >= 1");
  return std::sqrt(std::log(static_cast<double>(dim)) / horizon);
}

MmwState mmw_init(int dim, double eta) {
  if (dim < 2) throw std::invalid_argument("mmw_init: dim must be >= 2");
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    std::ostringstream os;
    os << "mmw_init: learning rate must be finite and non-negative, got " << eta;
    throw std::invalid_argument(os.str());
  }
  return MmwState{dim, HermitianOperator::zero(dim), eta, 0};
}

DensityMatrix mmw_predict(const MmwState& state, double eta) {
  const auto eig = hermitian_eigen(state.cumulative_gradient);
  // Shift by the smallest eigenvalue of -eta G so the largest weight is 1.
  const double top = eig.values.minCoeff();
  RVector w = (-eta * (eig.values.array() - top)).exp().matrix();
  w /= w.sum();
  CMatrix m = eig.vectors * w.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityMatrix(std::move(m));
}

DensityMatrix mmw_predict(const MmwState& state) { return mmw_predict(state, state.eta); }

namespace {

MmwState accumulate(const MmwState& state, const Measurement& e, double scale) {
  MmwState next = state;
  next.cumulative_gradient =
      HermitianOperator(state.cumulative_gradient.matrix() + scale * e.matrix());
  ++next.round;
  return next;
}

void check_dim(const MmwState& state, const Measurement& e) {
  if (e.dim() != state.dim) {
    std::ostringstream os;
    os << "mmw_update: measurement dim " << e.dim() << " != learner dim " << state.dim;
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

MmwState mmw_update(const MmwState& state, const Measurement& e, double label, LossKind loss) {
  check_dim(state, e);
  const double p = expectation(e, mmw_predict(state));
  return accumulate(state, e, loss_subgradient_scale(loss, p, label));
}

DensityMatrix baseline_ftl(int dim, const History& history, LossKind loss,
                           HindsightOptions options) {
  if (history.empty()) return DensityMatrix::maximally_mixed(dim);
  return best_in_hindsight(history.measurements, history.labels, loss, options).state;
}

MmwLearner::MmwLearner(int dim, LossKind loss, double eta, EtaSchedule schedule,
                       double update_threshold)
    : state_(mmw_init(dim, eta)),
      loss_(loss),
      schedule_(schedule),
      update_threshold_(update_threshold),
      hypothesis_(DensityMatrix::maximally_mixed(dim)) {}

std::string MmwLearner::name() const {
  return schedule_ == EtaSchedule::anytime ? "mmw-anytime" : "mmw";
}

double MmwLearner::current_eta() const {
  if (schedule_ == EtaSchedule::fixed) return state_.eta;
  return default_eta(state_.dim, seen_ + 1);
}

void MmwLearner::update(const Measurement& e, double label) {
  check_dim(state_, e);
  ++seen_;
  const double p = expectation(e, hypothesis_);
  if (update_threshold_ > 0.0 && std::abs(p - label) <= update_threshold_) {
    if (schedule_ == EtaSchedule::anytime) hypothesis_ = mmw_predict(state_, current_eta());
    return;
  }
  state_ = accumulate(state_, e, loss_subgradient_scale(loss_, p, label));
  hypothesis_ = mmw_predict(state_, current_eta());
}

FtlLearner::FtlLearner(int dim, LossKind loss, int max_iterations)
    : loss_(loss), max_iterations_(max_iterations), hypothesis_(DensityMatrix::maximally_mixed(dim)) {}

void FtlLearner::update(const Measurement& e, double label) {
  history_.push(e, label);
  HindsightOptions options;
  options.max_iterations = max_iterations_;
  options.candidates = {hypothesis_};
  hypothesis_ = best_in_hindsight(history_.measurements, history_.labels, loss_, options).state;
}

}  // namespace oql
