#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oql/core.hpp"
#include "oql/hindsight.hpp"
#include "oql/loss.hpp"

namespace oql {

// Matrix multiplicative weights in cumulative-gradient form:
// omega = exp(-eta G) / Tr exp(-eta G).
struct MmwState {
  int dim = 0;
  HermitianOperator cumulative_gradient = HermitianOperator::zero(2);
  double eta = 0.0;
  int round = 0;  // updates applied so far
};

// sqrt(ln N / T).
double default_eta(int dim, int horizon);

MmwState mmw_init(int dim, double eta);
DensityMatrix mmw_predict(const MmwState& state);
// Same state evaluated at a different learning rate (anytime schedule).
DensityMatrix mmw_predict(const MmwState& state, double eta);
MmwState mmw_update(const MmwState& state, const Measurement& e, double label, LossKind loss);

struct History {
  std::vector<Measurement> measurements;
  std::vector<double> labels;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  void push(const Measurement& e, double y) {
    measurements.push_back(e);
    labels.push_back(y);
  }
};

// Best fixed state on the history so far; I/N when empty.
DensityMatrix baseline_ftl(int dim, const History& history, LossKind loss,
                           HindsightOptions options = {});

class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::string name() const = 0;
  // Hypothesis used to predict in the coming round.
  virtual const DensityMatrix& hypothesis() const = 0;
  virtual void update(const Measurement& e, double label) = 0;
};

enum class EtaSchedule { fixed, anytime };

class MmwLearner : public Learner {
 public:
  // update_threshold > 0 skips updates on rounds where |Tr(E omega) - y| is at
  // most the threshold.
  MmwLearner(int dim, LossKind loss, double eta, EtaSchedule schedule = EtaSchedule::fixed,
             double update_threshold = 0.0);

  std::string name() const override;
  const DensityMatrix& hypothesis() const override { return hypothesis_; }
  void update(const Measurement& e, double label) override;
  const MmwState& state() const { return state_; }

 private:
  double current_eta() const;

  MmwState state_;
  LossKind loss_;
  EtaSchedule schedule_;
  double update_threshold_;
  int seen_ = 0;
  DensityMatrix hypothesis_;
};

// Follow the leader: refits the best state on the whole history every round,
// warm-started from its previous hypothesis with a capped iteration count.
class FtlLearner : public Learner {
 public:
  FtlLearner(int dim, LossKind loss, int max_iterations = 200);

  std::string name() const override { return "ftl"; }
  const DensityMatrix& hypothesis() const override { return hypothesis_; }
  void update(const Measurement& e, double label) override;

 private:
  LossKind loss_;
  int max_iterations_;
  History history_;
  DensityMatrix hypothesis_;
};

// Always predicts with a fixed state (the true one, when known).
class CheatingLearner : public Learner {
 public:
  explicit CheatingLearner(DensityMatrix state) : state_(std::move(state)) {}

  std::string name() const override { return "cheating"; }
  const DensityMatrix& hypothesis() const override { return state_; }
  void update(const Measurement&, double) override {}

 private:
  DensityMatrix state_;
};

}  // namespace oql
