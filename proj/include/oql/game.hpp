#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oql/core.hpp"
#include "oql/learners.hpp"
#include "oql/loss.hpp"
#include "oql/trees.hpp"

namespace oql {

struct RoundContext {
  int round = 0;  // 1-based
  const DensityMatrix& hypothesis;
  const History& history;
};

struct Feedback {
  double label = 0.0;
  bool clipped = false;
};

class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual std::string name() const = 0;
  virtual Measurement choose(const RoundContext& ctx, Rng& rng) = 0;
  // Called after the learner's prediction for the measurement just chosen.
  virtual Feedback respond(const Measurement& e, double prediction, Rng& rng) = 0;
  // Comparator state; for the tree adversary it is only known after play.
  virtual std::optional<DensityMatrix> true_state() const = 0;
};

enum class Noise { none, uniform, gaussian };
std::string_view to_string(Noise n);
std::optional<Noise> parse_noise(std::string_view name);

// y = Tr(E rho) + noise, clipped to [0, 1].
Feedback realizable_label(const Measurement& e, const DensityMatrix& rho, double epsilon, Noise noise,
                          Rng& rng);

// Where a realizable adversary takes its measurements from.
class MeasurementSource {
 public:
  virtual ~MeasurementSource() = default;
  virtual Measurement next(int round, Rng& rng) = 0;
};

// Haar-random rank-1 projectors.
class RandomProjectorSource : public MeasurementSource {
 public:
  explicit RandomProjectorSource(int dim) : dim_(dim) {}
  Measurement next(int round, Rng& rng) override;

 private:
  int dim_;
};

// Cycles through a fixed list.
class FixedListSource : public MeasurementSource {
 public:
  explicit FixedListSource(std::vector<Measurement> list);
  Measurement next(int round, Rng& rng) override;

 private:
  std::vector<Measurement> list_;
};

// Uniform draw from a finite list (a discretized base distribution).
class FiniteSupportSource : public MeasurementSource {
 public:
  explicit FiniteSupportSource(std::vector<Measurement> atoms);
  Measurement next(int round, Rng& rng) override;
  const std::vector<Measurement>& atoms() const { return atoms_; }
  // Index of the atom drawn by the last call.
  std::size_t last_index() const { return last_; }

 private:
  std::vector<Measurement> atoms_;
  std::size_t last_ = 0;
};

// x-tree nodes along a fixed path, restarting at the root after depth rounds.
class TreePathSource : public MeasurementSource {
 public:
  TreePathSource(ShatterTree tree, Path path);
  Measurement next(int round, Rng& rng) override;

 private:
  ShatterTree tree_;
  Path path_;
};

class RealizableAdversary : public Adversary {
 public:
  RealizableAdversary(DensityMatrix rho, double epsilon, Noise noise,
                      std::unique_ptr<MeasurementSource> source);

  std::string name() const override { return "realizable"; }
  Measurement choose(const RoundContext& ctx, Rng& rng) override;
  Feedback respond(const Measurement& e, double prediction, Rng& rng) override;
  std::optional<DensityMatrix> true_state() const override { return rho_; }

 private:
  DensityMatrix rho_;
  double epsilon_;
  Noise noise_;
  std::unique_ptr<MeasurementSource> source_;
};

// Draws k = ceil(1/sigma) candidates from the base source and plays the one
// with the largest score; labels come from the realizable rule.
class SmoothAdversary : public Adversary {
 public:
  using Score = std::function<double(const Measurement& e, const DensityMatrix& hypothesis,
                                     const DensityMatrix& rho)>;

  SmoothAdversary(DensityMatrix rho, double sigma, double epsilon, Noise noise,
                  std::unique_ptr<MeasurementSource> base, LossKind loss);
  // Custom score; default is the learner's loss against the noiseless label.
  SmoothAdversary(DensityMatrix rho, double sigma, double epsilon, Noise noise,
                  std::unique_ptr<MeasurementSource> base, Score score);

  std::string name() const override { return "smooth"; }
  Measurement choose(const RoundContext& ctx, Rng& rng) override;
  Feedback respond(const Measurement& e, double prediction, Rng& rng) override;
  std::optional<DensityMatrix> true_state() const override { return rho_; }

  int candidates() const { return k_; }
  // For a finite-support base: atom index of the last measurement played.
  std::size_t last_atom() const { return last_atom_; }

 private:
  DensityMatrix rho_;
  double epsilon_;
  Noise noise_;
  std::unique_ptr<MeasurementSource> base_;
  Score score_;
  int k_;
  std::size_t last_atom_ = 0;
};

// k = ceil(1/sigma), robust to 1/sigma landing just above an integer.
int smooth_candidate_count(double sigma);

// Sign-rule adversary: walks the tree, eps_t = -sign(p_t - u_t) with ties +1,
// neutral label y_t = u_t where u_t is the tree's threshold. After depth rounds
// it restarts at the root. The comparator is the witness of the realized path
// (missing bits padded with +1).
class TreeAdversary : public Adversary {
 public:
  explicit TreeAdversary(TreeBundle bundle);

  std::string name() const override { return "tree"; }
  Measurement choose(const RoundContext& ctx, Rng& rng) override;
  Feedback respond(const Measurement& e, double prediction, Rng& rng) override;
  std::optional<DensityMatrix> true_state() const override;

  const Path& realized_path() const { return path_; }
  double delta() const { return bundle_.tree.delta; }

 private:
  TreeBundle bundle_;
  Path path_;     // bits of the current pass
  Path first_;    // bits of the first complete (or partial) pass
  bool wrapped_ = false;
};

// Free-function forms of the three adversary steps.
struct TreeStep {
  Measurement measurement;
  double threshold;
};
TreeStep tree_adversary_step(const ShatterTree& tree, Bits history_bits);
int tree_sign_rule(double prediction, double threshold);

struct LabeledMeasurement {
  Measurement measurement;
  Feedback feedback;
};
LabeledMeasurement realizable_adversary_step(const DensityMatrix& rho, double epsilon, Noise noise,
                                             MeasurementSource& source, int round, Rng& rng);
LabeledMeasurement smooth_adversary_step(const DensityMatrix& rho, double sigma, double epsilon,
                                         Noise noise, MeasurementSource& base,
                                         const SmoothAdversary::Score& score,
                                         const DensityMatrix& hypothesis, int round, Rng& rng);

struct RoundRecord {
  std::string measurement_hash;
  double prediction = 0.0;
  double label = 0.0;
  double loss = 0.0;
  bool clipped = false;
  double true_value = 0.0;  // Tr(E_t rho) when a comparator state exists
};

struct GameOptions {
  bool compute_hindsight = true;
  HindsightOptions hindsight;
};

struct GameTranscript {
  LossKind loss = LossKind::l1;
  std::uint64_t seed = 0;
  std::string learner;
  std::string adversary;
  std::vector<RoundRecord> rounds;
  std::vector<Measurement> measurements;
  double cumulative_loss = 0.0;
  std::size_t clipped_count = 0;
  std::optional<DensityMatrix> true_state;
  std::optional<double> regret_vs_true;
  std::optional<DensityMatrix> hindsight_state;
  std::optional<double> hindsight_loss;
  std::optional<double> regret_vs_hindsight;
  bool hindsight_converged = false;

  std::vector<double> labels() const;
};

GameTranscript run_game(Learner& learner, Adversary& adversary, int horizon, LossKind loss,
                        std::uint64_t seed, const GameOptions& options = {});

enum class Comparator { true_state, hindsight };

// sum_t loss(p_t, y_t) - sum_t loss(c_t, y_t). The hindsight comparator is
// solved on demand when the transcript does not carry it.
double regret(const GameTranscript& transcript, Comparator comparator);
// Rounds with |p_t - Tr(E_t rho)| > epsilon.
int mistakes(const GameTranscript& transcript, double epsilon);
// sum_t |p_t - Tr(E_t rho)|.
double total_deviation(const GameTranscript& transcript);

}  // namespace oql
