#include "oql/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace oql {

std::string_view to_string(Noise n) {
  switch (n) {
    case Noise::none: return "none";
    case Noise::uniform: return "uniform";
    case Noise::gaussian: return "gaussian";
  }
  return "none";
}

std::optional<Noise> parse_noise(std::string_view name) {
  for (auto n : {Noise::none, Noise::uniform, Noise::gaussian})
    if (name == to_string(n)) return n;
  return std::nullopt;
}

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 0.5)) {
    std::ostringstream os;
    os << "realizable noise level must be in [0, 1/2], got " << epsilon;
    throw std::invalid_argument(os.str());
  }
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0 && sigma <= 1.0)) {
    std::ostringstream os;
    os << "smoothness sigma must be in (0, 1], got " << sigma;
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

Feedback realizable_label(const Measurement& e, const DensityMatrix& rho, double epsilon, Noise noise,
                          Rng& rng) {
  const double tr = expectation(e, rho);
  double y = tr;
  switch (noise) {
    case Noise::none: break;
    case Noise::uniform: y += epsilon * (2.0 * rng.uniform() - 1.0); break;
    case Noise::gaussian: y += epsilon * rng.normal(); break;
  }
  // Rounding can push Tr(E rho) a hair outside [0, 1]; only flag real clipping.
  constexpr double kFlag = 1e-12;
  Feedback f;
  f.clipped = y < -kFlag || y > 1.0 + kFlag;
  f.label = std::clamp(y, 0.0, 1.0);
  return f;
}

Measurement RandomProjectorSource::next(int, Rng& rng) { return random_measurement(dim_, rng); }

FixedListSource::FixedListSource(std::vector<Measurement> list) : list_(std::move(list)) {
  if (list_.empty()) throw std::invalid_argument("FixedListSource: empty list");
}

Measurement FixedListSource::next(int round, Rng&) {
  return list_[static_cast<std::size_t>(round - 1) % list_.size()];
}

FiniteSupportSource::FiniteSupportSource(std::vector<Measurement> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw std::invalid_argument("FiniteSupportSource: empty support");
}

Measurement FiniteSupportSource::next(int, Rng& rng) {
  last_ = static_cast<std::size_t>(rng.below(atoms_.size()));
  return atoms_[last_];
}

TreePathSource::TreePathSource(ShatterTree tree, Path path)
    : tree_(std::move(tree)), path_(std::move(path)) {
  if (static_cast<int>(path_.size()) != tree_.depth)
    throw std::invalid_argument("TreePathSource: path length must equal the tree depth");
}

Measurement TreePathSource::next(int round, Rng&) {
  const auto pos = static_cast<std::size_t>((round - 1) % tree_.depth);
  return node_measurement(tree_, Bits(path_).first(pos));
}

LabeledMeasurement realizable_adversary_step(const DensityMatrix& rho, double epsilon, Noise noise,
                                             MeasurementSource& source, int round, Rng& rng) {
  check_epsilon(epsilon);
  Measurement e = source.next(round, rng);
  const Feedback f = realizable_label(e, rho, epsilon, noise, rng);
  return {std::move(e), f};
}

RealizableAdversary::RealizableAdversary(DensityMatrix rho, double epsilon, Noise noise,
                                         std::unique_ptr<MeasurementSource> source)
    : rho_(std::move(rho)), epsilon_(epsilon), noise_(noise), source_(std::move(source)) {
  check_epsilon(epsilon);
  if (!source_) throw std::invalid_argument("RealizableAdversary: no measurement source");
}

Measurement RealizableAdversary::choose(const RoundContext& ctx, Rng& rng) {
  return source_->next(ctx.round, rng);
}

Feedback RealizableAdversary::respond(const Measurement& e, double, Rng& rng) {
  return realizable_label(e, rho_, epsilon_, noise_, rng);
}

int smooth_candidate_count(double sigma) {
  check_sigma(sigma);
  return static_cast<int>(std::ceil(1.0 / sigma - 1e-9));
}

namespace {

SmoothAdversary::Score loss_score(LossKind loss) {
  return [loss](const Measurement& e, const DensityMatrix& hypothesis, const DensityMatrix& rho) {
    return loss_value(loss, expectation(e, hypothesis), expectation(e, rho));
  };
}

// Max-of-k pick; returns the chosen measurement and its draw position.
std::pair<Measurement, std::size_t> pick_smooth(int k, MeasurementSource& base,
                                                const SmoothAdversary::Score& score,
                                                const DensityMatrix& hypothesis,
                                                const DensityMatrix& rho, int round, Rng& rng,
                                                std::size_t* atom) {
  auto* finite = dynamic_cast<FiniteSupportSource*>(&base);
  std::optional<Measurement> best;
  double best_score = 0.0;
  std::size_t best_pos = 0;
  for (int i = 0; i < k; ++i) {
    Measurement c = base.next(round, rng);
    const double s = score(c, hypothesis, rho);
    if (!best || s > best_score) {
      best = std::move(c);
      best_score = s;
      best_pos = static_cast<std::size_t>(i);
      if (finite && atom) *atom = finite->last_index();
    }
  }
  return {std::move(*best), best_pos};
}

}  // namespace

LabeledMeasurement smooth_adversary_step(const DensityMatrix& rho, double sigma, double epsilon,
                                         Noise noise, MeasurementSource& base,
                                         const SmoothAdversary::Score& score,
                                         const DensityMatrix& hypothesis, int round, Rng& rng) {
  check_epsilon(epsilon);
  auto [e, pos] = pick_smooth(smooth_candidate_count(sigma), base, score, hypothesis, rho, round, rng,
                              nullptr);
  (void)pos;
  const Feedback f = realizable_label(e, rho, epsilon, noise, rng);
  return {std::move(e), f};
}

SmoothAdversary::SmoothAdversary(DensityMatrix rho, double sigma, double epsilon, Noise noise,
                                 std::unique_ptr<MeasurementSource> base, LossKind loss)
    : SmoothAdversary(std::move(rho), sigma, epsilon, noise, std::move(base), loss_score(loss)) {}

SmoothAdversary::SmoothAdversary(DensityMatrix rho, double sigma, double epsilon, Noise noise,
                                 std::unique_ptr<MeasurementSource> base, Score score)
    : rho_(std::move(rho)),
      epsilon_(epsilon),
      noise_(noise),
      base_(std::move(base)),
      score_(std::move(score)),
      k_(smooth_candidate_count(sigma)) {
  check_epsilon(epsilon);
  if (!base_) throw std::invalid_argument("SmoothAdversary: no base distribution");
}

Measurement SmoothAdversary::choose(const RoundContext& ctx, Rng& rng) {
  return pick_smooth(k_, *base_, score_, ctx.hypothesis, rho_, ctx.round, rng, &last_atom_).first;
}

Feedback SmoothAdversary::respond(const Measurement& e, double, Rng& rng) {
  return realizable_label(e, rho_, epsilon_, noise_, rng);
}

int tree_sign_rule(double prediction, double threshold) {
  return prediction > threshold ? -1 : 1;  // ties go to +1
}

TreeStep tree_adversary_step(const ShatterTree& tree, Bits history_bits) {
  const auto pos = history_bits.size() % static_cast<std::size_t>(tree.depth);
  const Bits prefix = history_bits.last(pos);
  return {node_measurement(tree, prefix), tree.threshold(prefix, static_cast<int>(pos) + 1)};
}

TreeAdversary::TreeAdversary(TreeBundle bundle) : bundle_(std::move(bundle)) {
  if (!bundle_.tree.threshold) throw std::invalid_argument("TreeAdversary: tree has no threshold");
  if (!bundle_.witness.state) throw std::invalid_argument("TreeAdversary: tree has no witness map");
}

Measurement TreeAdversary::choose(const RoundContext&, Rng&) {
  if (static_cast<int>(path_.size()) == bundle_.tree.depth) {
    if (!wrapped_) first_ = path_;
    wrapped_ = true;
    path_.clear();
  }
  return node_measurement(bundle_.tree, path_);
}

Feedback TreeAdversary::respond(const Measurement&, double prediction, Rng&) {
  const int level = static_cast<int>(path_.size()) + 1;
  const double u = bundle_.tree.threshold(path_, level);
  path_.push_back(tree_sign_rule(prediction, u));
  return {u, false};
}

std::optional<DensityMatrix> TreeAdversary::true_state() const {
  Path full = wrapped_ ? first_ : path_;
  full.resize(static_cast<std::size_t>(bundle_.tree.depth), 1);
  return bundle_.witness.state(full);
}

std::vector<double> GameTranscript::labels() const {
  std::vector<double> out;
  out.reserve(rounds.size());
  for (const auto& r : rounds) out.push_back(r.label);
  return out;
}

GameTranscript run_game(Learner& learner, Adversary& adversary, int horizon, LossKind loss,
                        std::uint64_t seed, const GameOptions& options) {
  if (horizon < 1) throw std::invalid_argument("run_game: horizon must be >= 1");
  GameTranscript tr;
  tr.loss = loss;
  tr.seed = seed;
  tr.learner = learner.name();
  tr.adversary = adversary.name();
  tr.rounds.reserve(static_cast<std::size_t>(horizon));

  Rng rng(seed);
  History history;
  for (int t = 1; t <= horizon; ++t) {
    const DensityMatrix& omega = learner.hypothesis();
    Measurement e = adversary.choose(RoundContext{t, omega, history}, rng);
    if (e.dim() != omega.dim()) {
      std::ostringstream os;
      os << "run_game: adversary played a " << e.dim() << "-dim measurement against a " << omega.dim()
         << "-dim learner in round " << t;
      throw ValidationError(os.str());
    }
    const double p = expectation(e, omega);
    const Feedback f = adversary.respond(e, p, rng);
    RoundRecord rec;
    rec.measurement_hash = matrix_hash(e.matrix());
    rec.prediction = p;
    rec.label = f.label;
    rec.loss = loss_value(loss, p, f.label);
    rec.clipped = f.clipped;
    tr.cumulative_loss += rec.loss;
    tr.clipped_count += f.clipped ? 1 : 0;
    tr.rounds.push_back(std::move(rec));
    learner.update(e, f.label);
    history.push(e, f.label);
  }
  tr.measurements = std::move(history.measurements);

  tr.true_state = adversary.true_state();
  if (tr.true_state) {
    double comparator = 0.0;
    for (std::size_t t = 0; t < tr.rounds.size(); ++t) {
      auto& r = tr.rounds[t];
      r.true_value = expectation(tr.measurements[t], *tr.true_state);
      comparator += loss_value(loss, r.true_value, r.label);
    }
    tr.regret_vs_true = tr.cumulative_loss - comparator;
  }

  if (options.compute_hindsight) {
    HindsightOptions h = options.hindsight;
    if (tr.true_state) h.candidates.push_back(*tr.true_state);
    h.candidates.push_back(learner.hypothesis());
    const auto best = best_in_hindsight(tr.measurements, tr.labels(), loss, h);
    tr.hindsight_state = best.state;
    tr.hindsight_loss = best.loss;
    tr.hindsight_converged = best.converged;
    tr.regret_vs_hindsight = tr.cumulative_loss - best.loss;
  }
  return tr;
}

double regret(const GameTranscript& transcript, Comparator comparator) {
  if (comparator == Comparator::true_state) {
    if (!transcript.regret_vs_true)
      throw std::invalid_argument("regret: transcript has no true state to compare against");
    return *transcript.regret_vs_true;
  }
  if (transcript.regret_vs_hindsight) return *transcript.regret_vs_hindsight;
  if (transcript.rounds.empty()) return 0.0;
  HindsightOptions h;
  if (transcript.true_state) h.candidates.push_back(*transcript.true_state);
  const auto best = best_in_hindsight(transcript.measurements, transcript.labels(), transcript.loss, h);
  return transcript.cumulative_loss - best.loss;
}

int mistakes(const GameTranscript& transcript, double epsilon) {
  if (!transcript.true_state)
    throw std::invalid_argument("mistakes: transcript has no true state");
  int count = 0;
  for (const auto& r : transcript.rounds)
    if (std::abs(r.prediction - r.true_value) > epsilon) ++count;
  return count;
}

double total_deviation(const GameTranscript& transcript) {
  if (!transcript.true_state)
    throw std::invalid_argument("total_deviation: transcript has no true state");
  double s = 0.0;
  for (const auto& r : transcript.rounds) s += std::abs(r.prediction - r.true_value);
  return s;
}

}  // namespace oql
