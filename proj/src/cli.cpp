#include "oql/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "oql/completion.hpp"
#include "oql/parallel.hpp"
#include "oql/shattering.hpp"

namespace oql {

std::string_view to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::mmw: return "mmw";
    case LearnerKind::mmw_anytime: return "mmw-anytime";
    case LearnerKind::ftl: return "ftl";
    case LearnerKind::cheating: return "cheating";
  }
  return "mmw";
}

std::optional<LearnerKind> parse_learner(std::string_view name) {
  for (auto k : {LearnerKind::mmw, LearnerKind::mmw_anytime, LearnerKind::ftl, LearnerKind::cheating})
    if (name == to_string(k)) return k;
  return std::nullopt;
}

std::string_view to_string(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::realizable: return "realizable";
    case AdversaryKind::smooth: return "smooth";
    case AdversaryKind::tree: return "tree";
  }
  return "realizable";
}

std::optional<AdversaryKind> parse_adversary(std::string_view name) {
  for (auto k : {AdversaryKind::realizable, AdversaryKind::smooth, AdversaryKind::tree})
    if (name == to_string(k)) return k;
  return std::nullopt;
}

namespace {

template <class T, class Parse>
T parse_or_throw(const std::string& name, Parse parse, const char* what) {
  if (auto v = parse(name)) return *v;
  throw std::invalid_argument(std::string("unknown ") + what + " '" + name + "'");
}

std::optional<StateKind> parse_state_kind(std::string_view s) {
  if (s == "pure") return StateKind::pure;
  if (s == "mixed") return StateKind::mixed;
  return std::nullopt;
}

std::string_view to_string(StateKind k) { return k == StateKind::pure ? "pure" : "mixed"; }

}  // namespace

json config_to_json(const ExperimentConfig& c) {
  json j = {
      {"command", c.command},
      {"n", c.n},
      {"T", c.T},
      {"tree_T", c.tree_T},
      {"delta", c.delta ? json(*c.delta) : json(nullptr)},
      {"eta", c.eta ? json(*c.eta) : json(nullptr)},
      {"sigma", c.sigma},
      {"epsilon", c.epsilon},
      {"mistake_epsilon", c.mistake_epsilon},
      {"update_threshold", c.update_threshold},
      {"learner", std::string(to_string(c.learner))},
      {"adversary", std::string(to_string(c.adversary))},
      {"loss", std::string(to_string(c.loss))},
      {"construction", std::string(to_string(c.construction))},
      {"noise", std::string(to_string(c.noise))},
      {"state", std::string(to_string(c.state))},
      {"seed", c.seed},
      {"replicates", c.replicates},
      {"budget", c.budget},
      {"basis_index", c.basis_index},
      {"scaled", c.scaled},
      {"hindsight", c.hindsight},
  };
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  try {
    ExperimentConfig c;
    c.command = j.at("command").get<std::string>();
    c.n = j.at("n").get<int>();
    c.T = j.at("T").get<int>();
    c.tree_T = j.at("tree_T").get<int>();
    if (!j.at("delta").is_null()) c.delta = j.at("delta").get<double>();
    if (!j.at("eta").is_null()) c.eta = j.at("eta").get<double>();
    c.sigma = j.at("sigma").get<double>();
    c.epsilon = j.at("epsilon").get<double>();
    c.mistake_epsilon = j.at("mistake_epsilon").get<double>();
    c.update_threshold = j.at("update_threshold").get<double>();
    c.learner = parse_or_throw<LearnerKind>(j.at("learner").get<std::string>(), parse_learner, "learner");
    c.adversary =
        parse_or_throw<AdversaryKind>(j.at("adversary").get<std::string>(), parse_adversary, "adversary");
    c.loss = parse_or_throw<LossKind>(j.at("loss").get<std::string>(), parse_loss, "loss");
    c.construction = parse_or_throw<Construction>(j.at("construction").get<std::string>(),
                                                  parse_construction, "construction");
    c.noise = parse_or_throw<Noise>(j.at("noise").get<std::string>(), parse_noise, "noise");
    c.state = parse_or_throw<StateKind>(j.at("state").get<std::string>(), parse_state_kind, "state");
    c.seed = j.at("seed").get<std::uint64_t>();
    c.replicates = j.at("replicates").get<int>();
    c.budget = j.at("budget").get<std::size_t>();
    c.basis_index = j.at("basis_index").get<int>();
    c.scaled = j.at("scaled").get<bool>();
    c.hindsight = j.at("hindsight").get<bool>();
    return c;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config JSON: ") + e.what());
  }
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return config_to_json(a) == config_to_json(b) && a.workers == b.workers;
}

GameTranscript run_replicate(const ExperimentConfig& c, int replicate) {
  if (c.n < 1 || c.n > 8) throw std::invalid_argument("n must be in [1, 8]");
  if (c.T < 1) throw std::invalid_argument("T must be >= 1");
  const int dim = 1 << c.n;
  const Rng stream = Rng(c.seed).split(static_cast<std::uint64_t>(replicate));
  Rng state_rng = stream.split(0);
  const std::uint64_t game_seed = stream.split(1)();
  DensityMatrix rho = random_state(c.state, dim, state_rng);

  std::unique_ptr<Adversary> adversary;
  switch (c.adversary) {
    case AdversaryKind::realizable:
      adversary = std::make_unique<RealizableAdversary>(rho, c.epsilon, c.noise,
                                                        std::make_unique<RandomProjectorSource>(dim));
      break;
    case AdversaryKind::smooth:
      adversary = std::make_unique<SmoothAdversary>(
          rho, c.sigma, c.epsilon, c.noise, std::make_unique<RandomProjectorSource>(dim), c.loss);
      break;
    case AdversaryKind::tree:
      adversary = std::make_unique<TreeAdversary>(
          build_tree(c.construction, c.n, c.tree_T, c.basis_index, c.scaled));
      break;
  }

  const double eta = c.eta ? *c.eta : default_eta(dim, c.T);
  std::unique_ptr<Learner> learner;
  switch (c.learner) {
    case LearnerKind::mmw:
      learner = std::make_unique<MmwLearner>(dim, c.loss, eta, EtaSchedule::fixed, c.update_threshold);
      break;
    case LearnerKind::mmw_anytime:
      learner =
          std::make_unique<MmwLearner>(dim, c.loss, eta, EtaSchedule::anytime, c.update_threshold);
      break;
    case LearnerKind::ftl: learner = std::make_unique<FtlLearner>(dim, c.loss); break;
    case LearnerKind::cheating:
      if (c.adversary == AdversaryKind::tree)
        throw std::invalid_argument("the cheating learner needs a true state fixed before play");
      learner = std::make_unique<CheatingLearner>(rho);
      break;
  }

  GameOptions options;
  options.compute_hindsight = c.hindsight;
  return run_game(*learner, *adversary, c.T, c.loss, game_seed, options);
}

json replicate_summary(const GameTranscript& t, int replicate, double mistake_epsilon) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j = {
      {"replicate", replicate},
      {"game_seed", t.seed},
      {"rounds", t.rounds.size()},
      {"cumulative_loss", t.cumulative_loss},
      {"regret_vs_true", opt(t.regret_vs_true)},
      {"regret_vs_hindsight", opt(t.regret_vs_hindsight)},
      {"hindsight_loss", opt(t.hindsight_loss)},
      {"hindsight_converged", t.hindsight_converged},
      {"clipped_count", t.clipped_count},
  };
  if (t.true_state) {
    j["mistakes"] = mistakes(t, mistake_epsilon);
    j["total_deviation"] = total_deviation(t);
  } else {
    j["mistakes"] = nullptr;
  }
  return j;
}

namespace {

struct Outputs {
  std::string out;
  std::string summary;
  std::string transcript;
  std::string input;
};

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-")
    out << content;
  else
    write_file(path, content);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::vector<GameTranscript> run_replicates(const ExperimentConfig& c) {
  if (c.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  std::vector<std::optional<GameTranscript>> slots(static_cast<std::size_t>(c.replicates));
  parallel_for(
      slots.size(), [&](std::size_t r) { slots[r] = run_replicate(c, static_cast<int>(r)); },
      c.workers);
  std::vector<GameTranscript> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

int cmd_verify(const ExperimentConfig& c, const Outputs& o, std::ostream& out, std::ostream& err) {
  const TreeBundle b = build_tree(c.construction, c.n, c.T, c.basis_index, c.scaled);
  const double delta = c.delta ? *c.delta : b.tree.delta;
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  VerifyOptions vo;
  vo.budget = c.budget;
  vo.seed = c.seed;
  vo.workers = c.workers;
  const ShatterReport report = verify_shattering(b.tree, b.witness, delta, vo);
  json cert = certificate_json(b.tree, report, c.seed);
  if (!b.tree.prefix_valid_v) {
    const PrefixReport p = check_prefix_measurability(b.tree, c.budget, c.seed);
    cert["prefix_measurability"] = {{"pairs_checked", p.pairs_checked},
                                    {"max_discrepancy", p.max_discrepancy},
                                    {"level", p.level},
                                    {"path_a", path_to_json(p.path_a)},
                                    {"path_b", path_to_json(p.path_b)}};
  }
  emit(o.out, dump(cert), out);
  err << (report.pass_at_delta ? "PASS" : "FAIL") << ": min_margin=" << std::setprecision(10)
      << report.min_margin << " delta=" << delta << " (" << to_string(report.mode) << ", "
      << report.paths_checked << " paths)\n";
  return report.pass_at_delta ? exit_code::ok : exit_code::domain_failure;
}

int cmd_complete(const Outputs& o, std::ostream& out, std::ostream& err) {
  if (o.input.empty()) throw std::invalid_argument("complete needs --input");
  json j;
  try {
    j = json::parse(read_file(o.input));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("cannot parse ") + o.input + ": " + e.what());
  }
  const PartialStarMatrix p = partial_from_json(j);
  const DensityMatrix m = complete_to_density(p);
  const DensityCheck check = is_density(m.matrix());
  emit(o.out, dump(matrix_to_json(m.matrix())), out);
  std::ostream& diag = (o.out.empty() || o.out == "-") ? err : out;
  diag << std::setprecision(17) << "min_eigenvalue=" << check.min_eigenvalue
       << " trace=" << m.matrix().trace().real() << "\n";
  return exit_code::ok;
}

int cmd_game(const ExperimentConfig& c, const Outputs& o, std::ostream& out) {
  const auto transcripts = run_replicates(c);
  json reps = json::array();
  std::vector<double> reg_true, reg_hind;
  std::size_t clipped = 0;
  for (std::size_t r = 0; r < transcripts.size(); ++r) {
    const auto& t = transcripts[r];
    reps.push_back(replicate_summary(t, static_cast<int>(r), c.mistake_epsilon));
    if (t.regret_vs_true) reg_true.push_back(*t.regret_vs_true);
    if (t.regret_vs_hindsight) reg_hind.push_back(*t.regret_vs_hindsight);
    clipped += t.clipped_count;
    if (!o.transcript.empty()) {
      const std::string path =
          transcripts.size() == 1 ? o.transcript : o.transcript + ".r" + std::to_string(r);
      write_file(path, transcript_csv(t, c.mistake_epsilon));
    }
  }
  json summary = {{"config", config_to_json(c)}, {"replicates", std::move(reps)}};
  summary["mean_regret_vs_true"] = reg_true.empty() ? json(nullptr) : json(mean_of(reg_true));
  summary["mean_regret_vs_hindsight"] = reg_hind.empty() ? json(nullptr) : json(mean_of(reg_hind));
  summary["total_clipped"] = clipped;
  emit(o.summary, dump(summary), out);
  return exit_code::ok;
}

struct SweepAxes {
  std::vector<int> ns;
  std::vector<int> Ts;
  std::vector<double> sigmas;
  std::vector<double> epsilons;
  std::vector<double> etas;
};

int cmd_sweep(const ExperimentConfig& base, const SweepAxes& axes, const Outputs& o, std::ostream& out) {
  auto or_default = [](auto v, auto d) {
    if (v.empty()) v.push_back(d);
    return v;
  };
  const auto ns = or_default(axes.ns, base.n);
  const auto Ts = or_default(axes.Ts, base.T);
  const auto sigmas = or_default(axes.sigmas, base.sigma);
  const auto epsilons = or_default(axes.epsilons, base.epsilon);
  std::vector<std::optional<double>> etas;
  for (double e : axes.etas) etas.push_back(e);
  if (etas.empty()) etas.push_back(base.eta);

  std::vector<ExperimentConfig> points;
  for (int n : ns)
    for (int T : Ts)
      for (double s : sigmas)
        for (double e : epsilons)
          for (const auto& eta : etas) {
            ExperimentConfig c = base;
            c.n = n;
            c.T = T;
            c.sigma = s;
            c.epsilon = e;
            c.eta = eta;
            points.push_back(c);
          }
  const auto reps = static_cast<std::size_t>(base.replicates);
  if (base.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  std::vector<std::optional<GameTranscript>> slots(points.size() * reps);
  parallel_for(
      slots.size(),
      [&](std::size_t i) {
        slots[i] = run_replicate(points[i / reps], static_cast<int>(i % reps));
      },
      base.workers);

  std::ostringstream csv;
  csv << std::setprecision(12);
  csv << "n,T,sigma,epsilon,eta,learner,adversary,loss,replicates,mean_regret_true,std_regret_true,"
         "mean_regret_hindsight,std_regret_hindsight,mean_mistakes,mean_clipped\n";
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto& c = points[p];
    std::vector<double> rt, rh, mk, cl;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& t = *slots[p * reps + r];
      if (t.regret_vs_true) rt.push_back(*t.regret_vs_true);
      if (t.regret_vs_hindsight) rh.push_back(*t.regret_vs_hindsight);
      if (t.true_state) mk.push_back(mistakes(t, c.mistake_epsilon));
      cl.push_back(static_cast<double>(t.clipped_count));
    }
    const double eta = c.eta ? *c.eta : default_eta(1 << c.n, c.T);
    auto cell = [&](const std::vector<double>& v, bool sd) {
      std::ostringstream s;
      s << std::setprecision(12);
      if (!v.empty()) s << (sd ? stddev_of(v) : mean_of(v));
      return s.str();
    };
    csv << c.n << ',' << c.T << ',' << c.sigma << ',' << c.epsilon << ',' << eta << ','
        << to_string(c.learner) << ',' << to_string(c.adversary) << ',' << to_string(c.loss) << ','
        << reps << ',' << cell(rt, false) << ',' << cell(rt, true) << ',' << cell(rh, false) << ','
        << cell(rh, true) << ',' << cell(mk, false) << ',' << cell(cl, false) << '\n';
  }
  emit(o.out, csv.str(), out);
  return exit_code::ok;
}

struct SfatArgs {
  double grid_step = 1.0 / 16;
  int t_max = 4;
  bool all_basis = false;
  std::size_t budget = 20'000'000;
};

int cmd_sfat(const ExperimentConfig& c, const SfatArgs& a, const Outputs& o, std::ostream& out) {
  if (c.n < 1 || c.n > 8) throw std::invalid_argument("n must be in [1, 8]");
  if (!(a.grid_step > 0.0 && a.grid_step <= 1.0)) throw std::invalid_argument("grid step must be in (0, 1]");
  const int dim = 1 << c.n;
  const double delta = c.delta ? *c.delta : 0.25;
  // Diagonal states p|0><0| + (1-p)|N-1><N-1| on a grid of p.
  std::vector<DensityMatrix> hyps;
  const int steps = static_cast<int>(std::lround(1.0 / a.grid_step));
  for (int k = 0; k <= steps; ++k) {
    const double p = std::min(1.0, k * a.grid_step);
    CMatrix m = CMatrix::Zero(dim, dim);
    m(0, 0) = p;
    m(dim - 1, dim - 1) += 1.0 - p;
    hyps.emplace_back(std::move(m));
  }
  std::vector<Measurement> meas;
  const int count = a.all_basis ? dim : 1;
  for (int i = 0; i < count; ++i) meas.push_back(Measurement::basis_projector(dim, i));
  const int sfat = brute_force_sfat(hyps, meas, delta, a.t_max, a.budget);
  json j = {{"n", c.n},          {"delta", delta},           {"grid_step", a.grid_step},
            {"t_max", a.t_max},  {"hypotheses", hyps.size()}, {"measurements", meas.size()},
            {"sfat", sfat}};
  emit(o.out, dump(j), out);
  return exit_code::ok;
}

struct RademacherArgs {
  std::string tree = "constant";
  std::size_t paths = 2000;
  std::size_t hypotheses = 256;
  bool exact = false;
};

int cmd_rademacher(const ExperimentConfig& c, const RademacherArgs& a, const Outputs& o,
                   std::ostream& out) {
  ShatterTree tree;
  if (a.tree == "constant") {
    if (c.n < 1 || c.n > 8) throw std::invalid_argument("n must be in [1, 8]");
    tree = build_constant_tree(Measurement::basis_projector(1 << c.n, 0), c.T, 0.5);
  } else {
    tree = build_tree(parse_or_throw<Construction>(a.tree, parse_construction, "construction"), c.n,
                      c.T, c.basis_index, c.scaled)
               .tree;
  }
  const HypothesisSet hyps =
      a.exact ? HypothesisSet::all() : HypothesisSet::sampled(tree.dim, a.hypotheses, c.seed ^ 0x5eed);
  const auto est = sequential_rademacher_estimate(tree, hyps, a.paths, c.seed, c.workers);
  json j = {{"tree", a.tree},           {"n", c.n},
            {"depth", tree.depth},      {"mode", a.exact ? "exact" : "sampled"},
            {"paths", est.num_paths},   {"value", est.value},
            {"standard_error", est.standard_error}, {"seed", c.seed}};
  emit(o.out, dump(j), out);
  return exit_code::ok;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Online learning of quantum states: shattering certificates and learning games", "oql"};
  app.require_subcommand(1);

  ExperimentConfig c;
  Outputs o;
  std::string learner = "mmw", adversary = "realizable", loss = "l1", construction = "halving",
              noise = "uniform", state = "pure";
  double delta = 0.0, eta = 0.0;
  SweepAxes axes;
  SfatArgs sfat;
  RademacherArgs rad;

  auto common = [&](CLI::App* s, bool with_n = true) {
    if (with_n) s->add_option("--n", c.n, "Number of qubits");
    s->add_option("--seed", c.seed, "Seed (OQL_SEED overrides)");
    s->add_option("--workers", c.workers, "Worker threads (0 = hardware)");
  };
  auto tree_opts = [&](CLI::App* s) {
    s->add_option("--construction", construction,
                  "halving | von_neumann | vn_halving | general | pure");
    s->add_option("--basis-index", c.basis_index, "Halving tree basis index");
    s->add_flag("--scaled", c.scaled, "Halving tree with the 1/N factor");
  };
  // In sweep mode n, T, sigma, epsilon and eta take comma-separated lists.
  auto game_opts = [&](CLI::App* s, bool sweep_axes) {
    if (sweep_axes) {
      s->add_option("--n", axes.ns, "Qubit counts")->delimiter(',');
      s->add_option("--T", axes.Ts, "Horizons")->delimiter(',');
      s->add_option("--sigma", axes.sigmas, "Smoothness values in (0, 1]")->delimiter(',');
      s->add_option("--epsilon", axes.epsilons, "Noise levels in [0, 1/2]")->delimiter(',');
      s->add_option("--eta", axes.etas, "Learning rates")->delimiter(',');
    } else {
      s->add_option("--T", c.T, "Number of rounds");
      s->add_option("--eta", eta, "Learning rate (default sqrt(ln N / T))");
      s->add_option("--epsilon", c.epsilon, "Label noise level in [0, 1/2]");
      s->add_option("--sigma", c.sigma, "Smoothness in (0, 1]");
    }
    s->add_option("--learner", learner, "mmw | mmw-anytime | ftl | cheating");
    s->add_option("--adversary", adversary, "realizable | smooth | tree");
    s->add_option("--loss", loss, "l1 | l2");
    s->add_option("--noise", noise, "none | uniform | gaussian");
    s->add_option("--state", state, "True state kind: pure | mixed");
    s->add_option("--tree-T", c.tree_T, "Block depth of the tree adversary");
    s->add_option("--mistake-epsilon", c.mistake_epsilon, "Mistake threshold");
    s->add_option("--update-threshold", c.update_threshold,
                  "MMW skips updates when |prediction - label| is at most this");
    s->add_option("--replicates", c.replicates, "Independent replicates");
    tree_opts(s);
    common(s, !sweep_axes);
  };

  auto* verify = app.add_subcommand("verify", "Build a shattering tree and certify its margin");
  verify->add_option("--T", c.T, "Depth (halving, von_neumann) or block depth");
  verify->add_option("--delta", delta, "Margin to certify (default: construction's)");
  verify->add_option("--budget", c.budget, "Path budget");
  verify->add_option("--out", o.out, "Certificate path (default stdout)");
  tree_opts(verify);
  common(verify);

  auto* complete = app.add_subcommand("complete", "Complete a star partial matrix to a density matrix");
  complete->add_option("--input", o.input, "Partial-matrix JSON")->required();
  complete->add_option("--out", o.out, "Output path (default stdout)");

  auto* game = app.add_subcommand("game", "Run learner-vs-adversary games");
  game_opts(game, false);
  game->add_option("--summary", o.summary, "Summary JSON path (default stdout)");
  game->add_option("--transcript", o.transcript, "Transcript CSV path");
  game->add_flag("!--no-hindsight", c.hindsight, "Skip the best-in-hindsight comparator");

  auto* sweep = app.add_subcommand("sweep", "Aggregate final regret over a parameter grid");
  game_opts(sweep, true);
  sweep->add_flag("--hindsight", c.hindsight, "Also solve the hindsight comparator");
  sweep->add_option("--out", o.out, "CSV path (default stdout)");

  auto* brute = app.add_subcommand("sfat-brute", "Exhaustive sfat on a diagonal-state grid");
  brute->add_option("--delta", delta, "Margin parameter (default 1/4)");
  brute->add_option("--grid-step", sfat.grid_step, "Step of the diagonal-state grid");
  brute->add_option("--t-max", sfat.t_max, "Largest depth searched (<= 4)");
  brute->add_flag("--all-basis", sfat.all_basis, "Use every basis projector, not just |0><0|");
  brute->add_option("--budget", sfat.budget, "Search budget");
  brute->add_option("--out", o.out, "Output path (default stdout)");
  common(brute);

  auto* rademacher = app.add_subcommand("rademacher", "Monte-Carlo sequential Rademacher estimate");
  rademacher->add_option("--tree", rad.tree, "constant | <construction>");
  rademacher->add_option("--T", c.T, "Depth of the constant tree or block depth");
  rademacher->add_option("--paths", rad.paths, "Sampled paths");
  rademacher->add_option("--hypotheses", rad.hypotheses, "Sampled hypotheses");
  rademacher->add_flag("--exact", rad.exact, "Sup over all states via the top eigenvalue");
  rademacher->add_option("--basis-index", c.basis_index, "Halving tree basis index");
  rademacher->add_option("--out", o.out, "Output path (default stdout)");
  common(rademacher);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_code::config_error;
  }

  try {
    if (const char* env = std::getenv("OQL_SEED"); env && *env) {
      std::size_t used = 0;
      const std::string s(env);
      const unsigned long long v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument("OQL_SEED is not an integer");
      c.seed = v;
    }
    c.learner = parse_or_throw<LearnerKind>(learner, parse_learner, "learner");
    c.adversary = parse_or_throw<AdversaryKind>(adversary, parse_adversary, "adversary");
    c.loss = parse_or_throw<LossKind>(loss, parse_loss, "loss");
    c.construction = parse_or_throw<Construction>(construction, parse_construction, "construction");
    c.noise = parse_or_throw<Noise>(noise, parse_noise, "noise");
    c.state = parse_or_throw<StateKind>(state, parse_state_kind, "state");
    if (c.epsilon < 0.0 || c.epsilon > 0.5) throw std::invalid_argument("--epsilon must be in [0, 1/2]");
    if (!(c.sigma > 0.0 && c.sigma <= 1.0)) throw std::invalid_argument("--sigma must be in (0, 1]");
    for (double s : axes.sigmas)
      if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("--sigma values must be in (0, 1]");
    for (double e : axes.epsilons)
      if (e < 0.0 || e > 0.5) throw std::invalid_argument("--epsilon values must be in [0, 1/2]");

    if (verify->parsed()) {
      c.command = "verify";
      if (verify->count("--delta")) c.delta = delta;
      return cmd_verify(c, o, out, err);
    }
    if (complete->parsed()) return cmd_complete(o, out, err);
    if (game->parsed()) {
      c.command = "game";
      if (game->count("--eta")) c.eta = eta;
      return cmd_game(c, o, out);
    }
    if (sweep->parsed()) {
      c.command = "sweep";
      if (!sweep->count("--adversary")) c.adversary = AdversaryKind::smooth;
      if (!sweep->count("--replicates")) c.replicates = 8;
      if (!sweep->count("--hindsight")) c.hindsight = false;
      return cmd_sweep(c, axes, o, out);
    }
    if (brute->parsed()) {
      c.command = "sfat-brute";
      if (!brute->count("--n")) c.n = 1;
      if (brute->count("--delta")) c.delta = delta;
      return cmd_sfat(c, sfat, o, out);
    }
    if (rademacher->parsed()) {
      c.command = "rademacher";
      if (!rademacher->count("--T")) c.T = 64;
      return cmd_rademacher(c, rad, o, out);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::io_error;
  } catch (const ValidationError& e) {  // includes PatternError
    err << "error: " << e.what() << "\n";
    return exit_code::domain_failure;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::domain_failure;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return exit_code::config_error;
  } catch (const std::out_of_range& e) {
    err << "config error: " << e.what() << "\n";
    return exit_code::config_error;
  }
  return exit_code::config_error;
}

}  // namespace oql
