#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oql/core.hpp"
#include "oql/game.hpp"
#include "oql/io.hpp"
#include "oql/loss.hpp"
#include "oql/trees.hpp"

namespace oql {

enum class LearnerKind { mmw, mmw_anytime, ftl, cheating };
enum class AdversaryKind { realizable, smooth, tree };

std::string_view to_string(LearnerKind k);
std::optional<LearnerKind> parse_learner(std::string_view name);
std::string_view to_string(AdversaryKind k);
std::optional<AdversaryKind> parse_adversary(std::string_view name);

// Exit codes shared by every subcommand.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int domain_failure = 1;
inline constexpr int config_error = 2;
inline constexpr int io_error = 3;
}  // namespace exit_code

struct ExperimentConfig {
  std::string command;
  int n = 2;
  int T = 1000;       // game horizon; block depth for verify
  int tree_T = 3;     // block depth of the tree adversary's construction
  std::optional<double> delta;
  std::optional<double> eta;
  double sigma = 1.0;
  double epsilon = 0.0;
  double mistake_epsilon = 0.1;
  double update_threshold = 0.0;
  LearnerKind learner = LearnerKind::mmw;
  AdversaryKind adversary = AdversaryKind::realizable;
  LossKind loss = LossKind::l1;
  Construction construction = Construction::halving;
  Noise noise = Noise::uniform;
  StateKind state = StateKind::pure;
  std::uint64_t seed = 0;
  int replicates = 1;
  std::size_t budget = 10000;
  int basis_index = 0;
  bool scaled = false;
  bool hindsight = true;
  unsigned workers = 0;
};

json config_to_json(const ExperimentConfig& c);
// Throws std::invalid_argument on unknown enum names or missing fields.
ExperimentConfig config_from_json(const json& j);
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

// One game replicate. Replicate r draws its true state and game seed from
// stream r of the config seed, so results do not depend on how many
// replicates run or in what order.
GameTranscript run_replicate(const ExperimentConfig& config, int replicate);

// Per-replicate summary row as emitted in summary JSON.
json replicate_summary(const GameTranscript& transcript, int replicate, double mistake_epsilon);

// Entry point of the oql tool. Honors OQL_SEED.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace oql
