#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "oql/completion.hpp"
#include "oql/core.hpp"
#include "oql/game.hpp"
#include "oql/shattering.hpp"
#include "oql/trees.hpp"

namespace oql {

using json = nlohmann::json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// {"dim": N, "re": [[...]], "im": [[...]]}, row-major.
json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);

// {"dim": N, "first_row": [w12, ..., w1N]}
json partial_to_json(const PartialStarMatrix& p);
PartialStarMatrix partial_from_json(const json& j);

json path_to_json(Bits bits);

// Certificate for a verification run. Always lists the worst path; lists every
// checked path when the report recorded them.
json certificate_json(const ShatterTree& tree, const ShatterReport& report, std::uint64_t seed);

// Columns: round, measurement_hash, prediction, label, loss, cum_loss,
// cum_regret_true, cum_regret_hindsight, mistake_flag. Columns that need a
// comparator the transcript lacks are left empty. cum_regret_hindsight is
// measured against the final hindsight state on each prefix.
std::string transcript_csv(const GameTranscript& transcript, double mistake_epsilon);

}  // namespace oql
