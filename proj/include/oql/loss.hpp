#pragma once

#include <optional>
#include <string_view>

namespace oql {

enum class LossKind { l1, l2 };

std::string_view to_string(LossKind k);
std::optional<LossKind> parse_loss(std::string_view name);

// |p - y| or (p - y)^2.
double loss_value(LossKind kind, double prediction, double label);
// d loss / d prediction: sign(p - y) with sign(0) = 0, or 2(p - y).
double loss_subgradient_scale(LossKind kind, double prediction, double label);
// Labels outside [0, 1] are accepted but callers may want to flag them.
inline bool label_in_range(double label) { return label >= 0.0 && label <= 1.0; }

}  // namespace oql
