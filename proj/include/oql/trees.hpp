#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oql/core.hpp"

namespace oql {

// Path through a binary tree: bits[k-1] = epsilon_k in {+1, -1}, k = 1..depth.
// The node at level t is addressed by the prefix epsilon_1..epsilon_{t-1}.
using Path = std::vector<int>;
using Bits = std::span<const int>;

// epsilon_k with the convention epsilon_0 = +1. k is 1-based.
inline int path_bit(Bits bits, int k) { return k == 0 ? 1 : bits[static_cast<std::size_t>(k - 1)]; }

enum class Construction { halving, von_neumann, vn_halving, general, pure, custom };

std::string_view to_string(Construction c);
std::optional<Construction> parse_construction(std::string_view name);

// Depth-T binary tree with measurement-valued nodes x_t and real-valued nodes
// v_t. Trees are lazy: nodes are computed from the path on demand.
struct ShatterTree {
  Construction tag = Construction::custom;
  int depth = 0;
  int n_qubits = 0;
  int dim = 0;
  int block_depth = 0;  // T parameter the builder was called with
  double delta = 0.0;   // certified margin at default parameters

  // Distinct measurements used by the tree; x_index picks one per node.
  std::vector<Measurement> alphabet;
  // prefix (length t-1) -> index into alphabet.
  std::function<std::size_t(Bits prefix)> x_index;
  // (bits, t) -> v_t. When prefix_valid_v, bits may be any sequence of at
  // least t-1 bits and only the first t-1 are read; otherwise bits must be a
  // full path.
  std::function<double(Bits bits, int level)> v_value;
  bool prefix_valid_v = true;
  // Prefix-measurable threshold with the same side-of-node semantics as v;
  // equals v_value on prefix-valid trees.
  std::function<double(Bits prefix, int level)> threshold;
};

// Path -> witness state.
struct WitnessMap {
  std::function<DensityMatrix(Bits path)> state;
  // Set for constructions whose witnesses are pure.
  std::function<PureState(Bits path)> pure;
};

struct TreeBundle {
  ShatterTree tree;
  WitnessMap witness;
};

// Constant measurement |i><i|, v_t = s * sum_{k<t} eps_k 2^{-k-1} with
// eps_0 = 1 and s = 1 (or 1/N when scaled). The witness puts
// s * sum_{k=0}^{T} eps_k 2^{-k-1} of its weight on |i>, giving margin
// s * 2^{-(T+1)} on every level.
TreeBundle build_halving_tree(int basis_index, int depth, int n_qubits, bool scaled);

// x_t = |t-1><t-1|, v_t = 1/(2T), witness uniform over {|i> : eps_{i+1} = +1}
// (|N-1> when that set is empty). Margin 1/(2T) for T <= N-1.
TreeBundle build_von_neumann_tree(int depth, int n_qubits);

// N-1 halving blocks of depth T on |0>,...,|N-2>; margin 2^{-(n+T+1)}.
TreeBundle build_vn_halving_tree(int block_depth, int n_qubits);

// Blocks on E_{0,i} = projector onto (|0>+|i>)/sqrt2, witnesses obtained by
// completing the star partial matrix; margin 2^{-(T+2)} (N-1)^{-1/2}.
TreeBundle build_general_tree(int block_depth, int n_qubits);

// Pure witnesses (|0> + sum a_i |i> + r |N-1>) / ..., depth T(N-2), margin
// 2^{-(T+2)} (2(N-1))^{-1/2}. The v-tree reads a future block bit, so it is
// flagged prefix_valid_v = false.
TreeBundle build_pure_tree(int block_depth, int n_qubits);

// Constant measurement and constant value at every node; no witness.
ShatterTree build_constant_tree(const Measurement& e, int depth, double value);

// Dispatch by tag with each construction's natural parameters.
TreeBundle build_tree(Construction c, int n_qubits, int t_param, int basis_index = 0,
                      bool scaled = false);

// E_{0,i} = (|0><0| + |i><i| + |0><i| + |i><0|) / 2.
Measurement overlap_measurement(int dim, int i);

const Measurement& node_measurement(const ShatterTree& tree, Bits prefix);
// Level is 1-based. For prefix-valid trees bits needs at least level-1 entries;
// otherwise a full path.
double node_value(const ShatterTree& tree, Bits bits, int level);

}  // namespace oql
