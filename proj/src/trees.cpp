#include "oql/trees.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "oql/completion.hpp"

namespace oql {

namespace {

constexpr int kMaxQubits = 8;  // N <= 256

int dim_for(int n_qubits, const char* who) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    std::ostringstream os;
    os << who << ": n_qubits must be in [1, " << kMaxQubits << "], got " << n_qubits;
    throw std::invalid_argument(os.str());
  }
  return 1 << n_qubits;
}

void require_block_depth(int t, const char* who) {
  if (t < 1 || t > 500) {
    std::ostringstream os;
    os << who << ": block depth must be in [1, 500], got " << t;
    throw std::invalid_argument(os.str());
  }
}

// sum_{k=1}^{upto} eps_{k + T*block} 2^{-k}
double block_sum(Bits bits, int block_depth, int block, int upto) {
  double s = 0.0;
  double w = 0.5;
  for (int k = 1; k <= upto; ++k, w *= 0.5) s += path_bit(bits, k + block_depth * block) * w;
  return s;
}

struct BlockPos {
  int block;   // t'
  int offset;  // t~
};

BlockPos block_pos(int level, int block_depth) {
  const int block = (level - 1) / block_depth;
  return {block, level - 1 - block_depth * block};
}

std::vector<Measurement> basis_alphabet(int dim, int count) {
  std::vector<Measurement> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(Measurement::basis_projector(dim, i));
  return out;
}

std::vector<Measurement> overlap_alphabet(int dim, int count) {
  std::vector<Measurement> out;
  out.reserve(count);
  for (int i = 1; i <= count; ++i) out.push_back(overlap_measurement(dim, i));
  return out;
}

// Real amplitude vector -> PureState; sqrt of weights already applied by caller.
PureState real_state(const std::vector<double>& amps) {
  CVector v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) v(static_cast<Eigen::Index>(i)) = amps[i];
  return PureState(std::move(v));
}

WitnessMap pure_witness(std::function<PureState(Bits)> pure) {
  WitnessMap w;
  w.pure = pure;
  w.state = [pure](Bits path) { return DensityMatrix::from_pure(pure(path)); };
  return w;
}

void use_v_as_threshold(ShatterTree& tree) {
  tree.threshold = tree.v_value;
}

}  // namespace

std::string_view to_string(Construction c) {
  switch (c) {
    case Construction::halving: return "halving";
    case Construction::von_neumann: return "von_neumann";
    case Construction::vn_halving: return "vn_halving";
    case Construction::general: return "general";
    case Construction::pure: return "pure";
    case Construction::custom: return "custom";
  }
  return "custom";
}

std::optional<Construction> parse_construction(std::string_view name) {
  for (auto c : {Construction::halving, Construction::von_neumann, Construction::vn_halving,
                 Construction::general, Construction::pure, Construction::custom})
    if (name == to_string(c)) return c;
  return std::nullopt;
}

Measurement overlap_measurement(int dim, int i) {
  if (i < 1 || i >= dim) throw std::invalid_argument("overlap_measurement: i must be in [1, N-1]");
  CVector v = CVector::Zero(dim);
  v(0) = std::numbers::sqrt2 / 2.0;
  v(i) = std::numbers::sqrt2 / 2.0;
  v /= v.norm();
  return Measurement::projector(PureState(std::move(v)));
}

TreeBundle build_halving_tree(int basis_index, int depth, int n_qubits, bool scaled) {
  const int dim = dim_for(n_qubits, "build_halving_tree");
  if (basis_index < 0 || basis_index > dim - 2) {
    std::ostringstream os;
    os << "build_halving_tree: basis index " << basis_index << " outside [0, " << dim - 2 << "]";
    throw std::invalid_argument(os.str());
  }
  require_block_depth(depth, "build_halving_tree");

  const double scale = scaled ? 1.0 / dim : 1.0;
  TreeBundle b;
  ShatterTree& t = b.tree;
  t.tag = Construction::halving;
  t.depth = depth;
  t.block_depth = depth;
  t.n_qubits = n_qubits;
  t.dim = dim;
  t.delta = scale * std::ldexp(1.0, -(depth + 1));
  t.alphabet = {Measurement::basis_projector(dim, basis_index)};
  t.x_index = [](Bits) -> std::size_t { return 0; };
  t.v_value = [scale](Bits bits, int level) {
    double s = 0.0, w = 0.5;
    for (int k = 0; k < level; ++k, w *= 0.5) s += path_bit(bits, k) * w;
    return scale * s;
  };
  use_v_as_threshold(t);

  const int perp = basis_index == dim - 1 ? 0 : dim - 1;
  b.witness = pure_witness([=](Bits path) {
    double p = 0.0, w = 0.5;
    for (int k = 0; k <= depth; ++k, w *= 0.5) p += path_bit(path, k) * w;
    p *= scale;
    std::vector<double> amps(dim, 0.0);
    amps[basis_index] = std::sqrt(p);
    amps[perp] = std::sqrt(1.0 - p);
    return real_state(amps);
  });
  return b;
}

TreeBundle build_von_neumann_tree(int depth, int n_qubits) {
  const int dim = dim_for(n_qubits, "build_von_neumann_tree");
  if (depth < 1 || depth > dim) {
    std::ostringstream os;
    os << "build_von_neumann_tree: depth must be in [1, " << dim << "], got " << depth;
    throw std::invalid_argument(os.str());
  }
  TreeBundle b;
  ShatterTree& t = b.tree;
  t.tag = Construction::von_neumann;
  t.depth = depth;
  t.block_depth = depth;
  t.n_qubits = n_qubits;
  t.dim = dim;
  t.delta = 0.5 / depth;
  t.alphabet = basis_alphabet(dim, depth);
  t.x_index = [](Bits prefix) { return prefix.size(); };
  const double v = 0.5 / depth;
  t.v_value = [v](Bits, int) { return v; };
  use_v_as_threshold(t);

  b.witness = pure_witness([=](Bits path) {
    std::vector<double> amps(dim, 0.0);
    int count = 0;
    for (int i = 0; i < depth; ++i)
      if (path_bit(path, i + 1) == 1) ++count;
    if (count == 0) {
      amps[dim - 1] = 1.0;
    } else {
      const double a = 1.0 / std::sqrt(static_cast<double>(count));
      for (int i = 0; i < depth; ++i)
        if (path_bit(path, i + 1) == 1) amps[i] = a;
    }
    return real_state(amps);
  });
  return b;
}

TreeBundle build_vn_halving_tree(int block_depth, int n_qubits) {
  const int dim = dim_for(n_qubits, "build_vn_halving_tree");
  require_block_depth(block_depth, "build_vn_halving_tree");
  const int T = block_depth;
  const double base = std::ldexp(1.0, -(n_qubits + 1));
  const double step = std::ldexp(1.0, -(T + n_qubits + 1));

  TreeBundle b;
  ShatterTree& t = b.tree;
  t.tag = Construction::vn_halving;
  t.depth = T * (dim - 1);
  t.block_depth = T;
  t.n_qubits = n_qubits;
  t.dim = dim;
  t.delta = step;
  t.alphabet = basis_alphabet(dim, dim - 1);
  t.x_index = [T](Bits prefix) {
    return static_cast<std::size_t>(block_pos(static_cast<int>(prefix.size()) + 1, T).block);
  };
  t.v_value = [T, base](Bits bits, int level) {
    const auto [block, offset] = block_pos(level, T);
    return base * (1.0 + block_sum(bits, T, block, offset));
  };
  use_v_as_threshold(t);

  auto v = t.v_value;
  b.witness = pure_witness([=](Bits path) {
    std::vector<double> amps(dim, 0.0);
    double total = 0.0;
    for (int i = 0; i <= dim - 2; ++i) {
      const int level = (i + 1) * T;
      const double a = v(path, level) + step * path_bit(path, level);
      total += a;
      amps[i] = std::sqrt(a);
    }
    if (total > 1.0) throw ValidationError("build_vn_halving_tree: amplitude weights exceed 1");
    amps[dim - 1] = std::sqrt(1.0 - total);
    return real_state(amps);
  });
  return b;
}

namespace {

// v-tree shared by the general and pure constructions, before any shift:
// (4 sqrt(N-1))^{-1} (1 + sum_{k=1}^{t~} eps_{k+Tt'} 2^{-k}).
std::function<double(Bits, int)> overlap_block_values(int dim, int T) {
  const double c = 0.25 / std::sqrt(dim - 1.0);
  return [T, c](Bits bits, int level) {
    const auto [block, offset] = block_pos(level, T);
    return c * (1.0 + block_sum(bits, T, block, offset));
  };
}

// a_i = v_{iT} + 2^{-(T+2)} (N-1)^{-1/2} eps_{iT}, i = 1..count.
std::vector<double> overlap_targets(const std::function<double(Bits, int)>& v, Bits path, int dim,
                                    int T, int count) {
  const double step = std::ldexp(1.0, -(T + 2)) / std::sqrt(dim - 1.0);
  std::vector<double> a(count);
  for (int i = 1; i <= count; ++i) a[i - 1] = v(path, i * T) + step * path_bit(path, i * T);
  return a;
}

}  // namespace

TreeBundle build_general_tree(int block_depth, int n_qubits) {
  const int dim = dim_for(n_qubits, "build_general_tree");
  require_block_depth(block_depth, "build_general_tree");
  const int T = block_depth;
  const double shift = 0.25 * (1.0 + 1.0 / (dim - 1));

  TreeBundle b;
  ShatterTree& t = b.tree;
  t.tag = Construction::general;
  t.depth = T * (dim - 1);
  t.block_depth = T;
  t.n_qubits = n_qubits;
  t.dim = dim;
  t.delta = std::ldexp(1.0, -(T + 2)) / std::sqrt(dim - 1.0);
  t.alphabet = overlap_alphabet(dim, dim - 1);
  t.x_index = [T](Bits prefix) {
    return static_cast<std::size_t>(block_pos(static_cast<int>(prefix.size()) + 1, T).block);
  };
  auto raw = overlap_block_values(dim, T);
  t.v_value = [raw, shift](Bits bits, int level) { return raw(bits, level) + shift; };
  use_v_as_threshold(t);

  b.witness.state = [=](Bits path) {
    PartialStarMatrix partial(dim, overlap_targets(raw, path, dim, T, dim - 1));
    return complete_to_density(partial);
  };
  return b;
}

TreeBundle build_pure_tree(int block_depth, int n_qubits) {
  if (n_qubits < 2) throw std::invalid_argument("build_pure_tree: needs n_qubits >= 2");
  const int dim = dim_for(n_qubits, "build_pure_tree");
  require_block_depth(block_depth, "build_pure_tree");
  const int T = block_depth;
  const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;

  TreeBundle b;
  ShatterTree& t = b.tree;
  t.tag = Construction::pure;
  t.depth = T * (dim - 2);
  t.block_depth = T;
  t.n_qubits = n_qubits;
  t.dim = dim;
  t.delta = std::ldexp(1.0, -(T + 2)) / std::sqrt(2.0 * (dim - 1));
  t.alphabet = overlap_alphabet(dim, dim - 2);
  t.x_index = [T](Bits prefix) {
    return static_cast<std::size_t>(block_pos(static_cast<int>(prefix.size()) + 1, T).block);
  };
  auto raw = overlap_block_values(dim, T);
  const double step = std::ldexp(1.0, -(T + 2)) / std::sqrt(dim - 1.0);
  // w_t = v_t / sqrt2 + (1/2 + a_{t'+1}^2) / 2
  t.v_value = [=](Bits path, int level) {
    const int block = block_pos(level, T).block;
    const int end = (block + 1) * T;
    const double a = raw(path, end) + step * path_bit(path, end);
    return raw(path, level) * inv_sqrt2 + 0.5 * (0.5 + a * a);
  };
  t.prefix_valid_v = false;
  // Tr(E_{0,i} psi psi^dag) = f(a_i) with f(a) = a/sqrt2 + (1/2 + a^2)/2, which
  // is increasing with slope >= 1/sqrt2 on a >= 0, so f(v_t) separates the two
  // subtrees with margin >= delta using prefix bits only.
  t.threshold = [=](Bits prefix, int level) {
    const double v = raw(prefix, level);
    return v * inv_sqrt2 + 0.5 * (0.5 + v * v);
  };

  b.witness = pure_witness([=](Bits path) {
    const auto a = overlap_targets(raw, path, dim, T, dim - 2);
    std::vector<double> amps(dim, 0.0);
    amps[0] = inv_sqrt2;
    double sum_sq = 0.0;
    for (int i = 1; i <= dim - 2; ++i) {
      amps[i] = a[i - 1];
      sum_sq += a[i - 1] * a[i - 1];
    }
    const double rest = 0.5 - sum_sq;
    if (rest < 0.0) throw ValidationError("build_pure_tree: sum of a_i^2 exceeds 1/2");
    amps[dim - 1] = std::sqrt(rest);
    return real_state(amps);
  });
  return b;
}

ShatterTree build_constant_tree(const Measurement& e, int depth, double value) {
  if (depth < 1) throw std::invalid_argument("build_constant_tree: depth must be >= 1");
  ShatterTree t;
  t.tag = Construction::custom;
  t.depth = depth;
  t.block_depth = depth;
  t.dim = e.dim();
  t.n_qubits = 0;
  for (int d = t.dim; d > 1; d >>= 1) ++t.n_qubits;
  t.alphabet = {e};
  t.x_index = [](Bits) -> std::size_t { return 0; };
  t.v_value = [value](Bits, int) { return value; };
  t.threshold = t.v_value;
  return t;
}

TreeBundle build_tree(Construction c, int n_qubits, int t_param, int basis_index, bool scaled) {
  switch (c) {
    case Construction::halving: return build_halving_tree(basis_index, t_param, n_qubits, scaled);
    case Construction::von_neumann: return build_von_neumann_tree(t_param, n_qubits);
    case Construction::vn_halving: return build_vn_halving_tree(t_param, n_qubits);
    case Construction::general: return build_general_tree(t_param, n_qubits);
    case Construction::pure: return build_pure_tree(t_param, n_qubits);
    case Construction::custom: break;
  }
  throw std::invalid_argument("build_tree: custom trees have no builder");
}

const Measurement& node_measurement(const ShatterTree& tree, Bits prefix) {
  if (static_cast<int>(prefix.size()) >= tree.depth) {
    std::ostringstream os;
    os << "node_measurement: prefix length " << prefix.size() << " must be < depth " << tree.depth;
    throw std::invalid_argument(os.str());
  }
  return tree.alphabet.at(tree.x_index(prefix));
}

double node_value(const ShatterTree& tree, Bits bits, int level) {
  if (level < 1 || level > tree.depth) {
    std::ostringstream os;
    os << "node_value: level " << level << " outside [1, " << tree.depth << "]";
    throw std::invalid_argument(os.str());
  }
  const auto len = static_cast<int>(bits.size());
  if (tree.prefix_valid_v ? len < level - 1 : len != tree.depth) {
    std::ostringstream os;
    os << "node_value: got " << len << " bits for level " << level << " of a depth-"
       << tree.depth << (tree.prefix_valid_v ? " tree" : " tree that needs full paths");
    throw std::invalid_argument(os.str());
  }
  return tree.v_value(tree.prefix_valid_v ? bits.first(static_cast<std::size_t>(level - 1)) : bits,
                      level);
}

}  // namespace oql
