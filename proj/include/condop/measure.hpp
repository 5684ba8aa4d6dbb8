#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace condop {

// `atom` points are genuine atoms of the space; `cell` points are fragments of a
// discretized non-atomic region.
enum class PointKind { atom, cell };

std::string_view to_string(PointKind kind);

/// Finite measure space on points 0..n-1. Sigma is the full power set.
///
/// Instances share their immutable storage, so copies are cheap and a
/// function can carry its space by value.
class MeasureSpace {
 public:
  MeasureSpace(std::vector<double> weights, std::vector<PointKind> kinds);

  std::size_t size() const { return data_->weights.size(); }
  double weight(std::size_t x) const { return data_->weights[x]; }
  PointKind kind(std::size_t x) const { return data_->kinds[x]; }
  std::span<const double> weights() const { return data_->weights; }
  std::span<const PointKind> kinds() const { return data_->kinds; }
  double total_mass() const { return data_->total; }

  /// Midpoint of point x when the points are laid end to end on [0, mass).
  /// Symbolic function rules are evaluated at these coordinates.
  double coordinate(std::size_t x) const { return data_->coords[x]; }

  bool all_cells() const;
  bool has_cells() const;

  /// True for shared storage or equal weights and kinds.
  bool same_as(const MeasureSpace& other) const;

 private:
  struct Data {
    std::vector<double> weights;
    std::vector<PointKind> kinds;
    std::vector<double> coords;
    double total = 0.0;
  };
  std::shared_ptr<const Data> data_;
};

MeasureSpace make_space(std::vector<double> weights, std::vector<PointKind> kinds);
MeasureSpace make_space(std::vector<double> weights, PointKind kind = PointKind::atom);

/// Partition of the points into blocks; the blocks generate the sub-algebra A
/// and are its atoms.
class PartitionAlgebra {
 public:
  const MeasureSpace& space() const { return space_; }
  std::size_t num_blocks() const { return blocks_.size(); }
  const std::vector<std::size_t>& block(std::size_t b) const { return blocks_[b]; }
  const std::vector<std::vector<std::size_t>>& blocks() const { return blocks_; }
  std::size_t block_of(std::size_t x) const { return block_of_[x]; }
  std::span<const std::size_t> assignment() const { return block_of_; }
  double block_measure(std::size_t b) const { return block_measure_[b]; }
  PointKind block_kind(std::size_t b) const { return space_.kind(blocks_[b].front()); }

  bool same_as(const PartitionAlgebra& other) const;

 private:
  friend PartitionAlgebra make_partition(const MeasureSpace&, std::span<const std::size_t>);
  PartitionAlgebra(MeasureSpace space) : space_(std::move(space)) {}

  MeasureSpace space_;
  std::vector<std::vector<std::size_t>> blocks_;
  std::vector<std::size_t> block_of_;
  std::vector<double> block_measure_;
};

PartitionAlgebra make_partition(const MeasureSpace& space, std::span<const std::size_t> assignment);
PartitionAlgebra trivial_partition(const MeasureSpace& space);
PartitionAlgebra singleton_partition(const MeasureSpace& space);

struct AtomInfo {
  std::size_t block;
  double measure;
  bool b_model;  // block consists of `cell` points
};

std::vector<AtomInfo> atoms(const PartitionAlgebra& partition);

enum class BlockRule { pairing, singletons, trivial };

std::string_view to_string(BlockRule rule);
BlockRule parse_block_rule(std::string_view name);

/// Blocks for a level of `n` equal cells under the given rule.
std::vector<std::size_t> block_assignment(BlockRule rule, std::size_t n);

struct RefinementLevel {
  int level;  // log2 of the cell count
  MeasureSpace space;
  PartitionAlgebra partition;
  std::vector<std::size_t> parent;  // into the previous level; empty for the first
  double mesh;
};

struct RefinementFamily {
  std::vector<RefinementLevel> levels;

  const RefinementLevel& at_level(int level) const;
};

constexpr int kMaxDyadicDepth = 20;

/// Dyadic cells of an interval of the given mass. Entry i of the result holds
/// 2^(i+1) cells, so depth d produces levels 1..d+1.
RefinementFamily dyadic_family(int depth, double base_interval_mass = 1.0,
                               BlockRule rule = BlockRule::pairing);

/// A single dyadic level with 2^level cells (no ancestors built).
RefinementLevel dyadic_level(int level, double base_interval_mass, BlockRule rule);

}  // namespace condop
