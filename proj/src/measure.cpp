#include "condop/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "condop/errors.hpp"

namespace condop {

std::string_view to_string(PointKind kind) { return kind == PointKind::atom ? "atom" : "cell"; }

MeasureSpace::MeasureSpace(std::vector<double> weights, std::vector<PointKind> kinds) {
  if (weights.size() != kinds.size())
    throw DomainError("weights and kinds differ in length (" + std::to_string(weights.size()) +
                      " vs " + std::to_string(kinds.size()) + ")");
  if (weights.empty()) throw DomainError("measure space needs at least one point");
  auto d = std::make_shared<Data>();
  d->coords.resize(weights.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (!std::isfinite(w) || w <= 0.0)
      throw DomainError("weight at index " + std::to_string(i) + " must be positive and finite");
    d->coords[i] = cum + 0.5 * w;
    cum += w;
  }
  if (!std::isfinite(cum)) throw DomainError("total mass is not finite");
  d->total = cum;
  d->weights = std::move(weights);
  d->kinds = std::move(kinds);
  data_ = std::move(d);
}

bool MeasureSpace::all_cells() const {
  return std::all_of(data_->kinds.begin(), data_->kinds.end(),
                     [](PointKind k) { return k == PointKind::cell; });
}

bool MeasureSpace::has_cells() const {
  return std::any_of(data_->kinds.begin(), data_->kinds.end(),
                     [](PointKind k) { return k == PointKind::cell; });
}

bool MeasureSpace::same_as(const MeasureSpace& other) const {
  return data_ == other.data_ ||
         (data_->weights == other.data_->weights && data_->kinds == other.data_->kinds);
}

MeasureSpace make_space(std::vector<double> weights, std::vector<PointKind> kinds) {
  return MeasureSpace(std::move(weights), std::move(kinds));
}

MeasureSpace make_space(std::vector<double> weights, PointKind kind) {
  std::vector<PointKind> kinds(weights.size(), kind);
  return MeasureSpace(std::move(weights), std::move(kinds));
}

PartitionAlgebra make_partition(const MeasureSpace& space, std::span<const std::size_t> assignment) {
  if (assignment.size() != space.size())
    throw DomainError("assignment has " + std::to_string(assignment.size()) + " entries for " +
                      std::to_string(space.size()) + " points");
  const std::size_t nblocks = *std::max_element(assignment.begin(), assignment.end()) + 1;
  PartitionAlgebra part(space);
  part.blocks_.assign(nblocks, {});
  part.block_of_.assign(assignment.begin(), assignment.end());
  part.block_measure_.assign(nblocks, 0.0);
  for (std::size_t x = 0; x < assignment.size(); ++x) part.blocks_[assignment[x]].push_back(x);
  for (std::size_t b = 0; b < nblocks; ++b) {
    const auto& blk = part.blocks_[b];
    if (blk.empty()) throw DomainError("block index " + std::to_string(b) + " is empty");
    const PointKind k = space.kind(blk.front());
    long double m = 0.0L;
    for (std::size_t x : blk) {
      if (space.kind(x) != k)
        throw DomainError("block " + std::to_string(b) + " mixes atom and cell points");
      m += space.weight(x);
    }
    part.block_measure_[b] = static_cast<double>(m);
  }
  return part;
}

PartitionAlgebra trivial_partition(const MeasureSpace& space) {
  std::vector<std::size_t> a(space.size(), 0);
  return make_partition(space, a);
}

PartitionAlgebra singleton_partition(const MeasureSpace& space) {
  std::vector<std::size_t> a(space.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = i;
  return make_partition(space, a);
}

bool PartitionAlgebra::same_as(const PartitionAlgebra& other) const {
  return space_.same_as(other.space_) && block_of_ == other.block_of_;
}

std::vector<AtomInfo> atoms(const PartitionAlgebra& partition) {
  std::vector<AtomInfo> out;
  out.reserve(partition.num_blocks());
  for (std::size_t b = 0; b < partition.num_blocks(); ++b)
    out.push_back({b, partition.block_measure(b), partition.block_kind(b) == PointKind::cell});
  return out;
}

std::string_view to_string(BlockRule rule) {
  switch (rule) {
    case BlockRule::pairing: return "pairing";
    case BlockRule::singletons: return "singletons";
    case BlockRule::trivial: return "trivial";
  }
  return "?";
}

BlockRule parse_block_rule(std::string_view name) {
  if (name == "pairing") return BlockRule::pairing;
  if (name == "singletons") return BlockRule::singletons;
  if (name == "trivial") return BlockRule::trivial;
  throw DomainError("unknown block rule '" + std::string(name) +
                    "' (expected pairing, singletons or trivial)");
}

std::vector<std::size_t> block_assignment(BlockRule rule, std::size_t n) {
  std::vector<std::size_t> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (rule) {
      case BlockRule::pairing: a[i] = i / 2; break;
      case BlockRule::singletons: a[i] = i; break;
      case BlockRule::trivial: a[i] = 0; break;
    }
  }
  return a;
}

RefinementLevel dyadic_level(int level, double base_interval_mass, BlockRule rule) {
  if (level < 1) throw DomainError("dyadic level must be >= 1");
  if (level > kMaxDyadicDepth + 1)
    throw ResourceError("dyadic level " + std::to_string(level) + " exceeds the cap of " +
                        std::to_string(kMaxDyadicDepth + 1));
  if (!std::isfinite(base_interval_mass) || base_interval_mass <= 0.0)
    throw DomainError("base interval mass must be positive and finite");
  const std::size_t n = std::size_t{1} << level;
  const double cell = std::ldexp(base_interval_mass, -level);
  MeasureSpace space = make_space(std::vector<double>(n, cell), PointKind::cell);
  auto assignment = block_assignment(rule, n);
  PartitionAlgebra part = make_partition(space, assignment);
  return RefinementLevel{level, std::move(space), std::move(part), {}, cell};
}

RefinementFamily dyadic_family(int depth, double base_interval_mass, BlockRule rule) {
  if (depth < 1) throw DomainError("dyadic family depth must be >= 1");
  if (depth > kMaxDyadicDepth)
    throw ResourceError("dyadic family depth " + std::to_string(depth) + " exceeds the cap of " +
                        std::to_string(kMaxDyadicDepth));
  RefinementFamily fam;
  fam.levels.reserve(static_cast<std::size_t>(depth) + 1);
  for (int level = 1; level <= depth + 1; ++level) {
    RefinementLevel lv = dyadic_level(level, base_interval_mass, rule);
    if (level > 1) {
      lv.parent.resize(lv.space.size());
      for (std::size_t i = 0; i < lv.parent.size(); ++i) lv.parent[i] = i / 2;
    }
    fam.levels.push_back(std::move(lv));
  }
  return fam;
}

const RefinementLevel& RefinementFamily::at_level(int level) const {
  for (const auto& lv : levels)
    if (lv.level == level) return lv;
  throw DomainError("family has no level " + std::to_string(level));
}

}  // namespace condop
