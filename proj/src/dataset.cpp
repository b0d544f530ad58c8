#include "hexcover/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "hexcover/errors.hpp"
#include "hexcover/parallel.hpp"

namespace hexcover {

namespace {

// Obstacle hexagons are shrunk slightly so neighbouring holes stay disjoint.
constexpr double kHoleShrink = 0.999;

bool connected_without(const std::vector<HexCell>& cells, const std::vector<std::uint8_t>& removed,
                       std::size_t extra) {
  std::vector<int> alive;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].visitable && !removed[i] && i != extra) alive.push_back(static_cast<int>(i));
  }
  if (alive.empty()) return false;
  std::vector<std::uint8_t> seen(cells.size(), 0);
  std::vector<int> stack = {alive.front()};
  seen[alive.front()] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int u : alive) {
      if (!seen[u] && hex_distance(cells[v].axial, cells[u].axial) == 1) {
        seen[u] = 1;
        ++count;
        stack.push_back(u);
      }
    }
  }
  return count == alive.size();
}

std::optional<AoiInstance> attempt(const GenerationConfig& cfg, Family family,
                                   std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double rs = cfg.rs_nm.min + (cfg.rs_nm.max - cfg.rs_nm.min) * unit(rng);
  const SensorSpec sensor(rs);
  AoiPolygon poly;
  try {
    poly = sample_polygon(family, {cfg.area_nm2.min, cfg.area_nm2.max}, rng);
  } catch (const BudgetExhausted&) {
    return std::nullopt;
  }
  Tessellation tess = tessellate(poly, sensor);
  std::vector<HexCell>& cells = tess.cells;
  const std::size_t n0 = tess.visitable_count();
  const auto removals =
      static_cast<std::size_t>(std::lround(cfg.obstacle_removal_rate * static_cast<double>(n0)));
  const double n_final = static_cast<double>(n0 - std::min(removals, n0));
  if (n_final < cfg.target_cells.min || n_final > cfg.target_cells.max) return std::nullopt;

  std::vector<std::uint8_t> removed(cells.size(), 0);
  if (!connected_without(cells, removed, cells.size())) return std::nullopt;

  // Interior = all six neighbours visitable in the original tessellation.
  std::vector<std::size_t> interior;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!cells[i].visitable) continue;
    int nb = 0;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      nb += cells[j].visitable && hex_distance(cells[i].axial, cells[j].axial) == 1;
    }
    if (nb == 6) interior.push_back(i);
  }
  std::shuffle(interior.begin(), interior.end(), rng);
  std::size_t taken = 0;
  for (std::size_t idx : interior) {
    if (taken == removals) break;
    if (!connected_without(cells, removed, idx)) continue;
    removed[idx] = 1;
    ++taken;
  }
  if (taken < removals) return std::nullopt;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!removed[i]) continue;
    cells[i].visitable = false;
    Ring hole = hexagon_ring(cells[i].centroid, kHoleShrink * rs, tess.frame.angle);
    std::reverse(hole.begin(), hole.end());
    poly.holes.push_back(std::move(hole));
  }
  if (validate_polygon(poly)) return std::nullopt;

  const double theta = 2.0 * std::numbers::pi * unit(rng);
  const double standoff =
      cfg.standoff_nm.min + (cfg.standoff_nm.max - cfg.standoff_nm.min) * unit(rng);
  const Vec2 base = ring_centroid(poly.outer) + Vec2{standoff * std::cos(theta), standoff * std::sin(theta)};

  AoiInstance inst;
  try {
    inst.graph = build_graph(cells, poly, base, rs);
  } catch (const DataError&) {
    return std::nullopt;
  }
  const int n = inst.graph.cell_count();
  if (n < cfg.target_cells.min || n > cfg.target_cells.max) return std::nullopt;
  inst.audit = audit_hamiltonian(inst.graph, cfg.audit_budget);
  if (!inst.audit.hamiltonian()) return std::nullopt;
  inst.family = family;
  inst.rs_nm = rs;
  inst.polygon = std::move(poly);
  inst.config = cfg;
  return inst;
}

}  // namespace

void GenerationConfig::validate() const {
  auto ordered = [](Band b, const char* name) {
    if (!(b.min <= b.max) || !std::isfinite(b.min) || !std::isfinite(b.max)) {
      throw ConfigError(std::string(name) + " band must satisfy min <= max");
    }
  };
  ordered(area_nm2, "area");
  ordered(rs_nm, "rs");
  ordered(standoff_nm, "standoff");
  ordered(target_cells, "target cell");
  if (area_nm2.min <= 0.0 || rs_nm.min <= 0.0) throw ConfigError("bands must be positive");
  if (train_count < 0 || val_count < 0 || test_count < 0) {
    throw ConfigError("split counts must be non-negative");
  }
  if (!(obstacle_removal_rate >= 0.0 && obstacle_removal_rate < 1.0)) {
    throw ConfigError("obstacle removal rate must be in [0, 1)");
  }
  if (rejection_budget < 1) throw ConfigError("rejection budget must be positive");
}

GenerationConfig tiny_generation_config() {
  GenerationConfig cfg;
  cfg.area_nm2 = {700.0, 1100.0};
  cfg.rs_nm = {5.0, 5.5};
  cfg.target_cells = {10.0, 14.0};
  cfg.obstacle_removal_rate = 0.1;
  cfg.train_count = 64;
  cfg.val_count = 16;
  cfg.test_count = 16;
  return cfg;
}

AoiInstance generate_instance(const GenerationConfig& cfg, std::uint64_t seed,
                              const GenerationOptions& opts) {
  cfg.validate();
  if (opts.families.empty()) throw ConfigError("no polygon family enabled");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, opts.families.size() - 1);
  for (int k = 0; k < cfg.rejection_budget; ++k) {
    const Family family = opts.families[pick(rng)];
    if (auto inst = attempt(cfg, family, rng)) {
      inst->seed = seed;
      char id[32];
      std::snprintf(id, sizeof id, "aoi-%016llx", static_cast<unsigned long long>(seed));
      inst->id = id;
      return std::move(*inst);
    }
  }
  throw BudgetExhausted("instance rejection budget exhausted");
}

std::vector<AoiInstance> generate_corpus(const GenerationConfig& cfg, int jobs,
                                         const GenerationOptions& opts) {
  cfg.validate();
  const auto count = static_cast<std::size_t>(cfg.total_count());
  std::vector<AoiInstance> corpus(count);
  parallel_for(count, jobs, [&](std::size_t i) {
    corpus[i] = generate_instance(cfg, derive_seed(cfg.master_seed, i), opts);
    char id[32];
    std::snprintf(id, sizeof id, "aoi-%05zu", i);
    corpus[i].id = id;
  });
  split_corpus(corpus, cfg.master_seed);
  return corpus;
}

SplitSizes split_sizes(std::size_t n) {
  SplitSizes s;
  s.val = static_cast<std::size_t>(std::lround(static_cast<double>(n) / 10.0));
  s.test = s.val;
  if (s.val + s.test > n) s.val = s.test = n / 2;
  s.train = n - s.val - s.test;
  return s;
}

void split_corpus(std::vector<AoiInstance>& corpus, std::uint64_t seed) {
  std::vector<std::size_t> perm(corpus.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::mt19937_64 rng(derive_seed(seed, 0x5911u));
  std::shuffle(perm.begin(), perm.end(), rng);
  const SplitSizes sizes = split_sizes(corpus.size());
  for (std::size_t k = 0; k < perm.size(); ++k) {
    corpus[perm[k]].split = k < sizes.train ? "train" : (k < sizes.train + sizes.val ? "val" : "test");
  }
}

std::vector<const AoiInstance*> select_split(const std::vector<AoiInstance>& corpus,
                                             std::string_view split) {
  std::vector<const AoiInstance*> out;
  for (const AoiInstance& inst : corpus) {
    if (split.empty() || inst.split == split) out.push_back(&inst);
  }
  return out;
}

}  // namespace hexcover
