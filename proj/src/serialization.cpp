#include "hexcover/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hexcover/errors.hpp"

namespace hexcover {

using ojson = nlohmann::ordered_json;

namespace {

ojson ring_to_json(const Ring& ring) {
  ojson a = ojson::array();
  for (Vec2 v : ring) a.push_back({v.x, v.y});
  return a;
}

Ring ring_from_json(const ojson& a) {
  Ring ring;
  for (const auto& v : a) {
    if (!v.is_array() || v.size() != 2) throw DataError("polygon vertex must be [x, y]");
    ring.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  return ring;
}

ojson band_to_json(Band b) { return {b.min, b.max}; }

Band band_from_json(const ojson& j) {
  if (!j.is_array() || j.size() != 2) throw DataError("band must be [min, max]");
  return {j[0].get<double>(), j[1].get<double>()};
}

const char* outcome_name(AuditOutcome o) {
  switch (o) {
    case AuditOutcome::Hamiltonian:
      return "hamiltonian";
    case AuditOutcome::NotHamiltonian:
      return "not-hamiltonian";
    case AuditOutcome::BudgetExhausted:
      return "budget-exhausted";
  }
  return "unknown";
}

AuditOutcome outcome_from_name(const std::string& s) {
  if (s == "hamiltonian") return AuditOutcome::Hamiltonian;
  if (s == "not-hamiltonian") return AuditOutcome::NotHamiltonian;
  if (s == "budget-exhausted") return AuditOutcome::BudgetExhausted;
  throw DataError("unknown audit outcome: " + s);
}

const ojson& field(const ojson& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw DataError(std::string("missing field: ") + name);
  return *it;
}

AoiInstance from_json(const ojson& j) {
  if (!j.is_object()) throw DataError("instance document must be an object");
  const int version = field(j, "format_version").get<int>();
  if (version != kInstanceFormatVersion) {
    throw DataError("format version mismatch: got " + std::to_string(version) + ", expected " +
                    std::to_string(kInstanceFormatVersion));
  }
  AoiInstance inst;
  inst.id = field(j, "id").get<std::string>();
  inst.seed = field(j, "seed").get<std::uint64_t>();
  inst.family = family_from_string(field(j, "family").get<std::string>());
  inst.rs_nm = field(j, "rs_nm").get<double>();
  const ojson& poly = field(j, "polygon");
  inst.polygon.family = inst.family;
  inst.polygon.outer = ring_from_json(field(poly, "outer"));
  for (const auto& h : field(poly, "holes")) inst.polygon.holes.push_back(ring_from_json(h));

  const ojson& nodes = field(j, "nodes");
  const int base = field(j, "base").get<int>();
  const int terminal = field(j, "terminal").get<int>();
  const int n = static_cast<int>(nodes.size()) - 2;
  if (n < 1 || base != n || terminal != n + 1) {
    throw DataError("base and terminal must be the last two node ids");
  }
  std::vector<Vec2> pos;
  std::vector<Axial> axial;
  Vec2 base_point;
  for (int i = 0; i < n + 2; ++i) {
    const ojson& node = nodes[i];
    if (field(node, "id").get<int>() != i) throw DataError("node ids must be dense and ordered");
    const Vec2 p{field(node, "x_nm").get<double>(), field(node, "y_nm").get<double>()};
    if (i < n) {
      pos.push_back(p);
      axial.push_back({field(node, "q").get<int>(), field(node, "r").get<int>()});
    } else if (i == n) {
      base_point = p;
    } else if (!(p == base_point)) {
      throw DataError("terminal must share the base position");
    }
  }

  const ojson& feats = field(j, "features");
  if (static_cast<int>(feats.size()) != n + 2) throw DataError("feature count mismatch");
  std::vector<double> hexscore;
  for (int i = 0; i < n + 2; ++i) {
    const double w = field(feats[i], "w").get<double>();
    const double m = field(feats[i], "m").get<double>();
    if (!(w >= 0.0)) throw DataError("schema violation: hexscore w must be >= 0");
    if (m != 0.0 && m != 1.0) throw DataError("schema violation: base indicator m must be 0 or 1");
    if ((i >= n) != (m == 1.0)) throw DataError("schema violation: m must mark base and terminal");
    if (i < n) hexscore.push_back(w);
  }

  std::vector<std::pair<int, int>> cell_edges;
  std::vector<int> base_nb, term_nb;
  for (const auto& e : field(j, "edges")) {
    if (!e.is_array() || e.size() != 2) throw DataError("edge must be [i, j]");
    int a = e[0].get<int>(), b = e[1].get<int>();
    if (a > b) std::swap(a, b);
    if (a < 0 || b > n + 1) throw DataError("edge references unknown node");
    if (b < n) {
      cell_edges.emplace_back(a, b);
    } else if (a >= n) {
      throw DataError("base and terminal cannot be adjacent");
    } else if (b == n) {
      base_nb.push_back(a);
    } else {
      term_nb.push_back(a);
    }
  }
  const double spacing = SensorSpec(inst.rs_nm).cell_spacing();
  inst.graph = AoiGraph::assemble(std::move(pos), std::move(axial), cell_edges, base_point,
                                  std::move(base_nb), std::move(term_nb), spacing,
                                  std::move(hexscore));
  for (int i = 0; i < n + 2; ++i) {
    const NodeFeatures& f = inst.graph.features()[i];
    if (std::abs(f.x - field(feats[i], "x").get<double>()) > 1e-9 ||
        std::abs(f.y - field(feats[i], "y").get<double>()) > 1e-9) {
      throw DataError("schema violation: features disagree with node positions");
    }
  }
  inst.split = field(j, "split").get<std::string>();

  const ojson& audit = field(j, "audit");
  inst.audit.outcome = outcome_from_name(field(audit, "outcome").get<std::string>());
  inst.audit.witness = field(audit, "witness").get<std::vector<int>>();
  inst.audit.expansions = field(audit, "expansions").get<std::uint64_t>();

  const ojson& cfg = field(j, "config");
  inst.config.area_nm2 = band_from_json(field(cfg, "area_band"));
  inst.config.rs_nm = band_from_json(field(cfg, "rs_band"));
  inst.config.standoff_nm = band_from_json(field(cfg, "standoff_band"));
  inst.config.target_cells = band_from_json(field(cfg, "target_cell_band"));
  inst.config.obstacle_removal_rate = field(cfg, "obstacle_removal_rate").get<double>();
  inst.config.master_seed = field(cfg, "master_seed").get<std::uint64_t>();
  inst.config.audit_budget = field(cfg, "audit_budget").get<std::uint64_t>();
  return inst;
}

}  // namespace

std::string serialize_instance(const AoiInstance& inst) {
  const AoiGraph& g = inst.graph;
  const int n = g.cell_count();
  ojson j;
  j["format_version"] = kInstanceFormatVersion;
  j["id"] = inst.id;
  j["seed"] = inst.seed;
  j["family"] = std::string(to_string(inst.family));
  j["rs_nm"] = inst.rs_nm;
  ojson poly;
  poly["outer"] = ring_to_json(inst.polygon.outer);
  poly["holes"] = ojson::array();
  for (const Ring& h : inst.polygon.holes) poly["holes"].push_back(ring_to_json(h));
  j["polygon"] = std::move(poly);
  ojson nodes = ojson::array();
  for (int i = 0; i < g.node_count(); ++i) {
    ojson node;
    node["id"] = i;
    if (i < n) {
      node["q"] = g.axial(i).q;
      node["r"] = g.axial(i).r;
    } else {
      node["q"] = nullptr;
      node["r"] = nullptr;
    }
    node["x_nm"] = g.position(i).x;
    node["y_nm"] = g.position(i).y;
    nodes.push_back(std::move(node));
  }
  j["nodes"] = std::move(nodes);
  ojson edges = ojson::array();
  for (int i = 0; i < g.node_count(); ++i) {
    for (int k : g.neighbors(i)) {
      if (k > i) edges.push_back({i, k});
    }
  }
  j["edges"] = std::move(edges);
  j["base"] = g.base();
  j["terminal"] = g.terminal();
  ojson feats = ojson::array();
  for (const NodeFeatures& f : g.features()) {
    feats.push_back({{"x", f.x}, {"y", f.y}, {"w", f.w}, {"m", f.m}});
  }
  j["features"] = std::move(feats);
  j["split"] = inst.split;
  ojson audit;
  audit["outcome"] = outcome_name(inst.audit.outcome);
  audit["witness"] = inst.audit.witness;
  audit["expansions"] = inst.audit.expansions;
  j["audit"] = std::move(audit);
  ojson cfg;
  cfg["area_band"] = band_to_json(inst.config.area_nm2);
  cfg["rs_band"] = band_to_json(inst.config.rs_nm);
  cfg["standoff_band"] = band_to_json(inst.config.standoff_nm);
  cfg["target_cell_band"] = band_to_json(inst.config.target_cells);
  cfg["obstacle_removal_rate"] = inst.config.obstacle_removal_rate;
  cfg["master_seed"] = inst.config.master_seed;
  cfg["audit_budget"] = inst.config.audit_budget;
  j["config"] = std::move(cfg);
  return j.dump();
}

AoiInstance deserialize_instance(std::string_view doc) {
  ojson j;
  try {
    j = ojson::parse(doc);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed instance document: ") + e.what());
  }
  try {
    return from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("schema violation: ") + e.what());
  }
}

void write_corpus(std::ostream& out, const std::vector<AoiInstance>& corpus) {
  for (const AoiInstance& inst : corpus) out << serialize_instance(inst) << '\n';
}

std::vector<AoiInstance> parse_corpus(std::string_view text) {
  std::vector<AoiInstance> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    if (!line.empty()) out.push_back(deserialize_instance(line));
    start = end + 1;
  }
  return out;
}

std::size_t stream_corpus(std::istream& in, const std::function<void(AoiInstance&&)>& visit) {
  std::string line;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    visit(deserialize_instance(line));
    ++count;
  }
  return count;
}

std::vector<AoiInstance> read_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str());
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace hexcover
