#include "hexcover/evaluation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "hexcover/environment.hpp"
#include "hexcover/errors.hpp"

namespace hexcover {

namespace {

double route_length(const AoiGraph& g, std::span<const int> nodes) {
  double len = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    len += norm(g.position(nodes[i]) - g.position(nodes[i - 1]));
  }
  return len;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

int count_turns(const AoiGraph& g, std::span<const int> nodes) {
  int turns = 0;
  for (std::size_t k = 1; k + 1 < nodes.size(); ++k) {
    if (!g.is_cell(nodes[k - 1]) || !g.is_cell(nodes[k]) || !g.is_cell(nodes[k + 1])) continue;
    const Vec2 a = g.position(nodes[k]) - g.position(nodes[k - 1]);
    const Vec2 b = g.position(nodes[k + 1]) - g.position(nodes[k]);
    turns += heading_change(a, b) > 0.0;
  }
  return turns;
}

MetricsRow score_route(const Route& route, const AoiGraph& g, std::string method,
                       std::string instance_id, double wall_ms) {
  if (auto err = validate_route(route, g)) throw DataError("invalid route: " + *err);
  MetricsRow row;
  row.method = std::move(method);
  row.instance_id = std::move(instance_id);
  row.hamiltonian = route.hamiltonian;
  row.complete = route.complete;
  row.revisits = route.revisits;
  const double spacing_len = route_length(g, route.nodes) / g.cell_spacing();
  row.distance_spacing = spacing_len;
  row.distance_norm = spacing_len / g.cell_count();
  row.turns = count_turns(g, route.nodes);
  row.steps = route.nodes.empty() ? 0 : static_cast<int>(route.nodes.size()) - 1;
  row.wall_ms = wall_ms;
  return row;
}

MeanStd mean_std(std::span<const double> xs) {
  MeanStd m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(var / static_cast<double>(xs.size()));
  return m;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

EvalReport aggregate(std::span<const MetricsRow> rows, const std::string& reference) {
  std::vector<std::string> order;
  std::map<std::string, std::map<std::string, const MetricsRow*>> by_method;
  for (const MetricsRow& r : rows) {
    auto [it, fresh] = by_method.try_emplace(r.method);
    if (fresh) order.push_back(r.method);
    if (!it->second.emplace(r.instance_id, &r).second) {
      throw DataError("duplicate row for " + r.method + " on " + r.instance_id);
    }
  }
  for (const std::string& m : order) {
    const auto& a = by_method[m];
    const auto& b = by_method[order.front()];
    bool same = a.size() == b.size();
    for (auto ia = a.begin(), ib = b.begin(); same && ia != a.end(); ++ia, ++ib) {
      same = ia->first == ib->first;
    }
    if (!same) throw DataError("method " + m + " covers a different instance set");
  }

  EvalReport report;
  const bool has_ref = by_method.count(reference) > 0;
  if (has_ref) report.reference = reference;
  for (const std::string& m : order) {
    const auto& rows_m = by_method[m];
    const auto& rows_ref = has_ref ? by_method[reference] : rows_m;
    MethodSummary s;
    s.method = m;
    s.instances = static_cast<int>(rows_m.size());
    std::vector<double> rev, dn, ds, tu, st, rc, ms;
    int ham = 0, comp = 0;
    for (const auto& [id, r] : rows_m) {
      ham += r->hamiltonian;
      comp += r->complete;
      rev.push_back(r->revisits);
      ms.push_back(r->wall_ms);
      if (r->complete && rows_ref.at(id)->complete) {
        dn.push_back(r->distance_norm);
        ds.push_back(r->distance_spacing);
        tu.push_back(r->turns);
        st.push_back(r->steps);
        rc.push_back(r->revisits);
      }
    }
    if (s.instances > 0) {
      s.hsr = 100.0 * ham / s.instances;
      s.ccr = 100.0 * comp / s.instances;
    }
    s.revisits = mean_std(rev);
    s.common = static_cast<int>(dn.size());
    s.distance_norm = mean_std(dn);
    s.distance_spacing = mean_std(ds);
    s.turns = mean_std(tu);
    s.steps = mean_std(st).mean;
    s.revisits_common = mean_std(rc).mean;
    s.median_ms = median(ms);
    report.methods.push_back(std::move(s));
  }
  return report;
}

double measure_latency(const std::function<void(const AoiInstance&)>& solve,
                       std::span<const AoiInstance* const> instances) {
  if (instances.empty()) return 0.0;
  solve(*instances.front());
  std::vector<double> ms;
  ms.reserve(instances.size());
  for (const AoiInstance* inst : instances) {
    const auto t0 = std::chrono::steady_clock::now();
    solve(*inst);
    ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  return median(std::move(ms));
}

std::string metrics_csv_header() {
  return "method,instance_id,hamiltonian,complete,revisits,distance_norm,distance_spacing,turns,"
         "steps,wall_ms";
}

std::string metrics_csv_line(const MetricsRow& r) {
  return fmt::format("{},{},{},{},{},{:.6f},{:.6f},{},{},{:.3f}", r.method, r.instance_id,
                     r.hamiltonian ? 1 : 0, r.complete ? 1 : 0, r.revisits, r.distance_norm,
                     r.distance_spacing, r.turns, r.steps, r.wall_ms);
}

std::string metrics_csv(std::span<const MetricsRow> rows) {
  std::string out = metrics_csv_header() + "\n";
  for (const MetricsRow& r : rows) out += metrics_csv_line(r) + "\n";
  return out;
}

std::vector<MetricsRow> parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != metrics_csv_header()) {
    throw DataError("metrics CSV header mismatch");
  }
  std::vector<MetricsRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 10) throw DataError(fmt::format("metrics CSV line {}: expected 10 fields", line_no));
    try {
      MetricsRow r;
      r.method = f[0];
      r.instance_id = f[1];
      r.hamiltonian = std::stoi(f[2]) != 0;
      r.complete = std::stoi(f[3]) != 0;
      r.revisits = std::stoi(f[4]);
      r.distance_norm = std::stod(f[5]);
      r.distance_spacing = std::stod(f[6]);
      r.turns = std::stoi(f[7]);
      r.steps = std::stoi(f[8]);
      r.wall_ms = std::stod(f[9]);
      if (r.hamiltonian && !r.complete) throw DataError("hamiltonian row not complete");
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw DataError(fmt::format("metrics CSV line {}: bad number", line_no));
    }
  }
  return rows;
}

std::string format_report(const EvalReport& report) {
  std::string out;
  out += "Coverage (all instances)\n";
  out += fmt::format("{:<28} {:>5} {:>8} {:>8} {:>16}\n", "Method", "n", "HSR(%)", "CCR(%)",
                     "Revisits mu+-sd");
  for (const MethodSummary& s : report.methods) {
    out += fmt::format("{:<28} {:>5} {:>8.1f} {:>8.1f} {:>8.1f} +- {:<5.1f}\n", s.method,
                       s.instances, s.hsr, s.ccr, s.revisits.mean, s.revisits.std);
  }
  out += "\nPath quality (common solved subset with ";
  out += report.reference.empty() ? std::string("each method itself") : report.reference;
  out += ")\n";
  out += fmt::format("{:<28} {:>5} {:>17} {:>17} {:>15} {:>7} {:>7}\n", "Method", "n",
                     "Dist/(s*|V|)", "Dist/s", "Turns", "Steps", "Rev");
  for (const MethodSummary& s : report.methods) {
    out += fmt::format("{:<28} {:>5} {:>8.3f} +- {:<5.3f} {:>8.1f} +- {:<5.1f} {:>6.1f} +- {:<5.1f} {:>7.1f} {:>7.1f}\n",
                       s.method, s.common, s.distance_norm.mean, s.distance_norm.std,
                       s.distance_spacing.mean, s.distance_spacing.std, s.turns.mean,
                       s.turns.std, s.steps, s.revisits_common);
  }
  out += "\nLatency (median wall ms per instance, this machine)\n";
  out += fmt::format("{:<28} {:>10}\n", "Method", "ms");
  for (const MethodSummary& s : report.methods) {
    out += fmt::format("{:<28} {:>10.3f}\n", s.method, s.median_ms);
  }
  return out;
}

std::string render_paths(const AoiInstance& inst, std::span<const RenderedRoute> routes) {
  const AoiGraph& g = inst.graph;
  const double circumradius = g.cell_spacing() / std::sqrt(3.0);
  // Neighbour directions sit at multiples of 60 degrees from the frame angle.
  double frame = 0.0;
  for (int v = 0; v < g.cell_count() && frame == 0.0; ++v) {
    for (int u : g.neighbors(v)) {
      if (!g.is_cell(u)) continue;
      const Vec2 d = g.position(u) - g.position(v);
      frame = std::fmod(std::atan2(d.y, d.x) + 2.0 * std::numbers::pi, std::numbers::pi / 3.0);
      break;
    }
  }
  std::vector<Ring> hexes;
  double minx = 1e300, miny = 1e300, maxx = -1e300, maxy = -1e300;
  auto grow = [&](Vec2 p) {
    minx = std::min(minx, p.x);
    miny = std::min(miny, p.y);
    maxx = std::max(maxx, p.x);
    maxy = std::max(maxy, p.y);
  };
  for (int v = 0; v < g.cell_count(); ++v) {
    hexes.push_back(hexagon_ring(g.position(v), circumradius, frame));
    for (Vec2 p : hexes.back()) grow(p);
  }
  for (Vec2 p : inst.polygon.outer) grow(p);
  const double margin = g.cell_spacing();
  minx -= margin;
  miny -= margin;
  maxx += margin;
  maxy += margin;
  const double width = 800.0;
  const double scale = width / (maxx - minx);
  const double height = (maxy - miny) * scale;
  auto px = [&](Vec2 p) { return Vec2{(p.x - minx) * scale, (maxy - p.y) * scale}; };
  // The base lies far outside the AOI; it is drawn where the ray from the
  // view centre towards it leaves the view.
  const Vec2 center{(minx + maxx) / 2.0, (miny + maxy) / 2.0};
  const Vec2 dir = g.position(g.base()) - center;
  const double tx = dir.x != 0.0 ? ((dir.x > 0 ? maxx : minx) - center.x) / dir.x : 1e300;
  const double ty = dir.y != 0.0 ? ((dir.y > 0 ? maxy : miny) - center.y) / dir.y : 1e300;
  const double t = std::min({tx, ty, 1.0});
  const Vec2 base_px = px(center + t * dir);
  auto node_px = [&](int v) { return g.is_cell(v) ? px(g.position(v)) : base_px; };
  auto points = [&](const Ring& ring) {
    std::string s;
    for (Vec2 p : ring) {
      const Vec2 q = px(p);
      s += fmt::format("{}{:.2f},{:.2f}", s.empty() ? "" : " ", q.x, q.y);
    }
    return s;
  };

  static constexpr const char* kColors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd",
                                            "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.2f} {:.2f}\">\n",
      width, std::ceil(height), width, height);
  svg += fmt::format("<title>{}</title>\n", inst.id);
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  svg += fmt::format("<polygon points=\"{}\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n",
                     points(inst.polygon.outer));
  for (const Ring& hole : inst.polygon.holes) {
    svg += fmt::format("<polygon points=\"{}\" fill=\"#9e9e9e\" stroke=\"#616161\"/>\n", points(hole));
  }
  for (const Ring& h : hexes) {
    svg += fmt::format("<polygon points=\"{}\" fill=\"#e8f1fb\" stroke=\"#90a4ae\" stroke-width=\"0.8\"/>\n",
                       points(h));
  }
  svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"10\" height=\"10\" fill=\"#000000\"/>\n",
                     base_px.x - 5.0, base_px.y - 5.0);
  for (std::size_t k = 0; k < routes.size(); ++k) {
    const Route& r = routes[k].route;
    const char* color = kColors[k % std::size(kColors)];
    if (!r.nodes.empty()) {
      std::string pts;
      for (int v : r.nodes) {
        const Vec2 q = node_px(v);
        pts += fmt::format("{}{:.2f},{:.2f}", pts.empty() ? "" : " ", q.x, q.y);
      }
      svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\" "
                         "stroke-linejoin=\"round\"/>\n",
                         pts, color);
    }
    svg += fmt::format("<text x=\"8\" y=\"{:.0f}\" font-family=\"sans-serif\" font-size=\"13\" "
                       "fill=\"{}\">{}</text>\n",
                       18.0 + 16.0 * k, color, routes[k].label);
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace hexcover
