#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "hexcover/errors.hpp"
#include "hexcover/evaluation.hpp"

using namespace hexcover;

namespace {

MetricsRow row(std::string method, std::string id, bool ham, bool complete, double dist,
               int turns = 0, double ms = 1.0) {
  MetricsRow r;
  r.method = std::move(method);
  r.instance_id = std::move(id);
  r.hamiltonian = ham;
  r.complete = complete;
  r.revisits = complete && !ham ? 2 : 0;
  r.distance_norm = dist;
  r.distance_spacing = 10.0 * dist;
  r.turns = turns;
  r.steps = 11;
  r.wall_ms = ms;
  return r;
}

int count_of(const std::string& text, const std::string& needle) {
  int n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("a straight corridor has no turns") {
  const AoiGraph g = fixtures::corridor(4, {0, 3});
  const Route r{{g.base(), 0, 1, 2, 3, g.terminal()}, 0, true, true};
  const MetricsRow m = score_route(r, g, "m", "c4");
  CHECK(m.hamiltonian);
  CHECK(m.turns == 0);
  CHECK(m.steps == 5);
  CHECK(m.revisits == 0);
  // One spacing in, three along, four back to the base.
  CHECK(m.distance_spacing == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(m.distance_norm == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("a doubled-back corridor counts one revisit and one turn") {
  const AoiGraph g = fixtures::corridor(3, {0, 1});
  const Route r{{g.base(), 0, 1, 2, 1, g.terminal()}, 1, true, false};
  const MetricsRow m = score_route(r, g, "m", "c3");
  CHECK(m.revisits == 1);
  CHECK(m.complete);
  CHECK_FALSE(m.hamiltonian);
  CHECK(m.turns == 1);
  CHECK(m.steps == 5);
}

TEST_CASE("a 3x3 snake turns twice per row change") {
  const AoiGraph g = fixtures::block(3, 3, {-20.0, -10.0});
  const Route r = run(Method::SweepBoustrophedon, g);
  REQUIRE(r.hamiltonian);
  CHECK(count_turns(g, r.nodes) == 4);
  CHECK(score_route(r, g, "b", "x").steps == 10);
}

TEST_CASE("invalid routes are rejected") {
  const AoiGraph g = fixtures::corridor(3, {0});
  const Route gap{{g.base(), 0, 2}, 0, false, false};
  CHECK_THROWS_AS(score_route(gap, g, "m", "x"), DataError);
}

TEST_CASE("statistics helpers") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  const MeanStd m = mean_std(xs);
  CHECK(m.mean == 2.5);
  CHECK(m.std == doctest::Approx(std::sqrt(1.25)));
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(median({}) == 0.0);
}

TEST_CASE("aggregation joins on the reference's solved subset") {
  const std::vector<MetricsRow> rows{
      row("a", "i1", true, true, 1.0, 4, 1.0),   row("a", "i2", false, true, 3.0, 8, 2.0),
      row("a", "i3", false, false, 0.5, 0, 3.0), row("ref", "i1", true, true, 0.9, 2, 5.0),
      row("ref", "i2", false, false, 0.2, 0, 5.0), row("ref", "i3", true, true, 1.1, 3, 5.0)};
  const EvalReport rep = aggregate(rows, "ref");
  CHECK(rep.reference == "ref");
  REQUIRE(rep.methods.size() == 2);
  const MethodSummary& a = rep.methods[0];
  CHECK(a.method == "a");
  CHECK(a.instances == 3);
  CHECK(a.hsr == doctest::Approx(100.0 / 3.0));
  CHECK(a.ccr == doctest::Approx(200.0 / 3.0));
  // Only i1 is complete for both.
  CHECK(a.common == 1);
  CHECK(a.distance_norm.mean == 1.0);
  CHECK(a.turns.mean == 4.0);
  CHECK(a.median_ms == 2.0);
  CHECK(a.revisits.mean == doctest::Approx(2.0 / 3.0));
  const MethodSummary& r = rep.methods[1];
  CHECK(r.common == 2);
  CHECK(r.distance_norm.mean == doctest::Approx(1.0));

  const EvalReport self = aggregate(rows, "missing");
  CHECK(self.reference.empty());
  CHECK(self.methods[0].common == 2);

  const std::string text = format_report(rep);
  CHECK(text.find("Coverage") != std::string::npos);
  CHECK(text.find("Path quality") != std::string::npos);
  CHECK(text.find("Latency") != std::string::npos);
  CHECK(count_of(text, "\nref ") == 3);
}

TEST_CASE("aggregation rejects inconsistent inputs") {
  std::vector<MetricsRow> dup{row("a", "i1", true, true, 1.0), row("a", "i1", true, true, 1.0)};
  CHECK_THROWS_AS(aggregate(dup), DataError);
  std::vector<MetricsRow> uneven{row("a", "i1", true, true, 1.0), row("a", "i2", true, true, 1.0),
                                 row("b", "i1", true, true, 1.0)};
  CHECK_THROWS_AS(aggregate(uneven), DataError);
  std::vector<MetricsRow> other{row("a", "i1", true, true, 1.0), row("b", "i2", true, true, 1.0)};
  CHECK_THROWS_AS(aggregate(other), DataError);
}

TEST_CASE("metrics CSV round-trip") {
  const std::vector<MetricsRow> rows{row("a", "aoi-00001", true, true, 1.234567, 3, 0.5),
                                     row("b", "aoi-00002", false, true, 2.5, 7, 12.25)};
  const std::string csv = metrics_csv(rows);
  const auto back = parse_metrics_csv(csv);
  REQUIRE(back.size() == 2);
  CHECK(metrics_csv(back) == csv);
  CHECK(back[1].revisits == 2);
  CHECK(back[0].distance_norm == 1.234567);
  CHECK_THROWS_AS(parse_metrics_csv("method,foo\n"), DataError);
  CHECK_THROWS_AS(parse_metrics_csv(metrics_csv_header() + "\na,b,1\n"), DataError);
  CHECK_THROWS_AS(parse_metrics_csv(metrics_csv_header() + "\na,b,x,1,0,1,1,0,1,1\n"), DataError);
  CHECK_THROWS_AS(parse_metrics_csv(metrics_csv_header() + "\na,b,1,0,0,1,1,0,1,1\n"), DataError);
}

TEST_CASE("latency is a median after one warm-up") {
  const auto corpus = generate_corpus(fixtures::small_config(5, 2), 1);
  std::vector<const AoiInstance*> ptrs;
  for (const AoiInstance& inst : corpus) ptrs.push_back(&inst);
  int calls = 0;
  const double ms = measure_latency(
      [&](const AoiInstance&) {
        ++calls;
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
      },
      ptrs);
  CHECK(calls == 6);
  CHECK(ms >= 2.0);
  CHECK(ms < 200.0);
  CHECK(measure_latency([](const AoiInstance&) {}, {}) == 0.0);
}

TEST_CASE("rendered paths match the golden SVG") {
  const AoiInstance inst = fixtures::flower_instance();
  const std::vector<RenderedRoute> routes{{"sweep_boustrophedon", run(Method::SweepBoustrophedon, inst.graph)},
                                          {"dfs_backtrack", run(Method::DfsBacktrack, inst.graph)}};
  const std::string svg = render_paths(inst, routes);
  CHECK(svg.rfind("<svg xmlns=", 0) == 0);
  CHECK(count_of(svg, "<polygon ") == 1 + 7);
  CHECK(count_of(svg, "<polyline ") == 2);
  CHECK(count_of(svg, "<text ") == 2);
  const std::string path = std::string(HEXCOVER_GOLDEN_DIR) + "/flower_paths.svg";
  if (std::getenv("HEXCOVER_UPDATE_GOLDEN")) std::ofstream(path, std::ios::binary) << svg;
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream golden;
  golden << in.rdbuf();
  CHECK(svg == golden.str());
}

}  // TEST_SUITE
