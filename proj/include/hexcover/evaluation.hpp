#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hexcover/heuristics.hpp"
#include "hexcover/instance.hpp"

namespace hexcover {

struct MetricsRow {
  std::string method;
  std::string instance_id;
  bool hamiltonian = false;
  bool complete = false;
  int revisits = 0;
  double distance_norm = 0.0;     // length / cell spacing / |V|
  double distance_spacing = 0.0;  // length / cell spacing
  int turns = 0;                  // interior junctions with a non-zero heading change
  int steps = 0;                  // transitions, base and terminal included
  double wall_ms = 0.0;
};

// Validates the route and computes its metrics. Throws DataError for an
// invalid route.
MetricsRow score_route(const Route& route, const AoiGraph& g, std::string method,
                       std::string instance_id, double wall_ms = 0.0);

// Heading changes greater than zero at interior junctions.
int count_turns(const AoiGraph& g, std::span<const int> nodes);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
};

MeanStd mean_std(std::span<const double> xs);

struct MethodSummary {
  std::string method;
  int instances = 0;
  double hsr = 0.0;  // percent
  double ccr = 0.0;  // percent
  MeanStd revisits;
  int common = 0;    // size of the common solved subset with the reference
  MeanStd distance_norm;
  MeanStd distance_spacing;
  MeanStd turns;
  double steps = 0.0;
  double revisits_common = 0.0;
  double median_ms = 0.0;
};

struct EvalReport {
  std::string reference;  // empty when every method was joined with itself
  std::vector<MethodSummary> methods;
};

// HSR and CCR over every instance; distance, turns and steps over the
// instances completed by both the method and the reference. Methods appear
// in first-seen order. Throws DataError when methods cover different
// instance sets or a (method, instance) pair repeats.
EvalReport aggregate(std::span<const MetricsRow> rows,
                     const std::string& reference = "rl_bok_2opt");

double median(std::vector<double> xs);

// Median per-instance wall time of `solve`, batch size one, after one
// warm-up call on the first instance.
double measure_latency(const std::function<void(const AoiInstance&)>& solve,
                       std::span<const AoiInstance* const> instances);

std::string metrics_csv_header();
std::string metrics_csv_line(const MetricsRow& row);
std::string metrics_csv(std::span<const MetricsRow> rows);
std::vector<MetricsRow> parse_metrics_csv(const std::string& text);

// Fixed-width text tables in the layout of the coverage, path-quality and
// latency tables.
std::string format_report(const EvalReport& report);

struct RenderedRoute {
  std::string label;
  Route route;
};

std::string render_paths(const AoiInstance& inst, std::span<const RenderedRoute> routes);

}  // namespace hexcover
