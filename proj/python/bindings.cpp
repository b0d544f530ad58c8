#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hexcover/dataset.hpp"
#include "hexcover/errors.hpp"
#include "hexcover/evaluation.hpp"
#include "hexcover/inference.hpp"
#include "hexcover/serialization.hpp"

namespace py = pybind11;
using namespace hexcover;

namespace {

py::dict route_dict(const Route& r) {
  py::dict d;
  d["nodes"] = r.nodes;
  d["revisits"] = r.revisits;
  d["complete"] = r.complete;
  d["hamiltonian"] = r.hamiltonian;
  return d;
}

Route route_from(const AoiGraph& g, const std::vector<int>& nodes) {
  return route_from_walk(g, nodes);
}

py::dict metrics_dict(const MetricsRow& m) {
  py::dict d;
  d["hamiltonian"] = m.hamiltonian;
  d["complete"] = m.complete;
  d["revisits"] = m.revisits;
  d["distance_norm"] = m.distance_norm;
  d["distance_spacing"] = m.distance_spacing;
  d["turns"] = m.turns;
  d["steps"] = m.steps;
  return d;
}

}  // namespace

PYBIND11_MODULE(_hexcover, m) {
  m.doc() = "Hexagonal coverage path planning core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<BudgetExhausted>(m, "BudgetExhausted", PyExc_RuntimeError);
  py::register_exception<LogicError>(m, "LogicError", PyExc_RuntimeError);

  py::class_<AoiInstance>(m, "Instance")
      .def_readonly("id", &AoiInstance::id)
      .def_readonly("split", &AoiInstance::split)
      .def_readonly("seed", &AoiInstance::seed)
      .def_readonly("rs_nm", &AoiInstance::rs_nm)
      .def_property_readonly("cell_count", [](const AoiInstance& i) { return i.graph.cell_count(); })
      .def_property_readonly("base", [](const AoiInstance& i) { return i.graph.base(); })
      .def_property_readonly("terminal", [](const AoiInstance& i) { return i.graph.terminal(); })
      .def("neighbors", [](const AoiInstance& i, int v) { return i.graph.neighbors(v); })
      .def("position",
           [](const AoiInstance& i, int v) {
             const Vec2 p = i.graph.position(v);
             return std::make_pair(p.x, p.y);
           })
      .def("to_json", [](const AoiInstance& i) { return serialize_instance(i); })
      .def_static("from_json", [](const std::string& s) { return deserialize_instance(s); })
      .def("__repr__", [](const AoiInstance& i) {
        return "<Instance " + i.id + " cells=" + std::to_string(i.graph.cell_count()) + ">";
      });

  m.def(
      "generate_corpus",
      [](int count, std::uint64_t seed, bool tiny, int jobs) {
        GenerationConfig cfg = tiny ? tiny_generation_config() : GenerationConfig{};
        cfg.train_count = count;
        cfg.val_count = cfg.test_count = 0;
        cfg.master_seed = seed;
        py::gil_scoped_release release;
        return generate_corpus(cfg, jobs);
      },
      py::arg("count"), py::arg("seed") = 42, py::arg("tiny") = false, py::arg("jobs") = 1);

  m.def("read_corpus", &read_corpus_file, py::arg("path"));

  m.def(
      "audit",
      [](const AoiInstance& inst, std::uint64_t budget) {
        const AuditResult r = audit_hamiltonian(inst.graph, budget);
        if (r.outcome == AuditOutcome::BudgetExhausted) throw BudgetExhausted("audit budget exhausted");
        return r.hamiltonian();
      },
      py::arg("instance"), py::arg("budget") = 2'000'000);

  m.def("methods", [] {
    std::vector<std::string> out;
    for (Method mt : kHeuristicMethods) out.emplace_back(to_string(mt));
    out.emplace_back("exact_dfs");
    return out;
  });

  m.def(
      "solve",
      [](const AoiInstance& inst, const std::string& method) {
        return route_dict(run(method_from_string(method), inst.graph));
      },
      py::arg("instance"), py::arg("method"));

  m.def(
      "solve_policy",
      [](const AoiInstance& inst, const std::string& checkpoint, const std::string& mode, int k,
         std::uint64_t seed) {
        const Checkpoint ck = load_checkpoint(checkpoint);
        InferenceConfig cfg;
        cfg.mode = inference_mode_from_string(mode);
        cfg.k = k;
        cfg.seed = seed;
        return route_dict(solve_policy(ck.params, inst.graph, cfg));
      },
      py::arg("instance"), py::arg("checkpoint"), py::arg("mode") = "greedy", py::arg("k") = 16,
      py::arg("seed") = 0);

  m.def(
      "score",
      [](const AoiInstance& inst, const std::vector<int>& nodes) {
        const Route r = route_from(inst.graph, nodes);
        if (r.nodes != nodes) throw DataError("route has gaps between consecutive nodes");
        return metrics_dict(score_route(r, inst.graph, "", inst.id));
      },
      py::arg("instance"), py::arg("nodes"));

  m.def("turn_penalty", &turn_penalty, py::arg("theta"), py::arg("c_base") = RewardConfig{}.c_base);
}
