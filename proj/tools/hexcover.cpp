// Command-line entry point: generate, audit, solve, train, evaluate, render.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "hexcover/dataset.hpp"
#include "hexcover/errors.hpp"
#include "hexcover/evaluation.hpp"
#include "hexcover/heuristics.hpp"
#include "hexcover/inference.hpp"
#include "hexcover/parallel.hpp"
#include "hexcover/serialization.hpp"
#include "hexcover/training.hpp"

using namespace hexcover;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

enum ExitCode { kOk = 0, kConfig = 2, kData = 3, kInternal = 4 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << content;
  if (!out) throw DataError("failed writing " + path);
}

json file_entry(const std::string& path) {
  const std::string bytes = read_file(path);
  return {{"path", path}, {"bytes", bytes.size()}, {"fnv1a64", hex64(fnv1a64(bytes))}};
}

struct Run {
  std::string command;
  std::vector<std::string> argv;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  json config = json::object();
  json seeds = json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  void write(const std::string& path) const {
    json m;
    m["command"] = command;
    m["tool_version"] = kVersion;
    m["argv"] = argv;
    m["config"] = config;
    m["seeds"] = seeds;
    m["inputs"] = json::array();
    for (const auto& p : inputs) m["inputs"].push_back(file_entry(p));
    m["outputs"] = json::array();
    for (const auto& p : outputs) m["outputs"].push_back(file_entry(p));
    m["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file(path, m.dump(2) + "\n");
  }
};

json generation_json(const GenerationConfig& c) {
  return {{"area_nm2", {c.area_nm2.min, c.area_nm2.max}},
          {"rs_nm", {c.rs_nm.min, c.rs_nm.max}},
          {"standoff_nm", {c.standoff_nm.min, c.standoff_nm.max}},
          {"target_cells", {c.target_cells.min, c.target_cells.max}},
          {"obstacle_removal_rate", c.obstacle_removal_rate},
          {"count", c.total_count()},
          {"master_seed", c.master_seed},
          {"audit_budget", c.audit_budget},
          {"rejection_budget", c.rejection_budget}};
}

json train_json(const TrainConfig& c) {
  return {{"group_size", c.group_size},     {"inner_epochs", c.inner_epochs},
          {"clip_eps", c.clip_eps},         {"entropy_coef", c.entropy_coef},
          {"lr", c.lr},                     {"batch_instances", c.batch_instances},
          {"minibatch", c.minibatch},       {"grad_clip", c.grad_clip},
          {"max_epochs", c.max_epochs},     {"patience", c.patience},
          {"aug_prob", c.aug_prob},         {"temp_init", c.temp_init},
          {"temp_final", c.temp_final},     {"temp_epochs", c.temp_epochs},
          {"adv_eps", c.adv_eps},           {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},     {"seed", c.seed},
          {"dims", {{"d", c.dims.d}, {"layers", c.dims.layers}, {"heads", c.dims.heads},
                    {"glimpses", c.dims.glimpses}, {"ff_hidden", c.dims.ff_hidden},
                    {"hops", c.dims.hops}, {"clip", c.dims.clip}}}};
}

std::string route_document(const Route& r, const std::string& method, const std::string& id,
                           double wall_ms, const std::optional<InferenceConfig>& rl) {
  json j;
  j["method"] = method;
  j["instance_id"] = id;
  j["nodes"] = r.nodes;
  j["revisits"] = r.revisits;
  j["complete"] = r.complete;
  j["hamiltonian"] = r.hamiltonian;
  j["wall_ms"] = wall_ms;
  if (rl) {
    j["mode"] = to_string(rl->mode);
    j["seed"] = rl->seed;
  }
  return j.dump();
}

std::vector<const AoiInstance*> pick_split(const std::vector<AoiInstance>& corpus,
                                           const std::string& split) {
  if (split == "all") return select_split(corpus, "");
  if (split != "train" && split != "val" && split != "test") {
    throw ConfigError("split must be train, val, test or all");
  }
  return select_split(corpus, split);
}

// ---------------------------------------------------------------- generate
struct GenerateArgs {
  GenerationConfig cfg;
  int count = 200;
  bool tiny = false;
  std::string out = "corpus.jsonl";
  std::string manifest;
  int jobs = default_jobs();
  std::vector<double> area_band, rs_band, standoff_band;
};

void add_generate(CLI::App& app, GenerateArgs& a) {
  auto* c = app.add_subcommand("generate", "Generate an audited instance corpus");
  c->add_option("--count", a.count, "Total instances (split 8:1:1)")->check(CLI::NonNegativeNumber);
  c->add_option("--seed", a.cfg.master_seed, "Master seed");
  c->add_flag("--tiny", a.tiny, "Use the 10-14 cell curriculum bands");
  c->add_option("--area-band", a.area_band, "Area range in nm^2 (MIN MAX)")->expected(2);
  c->add_option("--rs-band", a.rs_band, "Sensor radius range in nm (MIN MAX)")->expected(2);
  c->add_option("--standoff-band", a.standoff_band, "Base standoff range in nm (MIN MAX)")->expected(2);
  c->add_option("--area-min", a.cfg.area_nm2.min);
  c->add_option("--area-max", a.cfg.area_nm2.max);
  c->add_option("--rs-min", a.cfg.rs_nm.min);
  c->add_option("--rs-max", a.cfg.rs_nm.max);
  c->add_option("--standoff-min", a.cfg.standoff_nm.min);
  c->add_option("--standoff-max", a.cfg.standoff_nm.max);
  c->add_option("--cells-min", a.cfg.target_cells.min);
  c->add_option("--cells-max", a.cfg.target_cells.max);
  c->add_option("--obstacle-rate", a.cfg.obstacle_removal_rate);
  c->add_option("--audit-budget", a.cfg.audit_budget);
  c->add_option("--rejection-budget", a.cfg.rejection_budget);
  c->add_option("--out", a.out, "Corpus file (JSONL)");
  c->add_option("--manifest", a.manifest);
  c->add_option("--jobs", a.jobs)->check(CLI::PositiveNumber);
}

int run_generate(GenerateArgs& a, CLI::App& sub, Run& run) {
  GenerationConfig cfg = a.cfg;
  if (a.tiny) {
    // Tiny bands apply unless a band flag was given explicitly.
    const GenerationConfig t = tiny_generation_config();
    auto keep = [&](const char* flag, double& dst, double src) {
      if (sub.count(flag) == 0) dst = src;
    };
    keep("--area-min", cfg.area_nm2.min, t.area_nm2.min);
    keep("--area-max", cfg.area_nm2.max, t.area_nm2.max);
    keep("--rs-min", cfg.rs_nm.min, t.rs_nm.min);
    keep("--rs-max", cfg.rs_nm.max, t.rs_nm.max);
    keep("--cells-min", cfg.target_cells.min, t.target_cells.min);
    keep("--cells-max", cfg.target_cells.max, t.target_cells.max);
    keep("--obstacle-rate", cfg.obstacle_removal_rate, t.obstacle_removal_rate);
  }
  auto band = [](const std::vector<double>& v, auto& range) {
    if (v.size() == 2) {
      range.min = v[0];
      range.max = v[1];
    }
  };
  band(a.area_band, cfg.area_nm2);
  band(a.rs_band, cfg.rs_nm);
  band(a.standoff_band, cfg.standoff_nm);
  cfg.train_count = a.count;
  cfg.val_count = 0;
  cfg.test_count = 0;
  cfg.validate();
  run.config = generation_json(cfg);
  run.seeds["master_seed"] = cfg.master_seed;
  const auto corpus = generate_corpus(cfg, a.jobs);
  std::ostringstream out;
  write_corpus(out, corpus);
  write_file(a.out, out.str());
  run.outputs.push_back(a.out);
  run.write(a.manifest.empty() ? a.out + ".manifest.json" : a.manifest);
  const SplitSizes s = split_sizes(corpus.size());
  std::cout << fmt::format("generated {} instances ({} train, {} val, {} test) -> {}\n",
                           corpus.size(), s.train, s.val, s.test, a.out);
  return kOk;
}

// ------------------------------------------------------------------ audit
struct AuditArgs {
  std::string corpus;
  std::uint64_t budget = 2'000'000;
  std::string out;
};

void add_audit(CLI::App& app, AuditArgs& a) {
  auto* c = app.add_subcommand("audit", "Re-run the Hamiltonian audit on a corpus");
  c->add_option("--corpus", a.corpus)->required();
  c->add_option("--budget", a.budget, "DFS expansion budget per instance");
  c->add_option("--out", a.out, "Optional JSON report");
}

int run_audit(const AuditArgs& a, Run& run) {
  const auto corpus = read_corpus_file(a.corpus);
  run.inputs.push_back(a.corpus);
  int passed = 0;
  json failures = json::array();
  for (const AoiInstance& inst : corpus) {
    const AuditResult r = audit_hamiltonian(inst.graph, a.budget);
    Route witness;
    witness.nodes.push_back(inst.graph.base());
    witness.nodes.insert(witness.nodes.end(), r.witness.begin(), r.witness.end());
    witness.nodes.push_back(inst.graph.terminal());
    witness.complete = witness.hamiltonian = true;
    const bool ok = r.hamiltonian() && !validate_route(witness, inst.graph);
    passed += ok;
    if (!ok) failures.push_back(inst.id);
  }
  const json report = {{"corpus", a.corpus},
                       {"instances", corpus.size()},
                       {"passed", passed},
                       {"failed", failures}};
  if (!a.out.empty()) {
    write_file(a.out, report.dump(2) + "\n");
    run.outputs.push_back(a.out);
    run.write(a.out + ".manifest.json");
  }
  std::cout << fmt::format("audit: {}/{} instances Hamiltonian\n", passed, corpus.size());
  return failures.empty() ? kOk : kData;
}

// ------------------------------------------------------------------ solve
struct SolveArgs {
  std::string corpus;
  std::vector<std::string> methods;
  std::vector<std::string> modes;
  std::string checkpoint;
  InferenceConfig inference;
  std::string split = "all";
  std::string out = "metrics.csv";
  std::string routes;
  std::string manifest;
  bool timing = false;
  int jobs = default_jobs();
};

void add_solve(CLI::App& app, SolveArgs& a) {
  auto* c = app.add_subcommand("solve", "Run heuristics or the policy on a corpus");
  c->add_option("--corpus", a.corpus)->required();
  c->add_option("--method", a.methods, "Heuristic name, exact_dfs, or 'heuristics'");
  c->add_option("--mode", a.modes, "Policy decoding mode: greedy, bok, bok_2opt");
  c->add_option("--checkpoint", a.checkpoint, "Policy checkpoint for --mode");
  c->add_option("--k", a.inference.k, "Best-of-K samples")->check(CLI::PositiveNumber);
  c->add_option("--temperature", a.inference.temperature);
  c->add_option("--two-opt-passes", a.inference.two_opt_max_passes);
  c->add_option("--seed", a.inference.seed, "Sampling seed for bok modes");
  c->add_option("--split", a.split, "train, val, test or all");
  c->add_option("--out", a.out, "Metrics CSV");
  c->add_option("--routes", a.routes, "Optional route documents (JSONL)");
  c->add_option("--manifest", a.manifest);
  c->add_flag("--timing", a.timing, "Record per-instance wall time (non-deterministic)");
  c->add_option("--jobs", a.jobs)->check(CLI::PositiveNumber);
}

int run_solve(SolveArgs& a, Run& run) {
  if (a.methods.empty() && a.modes.empty()) throw ConfigError("give --method or --mode");
  std::vector<Method> methods;
  for (const std::string& m : a.methods) {
    if (m == "heuristics") {
      methods.insert(methods.end(), kHeuristicMethods.begin(), kHeuristicMethods.end());
    } else {
      methods.push_back(method_from_string(m));
    }
  }
  std::vector<InferenceMode> modes;
  for (const std::string& m : a.modes) modes.push_back(inference_mode_from_string(m));
  std::optional<PolicyParams> params;
  if (!modes.empty()) {
    if (a.checkpoint.empty() || a.checkpoint == "none") {
      throw ConfigError("policy modes need --checkpoint");
    }
    params = load_checkpoint(a.checkpoint).params;
    run.inputs.push_back(a.checkpoint);
  }
  a.inference.validate();
  const auto corpus = read_corpus_file(a.corpus);
  run.inputs.push_back(a.corpus);
  const auto set = pick_split(corpus, a.split);
  run.config = {{"split", a.split}, {"k", a.inference.k}, {"temperature", a.inference.temperature},
                {"two_opt_max_passes", a.inference.two_opt_max_passes}, {"timing", a.timing}};
  run.seeds["inference_seed"] = a.inference.seed;

  std::vector<MetricsRow> rows;
  std::vector<std::string> docs;
  auto solve_all = [&](const std::string& label, const std::function<Route(const AoiInstance&)>& f,
                       const std::optional<InferenceConfig>& rl) {
    std::vector<MetricsRow> part(set.size());
    std::vector<std::string> part_docs(set.size());
    parallel_for(set.size(), a.jobs, [&](std::size_t i) {
      const auto t0 = std::chrono::steady_clock::now();
      const Route r = f(*set[i]);
      const double ms =
          a.timing ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count()
                   : 0.0;
      part[i] = score_route(r, set[i]->graph, label, set[i]->id, ms);
      part_docs[i] = route_document(r, label, set[i]->id, ms, rl);
    });
    rows.insert(rows.end(), part.begin(), part.end());
    docs.insert(docs.end(), part_docs.begin(), part_docs.end());
  };
  for (Method m : methods) {
    solve_all(std::string(to_string(m)),
              [m](const AoiInstance& inst) {
                return m == Method::ExactDfs ? exact_dfs(inst.graph) : hexcover::run(m, inst.graph);
              },
              std::nullopt);
  }
  for (InferenceMode mode : modes) {
    InferenceConfig ic = a.inference;
    ic.mode = mode;
    solve_all("rl_" + std::string(to_string(mode)),
              [&, ic](const AoiInstance& inst) { return solve_policy(*params, inst.graph, ic); }, ic);
  }
  write_file(a.out, metrics_csv(rows));
  run.outputs.push_back(a.out);
  if (!a.routes.empty()) {
    std::string text;
    for (const auto& d : docs) text += d + "\n";
    write_file(a.routes, text);
    run.outputs.push_back(a.routes);
  }
  run.write(a.manifest.empty() ? a.out + ".manifest.json" : a.manifest);
  std::cout << format_report(aggregate(rows));
  return kOk;
}

// ------------------------------------------------------------------ train
struct TrainArgs {
  std::string corpus;
  std::string out_dir = "run";
  std::string resume;
  TrainConfig cfg;
};

void add_train(CLI::App& app, TrainArgs& a) {
  auto* c = app.add_subcommand("train", "Train the pointer policy with GRPO");
  c->set_config("--config", "", "TOML file with option defaults (flags take precedence)");
  c->add_option("--corpus", a.corpus)->required();
  c->add_option("--out-dir", a.out_dir);
  c->add_option("--resume", a.resume, "Continue from a checkpoint written by this command");
  TrainConfig& t = a.cfg;
  c->add_option("--epochs", t.max_epochs, "Maximum epochs")->check(CLI::NonNegativeNumber);
  c->add_option("--seed", t.seed);
  c->add_option("--group-size", t.group_size);
  c->add_option("--inner-epochs", t.inner_epochs);
  c->add_option("--clip-eps", t.clip_eps);
  c->add_option("--entropy", t.entropy_coef);
  c->add_option("--lr", t.lr);
  c->add_option("--batch", t.batch_instances);
  c->add_option("--minibatch", t.minibatch);
  c->add_option("--grad-clip", t.grad_clip);
  c->add_option("--patience", t.patience);
  c->add_option("--aug-prob", t.aug_prob);
  c->add_option("--temp-init", t.temp_init);
  c->add_option("--temp-final", t.temp_final);
  c->add_option("--temp-epochs", t.temp_epochs);
  c->add_option("--d", t.dims.d);
  c->add_option("--layers", t.dims.layers);
  c->add_option("--heads", t.dims.heads);
  c->add_option("--glimpses", t.dims.glimpses);
  c->add_option("--ff-hidden", t.dims.ff_hidden);
  c->add_option("--hops", t.dims.hops);
  c->add_option("--logit-clip", t.dims.clip);
  c->add_option("--jobs", t.jobs)->check(CLI::PositiveNumber);
}

int run_train(TrainArgs& a, Run& run) {
  a.cfg.validate();
  const auto corpus = read_corpus_file(a.corpus);
  run.inputs.push_back(a.corpus);
  const auto train_set = select_split(corpus, "train");
  const auto val_set = select_split(corpus, "val");
  if (train_set.empty()) throw DataError("corpus has no training split");
  fs::create_directories(a.out_dir);
  const std::string last = (fs::path(a.out_dir) / "last.ckpt").string();
  const std::string best = (fs::path(a.out_dir) / "best.ckpt").string();
  const std::string log = (fs::path(a.out_dir) / "train_log.jsonl").string();

  TrainState state = TrainState::fresh(a.cfg);
  std::string log_text;
  if (!a.resume.empty()) {
    const Checkpoint ck = load_checkpoint(a.resume);
    if (ck.params.size() != state.params.size()) throw ConfigError("checkpoint dimensions differ");
    run.inputs.push_back(a.resume);
    state = TrainState::from_checkpoint(ck);
    const fs::path best_path = fs::path(a.resume).parent_path() / "best.ckpt";
    if (fs::exists(best_path)) state.best_params = load_checkpoint(best_path.string()).params;
    if (fs::exists(log)) log_text = read_file(log);
  }
  run.config = train_json(a.cfg);
  run.seeds["train_seed"] = a.cfg.seed;

  auto save = [&](const TrainState& s) {
    save_checkpoint(last, s.checkpoint(a.cfg.seed));
    Checkpoint b;
    b.params = s.best_params;
    b.seed = a.cfg.seed;
    b.epoch = s.best_epoch + 1;
    b.best_val_sr = s.best_val_sr;
    b.best_epoch = s.best_epoch;
    save_checkpoint(best, b);
    write_file(log, log_text);
  };
  TrainHooks hooks;
  hooks.on_epoch = [&](const EpochStats& st, const TrainState& s) {
    log_text += epoch_log_line(st) + "\n";
    save(s);
    std::cout << fmt::format("epoch {:3d} train_sr {:.3f} val_sr {:.3f} return {:8.2f} entropy {:.3f}\n",
                             st.epoch, st.train_sr, st.val_sr, st.mean_return, st.entropy)
              << std::flush;
  };
  save(state);
  state = train(std::move(state), train_set, val_set, a.cfg, hooks);
  run.outputs = {last, best, log};
  run.write((fs::path(a.out_dir) / "manifest.json").string());
  std::cout << fmt::format("best val_sr {:.3f} at epoch {}\n", state.best_val_sr, state.best_epoch);
  return kOk;
}

// --------------------------------------------------------------- evaluate
struct EvaluateArgs {
  std::vector<std::string> metrics;
  std::string reference = "rl_bok_2opt";
  std::string out;
};

void add_evaluate(CLI::App& app, EvaluateArgs& a) {
  auto* c = app.add_subcommand("evaluate", "Aggregate metrics CSVs into report tables");
  c->add_option("--metrics", a.metrics, "Metrics CSV files from solve")->required();
  c->add_option("--reference", a.reference, "Reference method for the common subset");
  c->add_option("--out", a.out, "Report text file");
}

int run_evaluate(const EvaluateArgs& a, Run& run) {
  std::vector<MetricsRow> rows;
  for (const std::string& path : a.metrics) {
    auto part = parse_metrics_csv(read_file(path));
    rows.insert(rows.end(), part.begin(), part.end());
    run.inputs.push_back(path);
  }
  const std::string text = format_report(aggregate(rows, a.reference));
  run.config = {{"reference", a.reference}};
  if (!a.out.empty()) {
    write_file(a.out, text);
    run.outputs.push_back(a.out);
    run.write(a.out + ".manifest.json");
  }
  std::cout << text;
  return kOk;
}

// ----------------------------------------------------------------- render
struct RenderArgs {
  std::string corpus;
  std::string instance;
  std::vector<std::string> methods;
  std::vector<std::string> modes;
  std::string checkpoint;
  InferenceConfig inference;
  std::string out = "paths.svg";
};

void add_render(CLI::App& app, RenderArgs& a) {
  auto* c = app.add_subcommand("render", "Draw routes over one instance as SVG");
  c->add_option("--corpus", a.corpus)->required();
  c->add_option("--instance", a.instance, "Instance id (default: first)");
  c->add_option("--method", a.methods);
  c->add_option("--mode", a.modes);
  c->add_option("--checkpoint", a.checkpoint);
  c->add_option("--seed", a.inference.seed);
  c->add_option("--k", a.inference.k);
  c->add_option("--out", a.out);
}

int run_render(RenderArgs& a, Run& run) {
  const auto corpus = read_corpus_file(a.corpus);
  run.inputs.push_back(a.corpus);
  const AoiInstance* inst = nullptr;
  for (const AoiInstance& c : corpus) {
    if (a.instance.empty() || c.id == a.instance) {
      inst = &c;
      break;
    }
  }
  if (inst == nullptr) throw DataError("instance not found: " + a.instance);
  std::vector<RenderedRoute> routes;
  for (const std::string& m : a.methods) {
    const Method method = method_from_string(m);
    routes.push_back({m, method == Method::ExactDfs ? exact_dfs(inst->graph) : hexcover::run(method, inst->graph)});
  }
  if (!a.modes.empty()) {
    if (a.checkpoint.empty()) throw ConfigError("policy modes need --checkpoint");
    const PolicyParams params = load_checkpoint(a.checkpoint).params;
    run.inputs.push_back(a.checkpoint);
    for (const std::string& m : a.modes) {
      InferenceConfig ic = a.inference;
      ic.mode = inference_mode_from_string(m);
      routes.push_back({"rl_" + m, solve_policy(params, inst->graph, ic)});
    }
  }
  write_file(a.out, render_paths(*inst, routes));
  run.outputs.push_back(a.out);
  run.write(a.out + ".manifest.json");
  std::cout << "wrote " << a.out << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hexagonal coverage path planning: instances, baselines, pointer policy"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  GenerateArgs gen;
  AuditArgs aud;
  SolveArgs sol;
  TrainArgs trn;
  EvaluateArgs eva;
  RenderArgs ren;
  add_generate(app, gen);
  add_audit(app, aud);
  add_solve(app, sol);
  add_train(app, trn);
  add_evaluate(app, eva);
  add_render(app, ren);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  Run run;
  run.argv.assign(argv, argv + argc);
  try {
    CLI::App* sub = app.get_subcommands().front();
    run.command = sub->get_name();
    if (run.command == "generate") return run_generate(gen, *sub, run);
    if (run.command == "audit") return run_audit(aud, run);
    if (run.command == "solve") return run_solve(sol, run);
    if (run.command == "train") return run_train(trn, run);
    if (run.command == "evaluate") return run_evaluate(eva, run);
    if (run.command == "render") return run_render(ren, run);
    return kInternal;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const BudgetExhausted& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
