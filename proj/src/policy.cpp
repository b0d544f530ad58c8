#include "hexcover/policy.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "hexcover/errors.hpp"

namespace hexcover {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string layer_name(const char* prefix, int i) { return prefix + std::to_string(i); }

std::vector<ParamSlot> layout(const PolicyDims& dims) {
  std::vector<ParamSlot> slots;
  std::size_t offset = 0;
  auto add = [&](std::string name, int rows, int cols) {
    slots.push_back({std::move(name), offset, rows, cols});
    offset += static_cast<std::size_t>(rows) * cols;
  };
  const int d = dims.d;
  const int dk = dims.head_dim();
  add("embed.W", 4, d);
  add("embed.b", 1, d);
  for (int l = 0; l < dims.layers; ++l) {
    const std::string e = layer_name("enc", l);
    add(e + ".ln1.g", 1, d);
    add(e + ".ln1.b", 1, d);
    for (int h = 0; h < dims.heads; ++h) {
      const std::string head = e + layer_name(".h", h);
      add(head + ".Wq", d, dk);
      add(head + ".Wk", d, dk);
      add(head + ".Wv", d, dk);
    }
    add(e + ".Wo", d, d);
    add(e + ".ln2.g", 1, d);
    add(e + ".ln2.b", 1, d);
    add(e + ".ff.W1", d, dims.ff_hidden);
    add(e + ".ff.b1", 1, dims.ff_hidden);
    add(e + ".ff.W2", dims.ff_hidden, d);
    add(e + ".ff.b2", 1, d);
  }
  add("enc.ln.g", 1, d);
  add("enc.ln.b", 1, d);
  add("ctx.Ws", kSignalCount, d);
  add("ctx.bs", 1, d);
  add("ctx.Win", 4 * d, d);
  add("ctx.bin", 1, d);
  add("ctx.W1", d, d);
  add("ctx.b1", 1, d);
  add("ctx.W2", d, d);
  add("ctx.b2", 1, d);
  for (int k = 0; k < dims.glimpses; ++k) {
    const std::string gl = layer_name("glimpse", k);
    for (int h = 0; h < dims.heads; ++h) {
      const std::string head = gl + layer_name(".h", h);
      add(head + ".Wq", d, dk);
      add(head + ".Wk", d, dk);
      add(head + ".Wv", d, dk);
    }
    add(gl + ".Wo", d, d);
  }
  // Row-vector convention: u = q Wq + h Wk + alpha vis Wb[0, :], so row 0 of
  // Wb plays the role of the first column of the column-convention matrix.
  add("ptr.Wq", d, d);
  add("ptr.Wk", d, d);
  add("ptr.Wb", d, d);
  add("ptr.v", d, 1);
  add("ptr.alpha", 1, 1);
  return slots;
}

std::string leaf(const std::string& name) { return name.substr(name.rfind('.') + 1); }

ad::Mat attention_mask(const AoiGraph& g, int hops) {
  const int n = g.node_count();
  ad::Mat m = ad::Mat::Constant(n, n, kNegInf);
  std::vector<int> depth(n);
  std::vector<int> queue;
  for (int src = 0; src < n; ++src) {
    std::fill(depth.begin(), depth.end(), -1);
    queue.assign(1, src);
    depth[src] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int v = queue[head];
      m(src, v) = 0.0;
      if (depth[v] == hops) continue;
      for (int u : g.neighbors(v)) {
        if (depth[u] < 0) {
          depth[u] = depth[v] + 1;
          queue.push_back(u);
        }
      }
    }
  }
  return m;
}

}  // namespace

void PolicyDims::validate() const {
  if (d < 1 || layers < 0 || heads < 1 || glimpses < 0 || ff_hidden < 1 || hops < 1) {
    throw ConfigError("policy dimensions must be positive");
  }
  if (d % heads != 0) throw ConfigError("d must be divisible by the number of heads");
  if (!(clip > 0.0) || !std::isfinite(clip)) throw ConfigError("logit clip must be positive");
}

PolicyParams::PolicyParams(const PolicyDims& dims) : dims_(dims) {
  dims_.validate();
  slots_ = layout(dims_);
  values_.assign(slots_.back().offset + slots_.back().size(), 0.0);
}

PolicyParams PolicyParams::initialized(const PolicyDims& dims, std::uint64_t seed) {
  PolicyParams p(dims);
  std::mt19937_64 rng(seed);
  for (const ParamSlot& s : p.slots_) {
    const std::string kind = leaf(s.name);
    double* data = p.values_.data() + s.offset;
    if (kind == "g" || kind == "alpha") {
      std::fill(data, data + s.size(), 1.0);
    } else if (kind[0] == 'b') {
      std::fill(data, data + s.size(), 0.0);
    } else {
      const double limit = std::sqrt(6.0 / (s.rows + s.cols));
      for (std::size_t i = 0; i < s.size(); ++i) data[i] = limit * (2.0 * uniform01(rng) - 1.0);
    }
  }
  return p;
}

const ParamSlot& PolicyParams::slot(std::string_view name) const {
  for (const ParamSlot& s : slots_) {
    if (s.name == name) return s;
  }
  throw LogicError("unknown parameter " + std::string(name));
}

Eigen::Map<const ad::Mat> PolicyParams::block(std::string_view name) const {
  const ParamSlot& s = slot(name);
  return {values_.data() + s.offset, s.rows, s.cols};
}

Eigen::Map<ad::Mat> PolicyParams::block(std::string_view name) {
  const ParamSlot& s = slot(name);
  return {values_.data() + s.offset, s.rows, s.cols};
}

ad::Mat feature_matrix(const AoiGraph& g) {
  ad::Mat x(g.node_count(), 4);
  for (int v = 0; v < g.node_count(); ++v) {
    const NodeFeatures& f = g.features()[v];
    x.row(v) << f.x, f.y, f.w, f.m;
  }
  return x;
}

std::array<double, kSignalCount> decoder_signals(const AoiGraph& g, const EnvState& s) {
  const int n = g.cell_count();
  std::array<double, kSignalCount> sig{};
  sig[0] = static_cast<double>(s.visited_count) / n;
  if (s.heading) {
    sig[1] = s.heading->x;
    sig[2] = s.heading->y;
  }
  int open = 0;
  for (int u : g.neighbors(s.current)) open += g.is_cell(u) && !s.visited[u];
  sig[3] = open / 6.0;
  int fragile = 0;
  for (int v = 0; v < n; ++v) {
    if (s.visited[v]) continue;
    int k = 0;
    for (int u : g.neighbors(v)) k += g.is_cell(u) && !s.visited[u];
    fragile += k <= 1;
  }
  sig[4] = static_cast<double>(fragile) / n;
  sig[5] = deadend_check(s, g).dead_end ? 0.0 : 1.0;
  return sig;
}

PolicyNet::PolicyNet(ad::Tape& tape, const PolicyParams& params) : tape_(tape), params_(params) {
  bound_.reserve(params.slots().size());
  for (const ParamSlot& s : params.slots()) {
    bound_.push_back(tape.param(params.values(), s.offset, s.rows, s.cols));
  }
}

ad::Var PolicyNet::p(std::string_view name) {
  const auto& slots = params_.slots();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].name == name) return bound_[i];
  }
  throw LogicError("unknown parameter " + std::string(name));
}

ad::Var PolicyNet::encode_nodes(const AoiGraph& g, const ad::Mat& features, int layers) {
  const PolicyDims& dims = params_.dims();
  const bool full = layers < 0;
  if (full) layers = dims.layers;
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dims.head_dim()));
  const ad::Mat mask = attention_mask(g, dims.hops);
  ad::Var h = tape_.add_row(tape_.matmul(tape_.constant(features), p("embed.W")), p("embed.b"));
  for (int l = 0; l < layers; ++l) {
    const std::string e = layer_name("enc", l);
    const ad::Var z = tape_.layer_norm(h, p(e + ".ln1.g"), p(e + ".ln1.b"));
    std::vector<ad::Var> heads;
    for (int hd = 0; hd < dims.heads; ++hd) {
      const std::string head = e + layer_name(".h", hd);
      const ad::Var q = tape_.matmul(z, p(head + ".Wq"));
      const ad::Var k = tape_.matmul(z, p(head + ".Wk"));
      const ad::Var v = tape_.matmul(z, p(head + ".Wv"));
      ad::Var scores = tape_.scale(tape_.matmul_nt(q, k), inv_sqrt_dk);
      scores = tape_.add_constant(scores, mask);
      heads.push_back(tape_.matmul(tape_.softmax_rows(scores), v));
    }
    h = tape_.add(h, tape_.matmul(tape_.concat_cols(heads), p(e + ".Wo")));
    const ad::Var z2 = tape_.layer_norm(h, p(e + ".ln2.g"), p(e + ".ln2.b"));
    const ad::Var hidden =
        tape_.relu(tape_.add_row(tape_.matmul(z2, p(e + ".ff.W1")), p(e + ".ff.b1")));
    h = tape_.add(h, tape_.add_row(tape_.matmul(hidden, p(e + ".ff.W2")), p(e + ".ff.b2")));
  }
  if (full) h = tape_.layer_norm(h, p("enc.ln.g"), p("enc.ln.b"));
  return h;
}

EncodedGraph PolicyNet::encode(const AoiGraph& g) {
  const PolicyDims& dims = params_.dims();
  EncodedGraph enc;
  enc.nodes = encode_nodes(g, feature_matrix(g));
  enc.mean = tape_.mean_rows(enc.nodes);
  enc.pointer_keys = tape_.matmul(enc.nodes, p("ptr.Wk"));
  enc.glimpse_k.resize(dims.glimpses);
  enc.glimpse_v.resize(dims.glimpses);
  for (int k = 0; k < dims.glimpses; ++k) {
    for (int hd = 0; hd < dims.heads; ++hd) {
      const std::string head = layer_name("glimpse", k) + layer_name(".h", hd);
      enc.glimpse_k[k].push_back(tape_.matmul(enc.nodes, p(head + ".Wk")));
      enc.glimpse_v[k].push_back(tape_.matmul(enc.nodes, p(head + ".Wv")));
    }
  }
  return enc;
}

ad::Var PolicyNet::logits(const EncodedGraph& enc, const AoiGraph& g, const EnvState& s,
                          std::span<const std::uint8_t> mask) {
  const PolicyDims& dims = params_.dims();
  const int n = g.node_count();
  const auto sig = decoder_signals(g, s);
  const ad::Var signals =
      tape_.constant(Eigen::Map<const ad::Mat>(sig.data(), 1, kSignalCount));
  const ad::Var sproj = tape_.add_row(tape_.matmul(signals, p("ctx.Ws")), p("ctx.bs"));
  const std::array<ad::Var, 4> parts = {tape_.row(enc.nodes, s.current),
                                        tape_.row(enc.nodes, g.base()), enc.mean, sproj};
  const ad::Var c = tape_.add_row(tape_.matmul(tape_.concat_cols(parts), p("ctx.Win")), p("ctx.bin"));
  const ad::Var mlp = tape_.relu(tape_.add_row(tape_.matmul(c, p("ctx.W1")), p("ctx.b1")));
  ad::Var q = tape_.add(c, tape_.add_row(tape_.matmul(mlp, p("ctx.W2")), p("ctx.b2")));

  ad::Mat mask_row(1, n);
  for (int j = 0; j < n; ++j) mask_row(0, j) = mask[j] ? 0.0 : kNegInf;
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dims.head_dim()));
  for (int k = 0; k < dims.glimpses; ++k) {
    std::vector<ad::Var> heads;
    for (int hd = 0; hd < dims.heads; ++hd) {
      const std::string head = layer_name("glimpse", k) + layer_name(".h", hd);
      const ad::Var qh = tape_.matmul(q, p(head + ".Wq"));
      ad::Var scores = tape_.scale(tape_.matmul_nt(qh, enc.glimpse_k[k][hd]), inv_sqrt_dk);
      scores = tape_.add_constant(scores, mask_row);
      heads.push_back(tape_.matmul(tape_.softmax_rows(scores), enc.glimpse_v[k][hd]));
    }
    q = tape_.add(q, tape_.matmul(tape_.concat_cols(heads), p(layer_name("glimpse", k) + ".Wo")));
  }

  ad::Mat vis(n, 1);
  for (int j = 0; j < n; ++j) {
    vis(j, 0) = g.is_cell(j) ? static_cast<double>(s.visited[j]) : (j == g.base() ? 1.0 : 0.0);
  }
  ad::Var u = tape_.add_row(enc.pointer_keys, tape_.matmul(q, p("ptr.Wq")));
  const ad::Var gate =
      tape_.scale_by(tape_.matmul(tape_.constant(vis), tape_.row(p("ptr.Wb"), 0)), p("ptr.alpha"));
  u = tape_.scale(tape_.add(u, gate), 1.0 / std::sqrt(static_cast<double>(dims.d)));
  const ad::Var raw = tape_.matmul(tape_.tanh(u), p("ptr.v"));
  return tape_.scale(tape_.tanh(raw), dims.clip);
}

std::vector<double> masked_policy(std::span<const double> logits,
                                  std::span<const std::uint8_t> mask, double temperature) {
  if (logits.size() != mask.size()) throw LogicError("logits and mask differ in size");
  if (!(temperature > 0.0)) throw LogicError("temperature must be positive");
  double mx = kNegInf;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (mask[j]) mx = std::max(mx, logits[j] / temperature);
  }
  if (mx == kNegInf) throw LogicError("no allowed action");
  std::vector<double> p(logits.size(), 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (!mask[j]) continue;
    p[j] = std::exp(logits[j] / temperature - mx);
    total += p[j];
  }
  for (double& x : p) x /= total;
  return p;
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double x : probs) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int sample_index(std::span<const double> probs, std::mt19937_64& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  int last = -1;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] <= 0.0) continue;
    acc += probs[j];
    last = static_cast<int>(j);
    if (u < acc) return last;
  }
  if (last < 0) throw LogicError("sampling from an empty distribution");
  return last;
}

Trajectory rollout(const PolicyParams& params, const AoiGraph& g, const RewardConfig& reward,
                   Decoding decoding, double temperature, std::mt19937_64* rng) {
  if (decoding == Decoding::Sample && rng == nullptr) throw LogicError("sampling needs an rng");
  ad::Tape tape(false);
  PolicyNet net(tape, params);
  const EncodedGraph enc = net.encode(g);
  const std::size_t mark = tape.size();
  EnvState s = reset(g);
  Trajectory t;
  t.nodes.push_back(g.base());
  while (!s.done) {
    const std::vector<std::uint8_t> mask = action_mask(s, g);
    const ad::Var z = net.logits(enc, g, s, mask);
    const ad::Mat& zv = tape.value(z);
    const std::vector<double> probs =
        masked_policy(std::span<const double>(zv.data(), zv.size()), mask, temperature);
    int a = -1;
    if (decoding == Decoding::Greedy) {
      for (int j = 0; j < g.node_count(); ++j) {
        if (mask[j] && (a < 0 || zv(j, 0) > zv(a, 0))) a = j;
      }
    } else {
      a = sample_index(probs, *rng);
    }
    tape.truncate(mark);
    const Vec2 from = g.position(s.current);
    const StepOutcome out = step(s, a, g, reward);
    t.actions.push_back(a);
    t.nodes.push_back(a);
    t.logp.push_back(std::log(probs[a]));
    t.rewards.push_back(out.reward);
    t.episode_return += out.reward;
    t.length_nm += norm(g.position(a) - from);
  }
  t.outcome = s.outcome;
  t.covered = s.visited_count;
  return t;
}

StepTerms replay(const PolicyParams& params, const AoiGraph& g, std::span<const int> actions,
                 double temperature, const StepSeed& seed, std::span<double> grad) {
  const bool differentiate = static_cast<bool>(seed);
  if (differentiate && grad.size() != params.size()) throw LogicError("gradient buffer size");
  ad::Tape tape(differentiate);
  PolicyNet net(tape, params);
  const EncodedGraph enc = net.encode(g);
  const std::size_t mark = tape.size();
  EnvState s = reset(g);
  const RewardConfig reward;
  StepTerms terms;
  std::vector<ad::Var> outputs;
  for (int a : actions) {
    if (s.done) throw LogicError("replay continues past the end of the episode");
    const std::vector<std::uint8_t> mask = action_mask(s, g);
    const ad::Var z = net.logits(enc, g, s, mask);
    const ad::Var le = tape.log_prob_entropy(z, mask, a, temperature);
    terms.logp.push_back(tape.value(le)(0, 0));
    terms.entropy.push_back(tape.value(le)(0, 1));
    if (differentiate) {
      outputs.push_back(le);
    } else {
      tape.truncate(mark);
    }
    step(s, a, g, reward);
  }
  if (differentiate) {
    std::vector<std::pair<ad::Var, ad::Mat>> seeds;
    seeds.reserve(outputs.size());
    for (std::size_t t = 0; t < outputs.size(); ++t) {
      const auto [dl, dh] = seed(t, terms.logp[t], terms.entropy[t]);
      ad::Mat m(1, 2);
      m << dl, dh;
      seeds.emplace_back(outputs[t], std::move(m));
    }
    tape.backward(seeds, grad);
  }
  return terms;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  const PolicyDims& d = ckpt.params.dims();
  const bool optimizer = !ckpt.adam_m.empty();
  if (optimizer && (ckpt.adam_m.size() != ckpt.params.size() ||
                    ckpt.adam_v.size() != ckpt.params.size())) {
    throw LogicError("optimizer state does not match parameters");
  }
  nlohmann::ordered_json h;
  h["format_version"] = kCheckpointFormatVersion;
  h["dims"] = {{"d", d.d},         {"layers", d.layers},       {"heads", d.heads},
               {"glimpses", d.glimpses}, {"ff_hidden", d.ff_hidden}, {"hops", d.hops},
               {"clip", d.clip}};
  h["seed"] = ckpt.seed;
  h["epoch"] = ckpt.epoch;
  h["n_params"] = ckpt.params.size();
  h["optimizer"] = optimizer;
  h["adam_step"] = ckpt.adam_step;
  h["best_val_sr"] = ckpt.best_val_sr;
  h["best_epoch"] = ckpt.best_epoch;
  h["stale_epochs"] = ckpt.stale_epochs;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path);
  out << h.dump() << '\n';
  auto write = [&](std::span<const double> v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  write(ckpt.params.values());
  if (optimizer) {
    write(ckpt.adam_m);
    write(ckpt.adam_v);
  }
  if (!out) throw DataError("failed writing checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path);
  std::string header;
  std::getline(in, header);
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint header is not JSON: " + std::string(e.what()));
  }
  try {
    if (h.at("format_version").get<int>() != kCheckpointFormatVersion) {
      throw DataError("unsupported checkpoint version");
    }
    const auto& jd = h.at("dims");
    PolicyDims d;
    d.d = jd.at("d");
    d.layers = jd.at("layers");
    d.heads = jd.at("heads");
    d.glimpses = jd.at("glimpses");
    d.ff_hidden = jd.at("ff_hidden");
    d.hops = jd.at("hops");
    d.clip = jd.at("clip");
    Checkpoint c;
    c.params = PolicyParams(d);
    if (h.at("n_params").get<std::size_t>() != c.params.size()) {
      throw DataError("checkpoint parameter count does not match its dimensions");
    }
    c.seed = h.at("seed");
    c.epoch = h.at("epoch");
    c.adam_step = h.at("adam_step");
    c.best_val_sr = h.at("best_val_sr");
    c.best_epoch = h.at("best_epoch");
    c.stale_epochs = h.at("stale_epochs");
    auto read = [&](std::span<double> v) {
      in.read(reinterpret_cast<char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
      if (!in) throw DataError("checkpoint truncated");
    };
    read(c.params.values());
    if (h.at("optimizer").get<bool>()) {
      c.adam_m.resize(c.params.size());
      c.adam_v.resize(c.params.size());
      read(c.adam_m);
      read(c.adam_v);
    }
    if (in.peek() != std::char_traits<char>::eof()) throw DataError("trailing bytes in checkpoint");
    for (double x : c.params.values()) {
      if (!std::isfinite(x)) throw DataError("non-finite parameter in checkpoint");
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed checkpoint header: " + std::string(e.what()));
  } catch (const ConfigError& e) {
    throw DataError(std::string("checkpoint dimensions invalid: ") + e.what());
  }
}

}  // namespace hexcover
