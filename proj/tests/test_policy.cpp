#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "hexcover/errors.hpp"
#include "hexcover/heuristics.hpp"
#include "hexcover/policy.hpp"

using namespace hexcover;
using ad::Mat;

namespace {

PolicyDims small_dims() {
  PolicyDims dims;
  dims.d = 8;
  dims.heads = 2;
  dims.ff_hidden = 16;
  return dims;
}

// Every entry uniform in [-0.5, 0.5], so gains, biases and the gate are
// exercised away from their initial values.
PolicyParams scrambled(const PolicyDims& dims, std::uint64_t seed) {
  PolicyParams p(dims);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (double& x : p.values()) x = u(rng);
  return p;
}

Mat layer_norm(const Mat& x, const Mat& g, const Mat& b) {
  Mat y(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double mu = x.row(i).mean();
    const double var = (x.row(i).array() - mu).square().mean();
    y.row(i) = ((x.row(i).array() - mu) / std::sqrt(var + 1e-5)) * g.row(0).array() +
               b.row(0).array();
  }
  return y;
}

Mat softmax_rows(Mat s) {
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double mx = s.row(i).maxCoeff();
    s.row(i) = (s.row(i).array() - mx).exp();
    s.row(i) /= s.row(i).sum();
  }
  return s;
}

Mat add_row(Mat a, const Mat& row) {
  a.rowwise() += row.row(0);
  return a;
}

// Straight-line evaluation of the policy for one decision, written from the
// model definition without the tape.
Mat reference_logits(const PolicyParams& P, const AoiGraph& g, const EnvState& s,
                     const std::vector<std::uint8_t>& mask) {
  const PolicyDims& D = P.dims();
  const int n = g.node_count();
  auto W = [&](const std::string& name) { return Mat(P.block(name)); };
  Mat x(n, 4);
  for (int v = 0; v < n; ++v) {
    const NodeFeatures f = g.features()[v];
    x.row(v) << f.x, f.y, f.w, f.m;
  }
  // Hop distances by Floyd-Warshall.
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, 1 << 20));
  for (int v = 0; v < n; ++v) {
    dist[v][v] = 0;
    for (int u : g.neighbors(v)) dist[v][u] = 1;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dist[i][j] = std::min(dist[i][j], dist[i][k] + dist[k][j]);
  Mat amask(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) amask(i, j) = dist[i][j] <= D.hops ? 0.0 : -1e300;

  const double sdk = std::sqrt(static_cast<double>(D.head_dim()));
  Mat h = add_row(x * W("embed.W"), W("embed.b"));
  for (int l = 0; l < D.layers; ++l) {
    const std::string e = "enc" + std::to_string(l);
    const Mat z = layer_norm(h, W(e + ".ln1.g"), W(e + ".ln1.b"));
    Mat cat(n, D.d);
    for (int hd = 0; hd < D.heads; ++hd) {
      const std::string p = e + ".h" + std::to_string(hd);
      const Mat q = z * W(p + ".Wq"), k = z * W(p + ".Wk"), v = z * W(p + ".Wv");
      const Mat a = softmax_rows(Mat((q * k.transpose()) / sdk + amask));
      cat.middleCols(hd * D.head_dim(), D.head_dim()) = a * v;
    }
    h += cat * W(e + ".Wo");
    const Mat z2 = layer_norm(h, W(e + ".ln2.g"), W(e + ".ln2.b"));
    const Mat hid = add_row(z2 * W(e + ".ff.W1"), W(e + ".ff.b1")).cwiseMax(0.0);
    h += add_row(hid * W(e + ".ff.W2"), W(e + ".ff.b2"));
  }
  h = layer_norm(h, W("enc.ln.g"), W("enc.ln.b"));
  const Mat mean = h.colwise().mean();

  Mat sig = Mat::Zero(1, kSignalCount);
  const int cells = g.cell_count();
  sig(0, 0) = static_cast<double>(s.visited_count) / cells;
  if (s.heading) {
    sig(0, 1) = s.heading->x;
    sig(0, 2) = s.heading->y;
  }
  int open = 0;
  for (int u : g.neighbors(s.current)) open += g.is_cell(u) && !s.visited[u];
  sig(0, 3) = open / 6.0;
  int fragile = 0;
  for (int v = 0; v < cells; ++v) {
    if (s.visited[v]) continue;
    int k = 0;
    for (int u : g.neighbors(v)) k += g.is_cell(u) && !s.visited[u];
    fragile += k <= 1;
  }
  sig(0, 4) = static_cast<double>(fragile) / cells;
  sig(0, 5) = deadend_check(s, g).dead_end ? 0.0 : 1.0;

  Mat ctx(1, 4 * D.d);
  ctx << h.row(s.current), h.row(g.base()), mean, add_row(sig * W("ctx.Ws"), W("ctx.bs"));
  const Mat c = add_row(ctx * W("ctx.Win"), W("ctx.bin"));
  Mat q = c + add_row(add_row(c * W("ctx.W1"), W("ctx.b1")).cwiseMax(0.0) * W("ctx.W2"), W("ctx.b2"));
  Mat mrow(1, n);
  for (int j = 0; j < n; ++j) mrow(0, j) = mask[j] ? 0.0 : -1e300;
  for (int k = 0; k < D.glimpses; ++k) {
    const std::string gl = "glimpse" + std::to_string(k);
    Mat cat(1, D.d);
    for (int hd = 0; hd < D.heads; ++hd) {
      const std::string p = gl + ".h" + std::to_string(hd);
      const Mat a = softmax_rows(Mat((q * W(p + ".Wq")) * (h * W(p + ".Wk")).transpose() / sdk + mrow));
      cat.middleCols(hd * D.head_dim(), D.head_dim()) = a * (h * W(p + ".Wv"));
    }
    q += cat * W(gl + ".Wo");
  }
  const double alpha = W("ptr.alpha")(0, 0);
  const Mat keys = h * W("ptr.Wk");
  const Mat qp = q * W("ptr.Wq");
  const Mat wb = W("ptr.Wb").row(0);
  const Mat v = W("ptr.v");
  Mat out(n, 1);
  for (int j = 0; j < n; ++j) {
    const double vis = g.is_cell(j) ? s.visited[j] : (j == g.base() ? 1.0 : 0.0);
    const Mat u = (keys.row(j) + qp + alpha * vis * wb) / std::sqrt(static_cast<double>(D.d));
    const double raw = (u.array().tanh().matrix() * v)(0, 0);
    out(j, 0) = D.clip * std::tanh(raw);
  }
  return out;
}

Mat net_logits(const PolicyParams& params, const AoiGraph& g, const EnvState& s,
               const std::vector<std::uint8_t>& mask) {
  ad::Tape tape(false);
  PolicyNet net(tape, params);
  const EncodedGraph enc = net.encode(g);
  return tape.value(net.logits(enc, g, s, mask));
}

// Decision states along one sampled episode.
std::vector<EnvState> episode_states(const PolicyParams& params, const AoiGraph& g,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Trajectory t = rollout(params, g, RewardConfig{}, Decoding::Sample, 1.0, &rng);
  std::vector<EnvState> states;
  EnvState s = reset(g);
  for (int a : t.actions) {
    states.push_back(s);
    step(s, a, g, RewardConfig{});
  }
  return states;
}

const AoiInstance& tiny_instance() {
  static const AoiInstance inst = generate_instance(tiny_generation_config(), 7);
  return inst;
}

}  // namespace

TEST_SUITE("policy") {

TEST_CASE("desk dimensions give a fixed parameter count") {
  const PolicyParams p(PolicyDims{});
  CHECK(p.size() == 34817);
  CHECK(p.slot("ptr.Wb").rows == 32);
  CHECK(p.slot("ptr.Wb").cols == 32);
  CHECK(p.slot("ptr.v").size() == 32);
  CHECK(p.slot("ptr.alpha").size() == 1);
  std::size_t total = 0;
  for (const ParamSlot& s : p.slots()) {
    CHECK(s.offset == total);
    total += s.size();
  }
  CHECK(total == p.size());
}

TEST_CASE("initialization") {
  const PolicyParams p = PolicyParams::initialized(PolicyDims{}, 3);
  CHECK(p.block("ptr.alpha")(0, 0) == 1.0);
  CHECK(p.block("enc0.ln1.g").isOnes());
  CHECK(p.block("enc0.ff.b1").isZero());
  CHECK_FALSE(p.block("embed.W").isZero());
  const PolicyParams again = PolicyParams::initialized(PolicyDims{}, 3);
  CHECK(std::ranges::equal(p.values(), again.values()));
}

TEST_CASE("invalid dimensions are rejected") {
  PolicyDims dims;
  dims.heads = 3;
  CHECK_THROWS_AS(dims.validate(), ConfigError);
  dims = PolicyDims{};
  dims.clip = 0.0;
  CHECK_THROWS_AS(dims.validate(), ConfigError);
}

TEST_CASE("logits match a straight-line implementation") {
  const AoiGraph& g = tiny_instance().graph;
  for (std::uint64_t seed : {1, 2, 3}) {
    const PolicyParams params = scrambled(small_dims(), seed);
    for (const EnvState& s : episode_states(params, g, seed)) {
      const auto mask = action_mask(s, g);
      const Mat a = net_logits(params, g, s, mask);
      const Mat b = reference_logits(params, g, s, mask);
      CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("pre-mask logits are bounded by the clip constant") {
  const AoiGraph& g = tiny_instance().graph;
  PolicyParams params = scrambled(small_dims(), 4);
  for (double& x : params.values()) x *= 20.0;
  for (const EnvState& s : episode_states(params, g, 4)) {
    const Mat z = net_logits(params, g, s, action_mask(s, g));
    CHECK(z.cwiseAbs().maxCoeff() <= params.dims().clip);
  }
}

TEST_CASE("gate zero makes visited status invisible") {
  const AoiGraph& g = tiny_instance().graph;
  PolicyParams params = scrambled(small_dims(), 5);
  // Remove the signal path so only the pointer sees the visited flags.
  params.block("ctx.Ws").setZero();
  EnvState s = reset(g);
  step(s, g.neighbors(g.base())[0], g, RewardConfig{});
  const auto mask = action_mask(s, g);
  int j = -1;
  for (int v = 0; v < g.cell_count(); ++v) {
    if (!s.visited[v] && !mask[v]) j = v;
  }
  REQUIRE(j >= 0);
  EnvState flipped = s;
  flipped.visited[j] = 1;
  params.block("ptr.alpha")(0, 0) = 0.0;
  CHECK(net_logits(params, g, s, mask)(j, 0) == net_logits(params, g, flipped, mask)(j, 0));
  params.block("ptr.alpha")(0, 0) = 1.0;
  CHECK(net_logits(params, g, s, mask)(j, 0) != net_logits(params, g, flipped, mask)(j, 0));
}

TEST_CASE("encoder attention is local") {
  const AoiGraph g = fixtures::flower();
  const PolicyParams params = scrambled(small_dims(), 6);
  const Mat x = feature_matrix(g);
  Mat probed = x;
  probed.row(4).setZero();  // petal opposite petal 1
  ad::Tape tape(false);
  PolicyNet net(tape, params);
  const Mat before = tape.value(net.encode_nodes(g, x, 1));
  const Mat after = tape.value(net.encode_nodes(g, probed, 1));
  CHECK(before.row(1) == after.row(1));
  CHECK(before.row(0) != after.row(0));
}

TEST_CASE("relabelling cells permutes the policy") {
  const AoiGraph& g = tiny_instance().graph;
  const int n = g.cell_count();
  std::vector<int> perm(n);  // old id -> new id
  for (int i = 0; i < n; ++i) perm[i] = (i * 5 + 3) % n;
  REQUIRE(std::gcd(5, n) == 1);
  std::vector<Vec2> pos(n);
  std::vector<Axial> ax(n);
  for (int i = 0; i < n; ++i) {
    pos[perm[i]] = g.position(i);
    ax[perm[i]] = g.axial(i);
  }
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int u : g.neighbors(i)) {
      if (g.is_cell(u) && i < u) edges.emplace_back(perm[i], perm[u]);
    }
  }
  std::vector<int> bn;
  for (int u : g.neighbors(g.base())) bn.push_back(perm[u]);
  std::sort(bn.begin(), bn.end());
  const AoiGraph h = AoiGraph::assemble(pos, ax, edges, g.position(g.base()), bn, bn,
                                        g.cell_spacing());
  const PolicyParams params = scrambled(small_dims(), 8);
  EnvState s = reset(g), t = reset(h);
  for (int k = 0; k < 3; ++k) {
    const auto ms = action_mask(s, g), mt = action_mask(t, h);
    const Mat zs = net_logits(params, g, s, ms), zt = net_logits(params, h, t, mt);
    const auto ps = masked_policy({zs.data(), std::size_t(zs.size())}, ms, 1.0);
    const auto pt = masked_policy({zt.data(), std::size_t(zt.size())}, mt, 1.0);
    for (int i = 0; i < n; ++i) CHECK(ps[i] == doctest::Approx(pt[perm[i]]).epsilon(1e-12));
    int a = -1;
    for (int i = 0; i < n; ++i) {
      if (ms[i]) a = i;
    }
    REQUIRE(a >= 0);
    step(s, a, g, RewardConfig{});
    step(t, perm[a], h, RewardConfig{});
  }
}

TEST_CASE("masked policy") {
  const std::vector<std::uint8_t> one{1, 0};
  const auto p = masked_policy(std::vector<double>{1.0, 2.0}, one, 1.0);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.0);
  const std::vector<std::uint8_t> all(4, 1);
  for (double t : {0.5, 1.0, 3.0}) {
    for (double x : masked_policy(std::vector<double>(4, 0.7), all, t)) CHECK(x == doctest::Approx(0.25));
  }
  const std::vector<double> z{0.3, -1.2, 2.0, 0.0};
  const auto cold = masked_policy(z, all, 1.0), warm = masked_policy(z, all, 1.5);
  CHECK(entropy(warm) > entropy(cold));
  double sum = 0.0;
  for (double x : cold) sum += x;
  CHECK(std::abs(sum - 1.0) <= 1e-12);
  CHECK_THROWS_AS(masked_policy(z, std::vector<std::uint8_t>(4, 0), 1.0), LogicError);
}

TEST_CASE("gradients match central differences") {
  const AoiGraph& g = tiny_instance().graph;
  for (std::uint64_t seed : {3, 4, 5}) {
    const PolicyParams params = PolicyParams::initialized(small_dims(), seed);
    std::mt19937_64 rng(seed);
    const Trajectory traj = rollout(params, g, RewardConfig{}, Decoding::Sample, 1.3, &rng);
    std::vector<double> cl, ch;
    for (std::size_t t = 0; t < traj.actions.size(); ++t) {
      cl.push_back(std::sin(1.0 + t));
      ch.push_back(std::cos(2.0 * t));
    }
    auto loss = [&](const PolicyParams& p) {
      const StepTerms st = replay(p, g, traj.actions, 1.3);
      double L = 0.0;
      for (std::size_t t = 0; t < st.logp.size(); ++t) L += cl[t] * st.logp[t] + ch[t] * st.entropy[t];
      return L;
    };
    std::vector<double> grad(params.size(), 0.0);
    replay(params, g, traj.actions, 1.3,
           [&](std::size_t t, double, double) { return std::make_pair(cl[t], ch[t]); }, grad);
    double diff = 0.0, ref = 0.0;
    PolicyParams probe = params;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double h = 1e-5, x = params.values()[i];
      probe.values()[i] = x + h;
      const double up = loss(probe);
      probe.values()[i] = x - h;
      const double down = loss(probe);
      probe.values()[i] = x;
      const double fd = (up - down) / (2 * h);
      diff += (fd - grad[i]) * (fd - grad[i]);
      ref += fd * fd;
    }
    CHECK(std::sqrt(diff / ref) <= 1e-4);
  }
}

TEST_CASE("gradient linearity") {
  const AoiGraph& g = tiny_instance().graph;
  const PolicyParams params = PolicyParams::initialized(small_dims(), 9);
  const Trajectory traj = rollout(params, g, RewardConfig{}, Decoding::Greedy, 1.0, nullptr);
  std::vector<double> zero(params.size(), 0.0);
  replay(params, g, traj.actions, 1.0, [](std::size_t, double, double) { return std::make_pair(0.0, 0.0); }, zero);
  for (double x : zero) CHECK(x == 0.0);
  const StepSeed seed = [](std::size_t, double, double) { return std::make_pair(1.0, 0.5); };
  std::vector<double> once(params.size(), 0.0), twice(params.size(), 0.0);
  replay(params, g, traj.actions, 1.0, seed, once);
  replay(params, g, traj.actions, 1.0, seed, twice);
  replay(params, g, traj.actions, 1.0, seed, twice);
  for (std::size_t i = 0; i < once.size(); ++i) CHECK(twice[i] == 2.0 * once[i]);
}

TEST_CASE("rollouts are feasible and reproducible") {
  const AoiGraph& g = tiny_instance().graph;
  const PolicyParams params = PolicyParams::initialized(PolicyDims{}, 1);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 a(seed), b(seed);
    const Trajectory ta = rollout(params, g, RewardConfig{}, Decoding::Sample, 1.5, &a);
    const Trajectory tb = rollout(params, g, RewardConfig{}, Decoding::Sample, 1.5, &b);
    CHECK(ta.nodes == tb.nodes);
    CHECK(ta.logp == tb.logp);
    std::vector<int> seen(g.cell_count(), 0);
    for (int v : ta.actions) {
      if (g.is_cell(v)) CHECK(++seen[v] == 1);
    }
    for (std::size_t i = 1; i < ta.nodes.size(); ++i) CHECK(g.adjacent(ta.nodes[i - 1], ta.nodes[i]));
  }
  const Trajectory g1 = rollout(params, g, RewardConfig{}, Decoding::Greedy, 1.0, nullptr);
  const Trajectory g2 = rollout(params, g, RewardConfig{}, Decoding::Greedy, 1.0, nullptr);
  CHECK(g1.nodes == g2.nodes);
}

TEST_CASE("a two-cell instance always completes") {
  const AoiGraph g = fixtures::corridor(2);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PolicyParams params = scrambled(small_dims(), seed);
    const Trajectory t = rollout(params, g, RewardConfig{}, Decoding::Greedy, 1.0, nullptr);
    CHECK(t.hamiltonian());
    CHECK(t.nodes.size() == 4);
  }
}

TEST_CASE("checkpoints round-trip byte-exactly") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "hexcover_ckpt_test";
  fs::create_directories(dir);
  Checkpoint ck;
  ck.params = scrambled(small_dims(), 11);
  ck.seed = 77;
  ck.epoch = 3;
  ck.adam_step = 12;
  ck.adam_m.assign(ck.params.size(), 0.25);
  ck.adam_v.assign(ck.params.size(), 1e-9);
  ck.best_val_sr = 0.5;
  ck.best_epoch = 2;
  ck.stale_epochs = 1;
  const std::string a = (dir / "a.ckpt").string(), b = (dir / "b.ckpt").string();
  save_checkpoint(a, ck);
  const Checkpoint back = load_checkpoint(a);
  CHECK(std::ranges::equal(back.params.values(), ck.params.values()));
  CHECK(back.adam_m == ck.adam_m);
  CHECK(back.adam_v == ck.adam_v);
  CHECK(back.seed == 77);
  CHECK(back.epoch == 3);
  CHECK(back.adam_step == 12);
  CHECK(back.best_epoch == 2);
  CHECK(back.stale_epochs == 1);
  CHECK(back.params.dims().d == 8);
  save_checkpoint(b, back);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::string bytes = slurp(a);
  CHECK(bytes == slurp(b));

  std::ofstream(b, std::ios::binary) << bytes.substr(0, bytes.size() - 8);
  CHECK_THROWS_AS(load_checkpoint(b), DataError);
  std::ofstream(b, std::ios::binary) << bytes << "xx";
  CHECK_THROWS_AS(load_checkpoint(b), DataError);
  std::ofstream(b, std::ios::binary) << "{\"format_version\":99}\n";
  CHECK_THROWS_AS(load_checkpoint(b), DataError);
  CHECK_THROWS_AS(load_checkpoint((dir / "missing.ckpt").string()), DataError);
  Checkpoint bad = ck;
  bad.params.values()[0] = std::nan("");
  save_checkpoint(b, bad);
  CHECK_THROWS_AS(load_checkpoint(b), DataError);
  fs::remove_all(dir);
}

}  // TEST_SUITE
