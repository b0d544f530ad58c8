#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hexcover/aoi_graph.hpp"
#include "hexcover/autodiff.hpp"
#include "hexcover/environment.hpp"

namespace hexcover {

struct PolicyDims {
  int d = 32;
  int layers = 2;
  int heads = 4;
  int glimpses = 2;
  int ff_hidden = 64;
  int hops = 1;         // encoder attention radius in graph hops
  double clip = 10.0;   // logits are squashed to [-clip, clip]

  void validate() const;  // throws ConfigError
  int head_dim() const { return d / heads; }
};

inline constexpr int kSignalCount = 6;

struct ParamSlot {
  std::string name;
  std::size_t offset = 0;
  int rows = 0;
  int cols = 0;
  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

// Flat parameter vector with a fixed, named, column-major block layout that
// depends only on the dimensions.
class PolicyParams {
 public:
  PolicyParams() = default;
  explicit PolicyParams(const PolicyDims& dims);  // all zeros

  // Xavier-uniform weights, zero biases, unit norm gains, gate alpha = 1.
  static PolicyParams initialized(const PolicyDims& dims, std::uint64_t seed);

  const PolicyDims& dims() const { return dims_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  const std::vector<ParamSlot>& slots() const { return slots_; }
  const ParamSlot& slot(std::string_view name) const;
  Eigen::Map<const ad::Mat> block(std::string_view name) const;
  Eigen::Map<ad::Mat> block(std::string_view name);

 private:
  PolicyDims dims_;
  std::vector<ParamSlot> slots_;
  std::vector<double> values_;
};

// Node features as an N x 4 matrix (x, y, w, m).
ad::Mat feature_matrix(const AoiGraph& g);

// Coverage fraction, heading (x, y), unvisited neighbours of the current node
// over 6, cells with at most one unvisited neighbour over |V|, and 1 when the
// dead-end check passes.
std::array<double, kSignalCount> decoder_signals(const AoiGraph& g, const EnvState& s);

struct EncodedGraph {
  ad::Var nodes;  // N x d
  ad::Var mean;   // 1 x d
  ad::Var pointer_keys;                          // nodes * W_k
  std::vector<std::vector<ad::Var>> glimpse_k;   // [round][head], N x d_k
  std::vector<std::vector<ad::Var>> glimpse_v;
};

// Binds a parameter vector to a tape and evaluates the network on it.
class PolicyNet {
 public:
  PolicyNet(ad::Tape& tape, const PolicyParams& params);

  // Runs the first `layers` encoder layers on the given features (all layers
  // when negative). The final normalization is applied only for a full pass.
  ad::Var encode_nodes(const AoiGraph& g, const ad::Mat& features, int layers = -1);
  EncodedGraph encode(const AoiGraph& g);

  // Clipped pre-mask logits, N x 1, for the state's decision.
  ad::Var logits(const EncodedGraph& enc, const AoiGraph& g, const EnvState& s,
                 std::span<const std::uint8_t> mask);

 private:
  ad::Var p(std::string_view name);

  ad::Tape& tape_;
  const PolicyParams& params_;
  std::vector<ad::Var> bound_;
};

// Softmax over (logits + additive mask) / temperature; forbidden entries get
// exactly zero. Throws LogicError when nothing is allowed.
std::vector<double> masked_policy(std::span<const double> logits,
                                  std::span<const std::uint8_t> mask, double temperature);

double entropy(std::span<const double> probs);

enum class Decoding { Greedy, Sample };

struct Trajectory {
  std::vector<int> nodes;      // base first
  std::vector<int> actions;
  std::vector<double> logp;    // per step at the decoding temperature
  std::vector<double> rewards;
  double episode_return = 0.0;
  Outcome outcome = Outcome::Running;
  int covered = 0;
  double length_nm = 0.0;

  bool hamiltonian() const { return outcome == Outcome::Completed; }
};

// Draws u in [0, 1) from the top 53 bits of one engine output.
double uniform01(std::mt19937_64& rng);

// Index sampled from a probability vector by inverse CDF in index order.
int sample_index(std::span<const double> probs, std::mt19937_64& rng);

// Greedy takes the highest logit (lowest id on ties) and ignores rng.
Trajectory rollout(const PolicyParams& params, const AoiGraph& g, const RewardConfig& reward,
                   Decoding decoding, double temperature, std::mt19937_64* rng);

struct StepTerms {
  std::vector<double> logp;
  std::vector<double> entropy;
};

// Seeds for one step: (d loss / d logp, d loss / d entropy).
using StepSeed = std::function<std::pair<double, double>(std::size_t, double, double)>;

// Replays a fixed action sequence under `params`. With a seed function the
// step terms are differentiated and the gradient is added into `grad`.
StepTerms replay(const PolicyParams& params, const AoiGraph& g, std::span<const int> actions,
                 double temperature, const StepSeed& seed = {}, std::span<double> grad = {});

struct Checkpoint {
  PolicyParams params;
  std::uint64_t seed = 0;
  int epoch = 0;
  // Optimizer and early-stopping state, present for resumable checkpoints.
  std::uint64_t adam_step = 0;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  double best_val_sr = -1.0;
  int best_epoch = -1;
  int stale_epochs = 0;
};

inline constexpr int kCheckpointFormatVersion = 1;

// One JSON header line followed by raw little-endian float64 arrays.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace hexcover
