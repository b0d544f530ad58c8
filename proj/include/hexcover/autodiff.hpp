#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace hexcover::ad {

using Mat = Eigen::MatrixXd;

struct Var {
  int id = -1;
};

// Reverse-mode tape over dense matrices. Nodes are appended in evaluation
// order, so a reverse sweep visits them topologically. Parameter leaves map
// onto a slice of a flat parameter vector and, during backward, add their
// gradient into the matching slice of a flat gradient buffer.
class Tape {
 public:
  explicit Tape(bool record = true) : record_(record) {}

  bool recording() const { return record_; }
  void clear() { nodes_.clear(); }
  std::size_t size() const { return nodes_.size(); }
  // Drops every node created after the first n; earlier Vars stay valid.
  void truncate(std::size_t n) { nodes_.resize(std::min(n, nodes_.size())); }

  Var constant(Mat value);
  // Column-major rows x cols block starting at params[offset].
  Var param(std::span<const double> params, std::size_t offset, int rows, int cols);

  const Mat& value(Var v) const { return nodes_[v.id].value; }
  double scalar(Var v) const { return nodes_[v.id].value(0, 0); }

  Var matmul(Var a, Var b);     // a * b
  Var matmul_nt(Var a, Var b);  // a * b^T
  Var add(Var a, Var b);
  Var add_row(Var a, Var row);  // broadcast a 1 x c row over every row of a
  Var scale(Var a, double s);
  Var scale_by(Var a, Var s);   // s is 1 x 1
  Var tanh(Var a);
  Var relu(Var a);
  Var add_constant(Var a, const Mat& c);
  Var softmax_rows(Var a);      // entries equal to -inf receive zero weight
  Var layer_norm(Var a, Var gain, Var bias, double eps = 1e-5);
  Var concat_cols(std::span<const Var> parts);
  Var row(Var a, int i);
  Var mean_rows(Var a);

  // Masked categorical over column vector z at temperature t. Returns a
  // 1 x 2 node holding (log p(action), entropy over allowed entries).
  Var log_prob_entropy(Var z, std::span<const std::uint8_t> allowed, int action, double t);

  // Seeds d(loss)/d(node) for each listed output and sweeps backward,
  // accumulating parameter gradients into grad (same layout as params).
  void backward(std::span<const std::pair<Var, Mat>> seeds, std::span<double> grad);

 private:
  struct Node {
    Mat value;
    Mat grad;
    std::function<void()> back;
    std::ptrdiff_t param_offset = -1;
    bool needs_grad = false;
  };

  Var push(Mat value, bool needs_grad);
  bool needs(Var v) const { return nodes_[v.id].needs_grad; }
  template <typename Expr>
  void accumulate(int id, const Expr& g) {
    Node& n = nodes_[id];
    if (!n.needs_grad) return;
    if (n.grad.size() == 0) {
      n.grad = g;
    } else {
      n.grad += g;
    }
  }

  bool record_;
  std::vector<Node> nodes_;
};

}  // namespace hexcover::ad
