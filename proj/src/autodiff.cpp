#include "hexcover/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hexcover/errors.hpp"

namespace hexcover::ad {

Var Tape::push(Mat value, bool needs_grad) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = record_ && needs_grad;
  nodes_.push_back(std::move(n));
  return {static_cast<int>(nodes_.size()) - 1};
}

Var Tape::constant(Mat value) { return push(std::move(value), false); }

Var Tape::param(std::span<const double> params, std::size_t offset, int rows, int cols) {
  if (offset + static_cast<std::size_t>(rows) * cols > params.size()) {
    throw LogicError("parameter slice out of range");
  }
  Var v = push(Eigen::Map<const Mat>(params.data() + offset, rows, cols), true);
  nodes_[v.id].param_offset = static_cast<std::ptrdiff_t>(offset);
  return v;
}

Var Tape::matmul(Var a, Var b) {
  Var c = push(value(a) * value(b), needs(a) || needs(b));
  if (needs(c)) {
    nodes_[c.id].back = [this, a, b, c] {
      const Mat& g = nodes_[c.id].grad;
      if (needs(a)) accumulate(a.id, g * value(b).transpose());
      if (needs(b)) accumulate(b.id, value(a).transpose() * g);
    };
  }
  return c;
}

Var Tape::matmul_nt(Var a, Var b) {
  Var c = push(value(a) * value(b).transpose(), needs(a) || needs(b));
  if (needs(c)) {
    nodes_[c.id].back = [this, a, b, c] {
      const Mat& g = nodes_[c.id].grad;
      if (needs(a)) accumulate(a.id, g * value(b));
      if (needs(b)) accumulate(b.id, g.transpose() * value(a));
    };
  }
  return c;
}

Var Tape::add(Var a, Var b) {
  if (value(a).rows() != value(b).rows() || value(a).cols() != value(b).cols()) {
    throw LogicError("add: shape mismatch");
  }
  Var c = push(value(a) + value(b), needs(a) || needs(b));
  if (needs(c)) {
    nodes_[c.id].back = [this, a, b, c] {
      const Mat& g = nodes_[c.id].grad;
      accumulate(a.id, g);
      accumulate(b.id, g);
    };
  }
  return c;
}

Var Tape::add_row(Var a, Var r) {
  if (value(r).rows() != 1 || value(r).cols() != value(a).cols()) {
    throw LogicError("add_row: shape mismatch");
  }
  Mat out = value(a);
  out.rowwise() += value(r).row(0);
  Var c = push(std::move(out), needs(a) || needs(r));
  if (needs(c)) {
    nodes_[c.id].back = [this, a, r, c] {
      const Mat& g = nodes_[c.id].grad;
      accumulate(a.id, g);
      if (needs(r)) accumulate(r.id, g.colwise().sum());
    };
  }
  return c;
}

Var Tape::scale(Var a, double s) {
  Var c = push(s * value(a), needs(a));
  if (needs(c)) {
    nodes_[c.id].back = [this, a, c, s] { accumulate(a.id, s * nodes_[c.id].grad); };
  }
  return c;
}

Var Tape::scale_by(Var a, Var s) {
  if (value(s).size() != 1) throw LogicError("scale_by: scalar expected");
  Var c = push(value(s)(0, 0) * value(a), needs(a) || needs(s));
  if (needs(c)) {
    nodes_[c.id].back = [this, a, s, c] {
      const Mat& g = nodes_[c.id].grad;
      if (needs(a)) accumulate(a.id, value(s)(0, 0) * g);
      if (needs(s)) {
        Mat ds(1, 1);
        ds(0, 0) = (g.array() * value(a).array()).sum();
        accumulate(s.id, ds);
      }
    };
  }
  return c;
}

Var Tape::tanh(Var a) {
  Var c = push(value(a).array().tanh().matrix(), needs(a));
  if (needs(c)) {
    nodes_[c.id].back = [this, a, c] {
      const Mat& y = value(c);
      accumulate(a.id, (nodes_[c.id].grad.array() * (1.0 - y.array().square())).matrix());
    };
  }
  return c;
}

Var Tape::relu(Var a) {
  Var c = push(value(a).cwiseMax(0.0), needs(a));
  if (needs(c)) {
    nodes_[c.id].back = [this, a, c] {
      const Mat mask = (value(a).array() > 0.0).cast<double>().matrix();
      accumulate(a.id, nodes_[c.id].grad.cwiseProduct(mask));
    };
  }
  return c;
}

Var Tape::add_constant(Var a, const Mat& k) {
  Var c = push(value(a) + k, needs(a));
  if (needs(c)) {
    nodes_[c.id].back = [this, a, c] { accumulate(a.id, nodes_[c.id].grad); };
  }
  return c;
}

Var Tape::softmax_rows(Var a) {
  const Mat& x = value(a);
  Mat p(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double mx = x.row(i).maxCoeff();
    if (!std::isfinite(mx)) throw LogicError("softmax over an empty row");
    double total = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      p(i, j) = std::isinf(x(i, j)) ? 0.0 : std::exp(x(i, j) - mx);
      total += p(i, j);
    }
    p.row(i) /= total;
  }
  Var c = push(std::move(p), needs(a));
  if (needs(c)) {
    nodes_[c.id].back = [this, a, c] {
      const Mat& y = value(c);
      const Mat& g = nodes_[c.id].grad;
      const Eigen::VectorXd dots = (g.array() * y.array()).rowwise().sum();
      Mat dx = y.array() * (g.colwise() - dots).array();
      accumulate(a.id, dx);
    };
  }
  return c;
}

Var Tape::layer_norm(Var a, Var gain, Var bias, double eps) {
  const Mat& x = value(a);
  const Eigen::Index cols = x.cols();
  Mat xhat(x.rows(), cols);
  Eigen::VectorXd inv(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double mu = x.row(i).mean();
    const double var = (x.row(i).array() - mu).square().mean();
    inv(i) = 1.0 / std::sqrt(var + eps);
    xhat.row(i) = (x.row(i).array() - mu) * inv(i);
  }
  Mat y = xhat.array().rowwise() * value(gain).row(0).array();
  y.rowwise() += value(bias).row(0);
  Var c = push(std::move(y), needs(a) || needs(gain) || needs(bias));
  if (needs(c)) {
    nodes_[c.id].back = [this, a, gain, bias, c, xhat = std::move(xhat), inv = std::move(inv)] {
      const Mat& g = nodes_[c.id].grad;
      if (needs(gain)) accumulate(gain.id, (g.array() * xhat.array()).colwise().sum().matrix());
      if (needs(bias)) accumulate(bias.id, g.colwise().sum());
      if (needs(a)) {
        const Mat dxhat = g.array().rowwise() * value(gain).row(0).array();
        Mat dx(dxhat.rows(), dxhat.cols());
        for (Eigen::Index i = 0; i < dxhat.rows(); ++i) {
          const double m1 = dxhat.row(i).mean();
          const double m2 = (dxhat.row(i).array() * xhat.row(i).array()).mean();
          dx.row(i) = inv(i) * (dxhat.row(i).array() - m1 - xhat.row(i).array() * m2);
        }
        accumulate(a.id, dx);
      }
    };
  }
  return c;
}

Var Tape::concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw LogicError("concat of nothing");
  const Eigen::Index rows = value(parts[0]).rows();
  Eigen::Index cols = 0;
  bool grad = false;
  for (Var p : parts) {
    if (value(p).rows() != rows) throw LogicError("concat_cols: row mismatch");
    cols += value(p).cols();
    grad = grad || needs(p);
  }
  Mat out(rows, cols);
  Eigen::Index at = 0;
  for (Var p : parts) {
    out.middleCols(at, value(p).cols()) = value(p);
    at += value(p).cols();
  }
  Var c = push(std::move(out), grad);
  if (needs(c)) {
    nodes_[c.id].back = [this, c, ids = std::vector<Var>(parts.begin(), parts.end())] {
      const Mat& g = nodes_[c.id].grad;
      Eigen::Index at = 0;
      for (Var p : ids) {
        const Eigen::Index w = value(p).cols();
        if (needs(p)) accumulate(p.id, g.middleCols(at, w));
        at += w;
      }
    };
  }
  return c;
}

Var Tape::row(Var a, int i) {
  Var c = push(value(a).row(i), needs(a));
  if (needs(c)) {
    nodes_[c.id].back = [this, a, c, i] {
      Mat g = Mat::Zero(value(a).rows(), value(a).cols());
      g.row(i) = nodes_[c.id].grad;
      accumulate(a.id, g);
    };
  }
  return c;
}

Var Tape::mean_rows(Var a) {
  Var c = push(value(a).colwise().mean(), needs(a));
  if (needs(c)) {
    nodes_[c.id].back = [this, a, c] {
      const double k = 1.0 / static_cast<double>(value(a).rows());
      accumulate(a.id, (k * nodes_[c.id].grad).replicate(value(a).rows(), 1));
    };
  }
  return c;
}

Var Tape::log_prob_entropy(Var z, std::span<const std::uint8_t> allowed, int action, double t) {
  const Mat& zv = value(z);
  const Eigen::Index n = zv.rows();
  if (zv.cols() != 1 || static_cast<std::size_t>(n) != allowed.size()) {
    throw LogicError("log_prob_entropy: shape mismatch");
  }
  if (action < 0 || action >= n || !allowed[action]) throw LogicError("action not allowed");
  double mx = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (allowed[j]) mx = std::max(mx, zv(j, 0) / t);
  }
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd logp = Eigen::VectorXd::Zero(n);
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (allowed[j]) total += std::exp(zv(j, 0) / t - mx);
  }
  const double lse = mx + std::log(total);
  double entropy = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!allowed[j]) continue;
    logp(j) = zv(j, 0) / t - lse;
    p(j) = std::exp(logp(j));
    entropy -= p(j) * logp(j);
  }
  Mat out(1, 2);
  out << logp(action), entropy;
  Var c = push(std::move(out), needs(z));
  if (needs(c)) {
    std::vector<std::uint8_t> mask(allowed.begin(), allowed.end());
    nodes_[c.id].back = [this, z, c, action, t, entropy, p = std::move(p), logp = std::move(logp),
                         mask = std::move(mask)] {
      const Mat& g = nodes_[c.id].grad;
      Mat dz = Mat::Zero(p.size(), 1);
      for (Eigen::Index j = 0; j < p.size(); ++j) {
        if (!mask[j]) continue;
        const double dlogp = (j == action ? 1.0 : 0.0) - p(j);
        const double dent = -p(j) * (logp(j) + entropy);
        dz(j, 0) = (g(0, 0) * dlogp + g(0, 1) * dent) / t;
      }
      accumulate(z.id, dz);
    };
  }
  return c;
}

void Tape::backward(std::span<const std::pair<Var, Mat>> seeds, std::span<double> grad) {
  if (!record_) throw LogicError("backward on a non-recording tape");
  for (Node& n : nodes_) n.grad.resize(0, 0);
  int top = -1;
  for (const auto& [v, g] : seeds) {
    if (g.rows() != value(v).rows() || g.cols() != value(v).cols()) {
      throw LogicError("backward: seed shape mismatch");
    }
    accumulate(v.id, g);
    top = std::max(top, v.id);
  }
  for (int id = top; id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.grad.size() == 0) continue;
    if (n.back) n.back();
    if (n.param_offset >= 0) {
      const auto off = static_cast<std::size_t>(n.param_offset);
      if (off + n.grad.size() > grad.size()) throw LogicError("gradient buffer too small");
      Eigen::Map<Mat>(grad.data() + off, n.grad.rows(), n.grad.cols()) += n.grad;
    }
  }
}

}  // namespace hexcover::ad
