#pragma once

// Stacked peephole LSTM with a summed-over-time softmax head.
//
// For layer l at instant t (h_below = h_{l-1,t}, absent for l = 0):
//   i = sigm(Wx_i x_t + Wh_i h_{t-1} + Wb_i h_below + p_i . c_{t-1} + b_i)
//   f = sigm(Wx_f x_t + Wh_f h_{t-1} + Wb_f h_below + p_f . c_{t-1} + b_f)
//   g = tanh(Wx_c x_t + Wh_c h_{t-1} + Wb_c h_below + b_c)
//   c = f . c_{t-1} + i . g
//   o = sigm(Wx_o x_t + Wh_o h_{t-1} + Wb_o h_below + p_o . c_{t-1} + b_o)
//   h = o . tanh(c)
// The raw input x_t feeds every layer. The output-gate peephole reads c_{t-1}.
// Head: y_t = W_y h_{N-1,t} + b_y, logits = sum_t y_t, probs = softmax(logits).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hgr/error.hpp"
#include "hgr/features.hpp"
#include "hgr/rng.hpp"
#include "hgr/sampling.hpp"

namespace hgr {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct ModelDims {
  int input = static_cast<int>(kFeatureDim);  // D
  int hidden = 200;                           // H
  int layers = 4;                             // N
  int classes = 2;                            // K

  friend bool operator==(const ModelDims&, const ModelDims&) = default;

  std::string to_string() const {
    return "D=" + std::to_string(input) + " H=" + std::to_string(hidden) +
           " N=" + std::to_string(layers) + " K=" + std::to_string(classes);
  }
};

/// Parameters feeding one gate (or the cell candidate).
struct GateParams {
  MatrixXd w_x;      // H x D
  MatrixXd w_h;      // H x H, recurrent
  MatrixXd w_below;  // H x H for layers above the first, otherwise 0 x 0
  VectorXd peep;     // H element-wise peephole; empty for the cell candidate
  VectorXd bias;     // H
};

struct LstmLayerParams {
  GateParams input;
  GateParams forget;
  GateParams cell;
  GateParams output;
};

inline constexpr const char* kGateNames[4] = {"input", "forget", "cell", "output"};

class DlstmModel {
 public:
  DlstmModel() = default;

  /// All parameters zero, correctly shaped.
  static DlstmModel zeros(const ModelDims& dims) {
    if (dims.input < 1 || dims.hidden < 1 || dims.layers < 1 || dims.classes < 1) {
      throw Error(ErrorKind::ShapeMismatch, "invalid dims " + dims.to_string());
    }
    DlstmModel m;
    m.dims_ = dims;
    const int d = dims.input;
    const int h = dims.hidden;
    m.layers_.resize(static_cast<std::size_t>(dims.layers));
    for (int l = 0; l < dims.layers; ++l) {
      auto& layer = m.layers_[static_cast<std::size_t>(l)];
      GateParams* gates[4] = {&layer.input, &layer.forget, &layer.cell, &layer.output};
      for (int g = 0; g < 4; ++g) {
        gates[g]->w_x = MatrixXd::Zero(h, d);
        gates[g]->w_h = MatrixXd::Zero(h, h);
        gates[g]->w_below = l > 0 ? MatrixXd::Zero(h, h) : MatrixXd(0, 0);
        gates[g]->peep = g == 2 ? VectorXd(0) : VectorXd::Zero(h);
        gates[g]->bias = VectorXd::Zero(h);
      }
    }
    m.w_y_ = MatrixXd::Zero(dims.classes, h);
    m.b_y_ = VectorXd::Zero(dims.classes);
    return m;
  }

  /// Uniform [-1/sqrt(H), 1/sqrt(H)] weights and peepholes, zero biases except
  /// the forget bias (1.0).
  static DlstmModel random(const ModelDims& dims, std::uint64_t seed) {
    DlstmModel m = zeros(dims);
    m.init_seed_ = seed;
    Rng rng(seed);
    const double s = 1.0 / std::sqrt(static_cast<double>(dims.hidden));
    m.for_each_tensor([&](const std::string& name, auto& t) {
      if (name.ends_with(".b") || name == "out.b_y") return;
      for (Eigen::Index k = 0; k < t.size(); ++k) t.data()[k] = rng.uniform(-s, s);
    });
    for (auto& layer : m.layers_) layer.forget.bias.setConstant(1.0);
    return m;
  }

  const ModelDims& dims() const { return dims_; }
  std::uint64_t init_seed() const { return init_seed_; }
  void set_init_seed(std::uint64_t s) { init_seed_ = s; }

  const std::vector<LstmLayerParams>& layers() const { return layers_; }
  std::vector<LstmLayerParams>& layers() { return layers_; }
  const MatrixXd& w_y() const { return w_y_; }
  MatrixXd& w_y() { return w_y_; }
  const VectorXd& b_y() const { return b_y_; }
  VectorXd& b_y() { return b_y_; }

  /// Visits every parameter tensor as (name, tensor) in a fixed order. Empty
  /// tensors (first-layer W_below, cell-candidate peephole) are skipped.
  template <class F>
  void for_each_tensor(F&& f) {
    visit_all(*this, std::forward<F>(f));
  }
  template <class F>
  void for_each_tensor(F&& f) const {
    visit_all(*this, std::forward<F>(f));
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for_each_tensor([&](const std::string&, const auto& t) { n += static_cast<std::size_t>(t.size()); });
    return n;
  }

  friend bool operator==(const DlstmModel& a, const DlstmModel& b) {
    if (!(a.dims_ == b.dims_) || a.init_seed_ != b.init_seed_) return false;
    bool same = true;
    zip_tensors(a, b, [&](const std::string&, const auto& x, const auto& y) {
      same = same && x.rows() == y.rows() && x.cols() == y.cols() && x == y;
    });
    return same;
  }

  /// Calls f(name, a_tensor, b_tensor) for congruent models.
  template <class A, class B, class F>
  static void zip_tensors(A& a, B& b, F&& f) {
    if (!(a.dims() == b.dims())) {
      throw Error(ErrorKind::ShapeMismatch, a.dims().to_string() + " vs " + b.dims().to_string());
    }
    for (std::size_t l = 0; l < a.layers_.size(); ++l) {
      auto& la = a.layers_[l];
      auto& lb = b.layers_[l];
      zip_gate(tensor_prefix(l, 0), la.input, lb.input, f);
      zip_gate(tensor_prefix(l, 1), la.forget, lb.forget, f);
      zip_gate(tensor_prefix(l, 2), la.cell, lb.cell, f);
      zip_gate(tensor_prefix(l, 3), la.output, lb.output, f);
    }
    f(std::string("out.W_y"), a.w_y_, b.w_y_);
    f(std::string("out.b_y"), a.b_y_, b.b_y_);
  }

 private:
  static std::string tensor_prefix(std::size_t layer, int gate) {
    return "layer" + std::to_string(layer) + "." + kGateNames[gate] + ".";
  }

  template <class GA, class GB, class F>
  static void zip_gate(const std::string& prefix, GA& a, GB& b, F& f) {
    f(prefix + "W_x", a.w_x, b.w_x);
    f(prefix + "W_h", a.w_h, b.w_h);
    if (a.w_below.size() > 0) f(prefix + "W_below", a.w_below, b.w_below);
    if (a.peep.size() > 0) f(prefix + "w_peep", a.peep, b.peep);
    f(prefix + "b", a.bias, b.bias);
  }

  template <class M, class F>
  static void visit_all(M& m, F&& f) {
    zip_tensors(m, m, [&](const std::string& name, auto& t, auto&) { f(name, t); });
  }

  ModelDims dims_{};
  std::vector<LstmLayerParams> layers_;
  MatrixXd w_y_;
  VectorXd b_y_;
  std::uint64_t init_seed_ = 0;
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct CellStep {
  VectorXd h;
  VectorXd c;
  VectorXd i;
  VectorXd f;
  VectorXd g;  // cell candidate tanh(.)
  VectorXd o;
};

inline VectorXd gate_preactivation(const GateParams& p, const VectorXd& x, const VectorXd& h_prev,
                                   const VectorXd& c_prev, const VectorXd* h_below) {
  VectorXd z = p.bias;
  z.noalias() += p.w_x * x;
  z.noalias() += p.w_h * h_prev;
  if (h_below != nullptr) z.noalias() += p.w_below * *h_below;
  if (p.peep.size() > 0) z += p.peep.cwiseProduct(c_prev);
  return z;
}

/// One LSTM step. `h_below` must be null exactly for the bottom layer.
inline CellStep lstm_cell_step(const LstmLayerParams& layer, const VectorXd& x,
                               const VectorXd& h_prev, const VectorXd& c_prev,
                               const VectorXd* h_below) {
  const Eigen::Index h = layer.input.bias.size();
  const bool has_below = layer.input.w_below.size() > 0;
  if (x.size() != layer.input.w_x.cols() || h_prev.size() != h || c_prev.size() != h ||
      has_below != (h_below != nullptr) || (h_below != nullptr && h_below->size() != h)) {
    throw Error(ErrorKind::ShapeMismatch, "lstm_cell_step operand shapes");
  }
  auto sig = [](const VectorXd& z) -> VectorXd { return z.unaryExpr(&sigmoid); };
  CellStep s;
  s.i = sig(gate_preactivation(layer.input, x, h_prev, c_prev, h_below));
  s.f = sig(gate_preactivation(layer.forget, x, h_prev, c_prev, h_below));
  s.g = gate_preactivation(layer.cell, x, h_prev, c_prev, h_below).array().tanh().matrix();
  s.c = s.f.cwiseProduct(c_prev) + s.i.cwiseProduct(s.g);
  s.o = sig(gate_preactivation(layer.output, x, h_prev, c_prev, h_below));
  s.h = s.o.cwiseProduct(s.c.array().tanh().matrix());
  return s;
}

/// Activations of one layer over time; column t is instant t.
struct LayerTrace {
  MatrixXd i, f, g, o, c, h;  // H x T
};

struct ForwardTrace {
  std::vector<LayerTrace> layers;
  MatrixXd y;         // K x T per-instant outputs
  VectorXd logits;    // sum over t of y_t
  VectorXd probs;     // softmax(logits)
};

inline VectorXd softmax(const VectorXd& z) {
  const double m = z.maxCoeff();
  VectorXd e = (z.array() - m).exp().matrix();
  return e / e.sum();
}

inline void check_sequence_shape(const DlstmModel& model, const GestureSequence& seq) {
  if (seq.x.rows() != model.dims().input || seq.x.cols() < 1) {
    throw Error(ErrorKind::ShapeMismatch,
                "sequence is " + std::to_string(seq.x.rows()) + "x" + std::to_string(seq.x.cols()) +
                    ", model expects input " + std::to_string(model.dims().input));
  }
}

inline ForwardTrace forward(const DlstmModel& model, const GestureSequence& seq) {
  check_sequence_shape(model, seq);
  const ModelDims& dims = model.dims();
  const Eigen::Index steps = seq.x.cols();
  const int h = dims.hidden;

  ForwardTrace tr;
  tr.layers.resize(static_cast<std::size_t>(dims.layers));
  for (auto& lt : tr.layers) {
    for (MatrixXd* m : {&lt.i, &lt.f, &lt.g, &lt.o, &lt.c, &lt.h}) m->resize(h, steps);
  }
  tr.y.resize(dims.classes, steps);

  const VectorXd zero = VectorXd::Zero(h);
  for (Eigen::Index t = 0; t < steps; ++t) {
    const VectorXd x = seq.x.col(t);
    VectorXd below;
    for (int l = 0; l < dims.layers; ++l) {
      LayerTrace& lt = tr.layers[static_cast<std::size_t>(l)];
      const VectorXd h_prev = t > 0 ? VectorXd(lt.h.col(t - 1)) : zero;
      const VectorXd c_prev = t > 0 ? VectorXd(lt.c.col(t - 1)) : zero;
      CellStep s = lstm_cell_step(model.layers()[static_cast<std::size_t>(l)], x, h_prev, c_prev,
                                  l > 0 ? &below : nullptr);
      lt.i.col(t) = s.i;
      lt.f.col(t) = s.f;
      lt.g.col(t) = s.g;
      lt.o.col(t) = s.o;
      lt.c.col(t) = s.c;
      lt.h.col(t) = s.h;
      below = std::move(s.h);
    }
    tr.y.col(t).noalias() = model.w_y() * below;
    tr.y.col(t) += model.b_y();
  }
  tr.logits = tr.y.rowwise().sum();
  tr.probs = softmax(tr.logits);
  return tr;
}

/// Index of the largest entry; ties resolve to the lowest index.
inline int argmax(const VectorXd& v) {
  int best = 0;
  for (Eigen::Index k = 1; k < v.size(); ++k) {
    if (v[k] > v[best]) best = static_cast<int>(k);
  }
  return best;
}

struct Prediction {
  int label = 0;
  VectorXd probs;
};

inline Prediction predict(const DlstmModel& model, const GestureSequence& seq) {
  ForwardTrace tr = forward(model, seq);
  return {argmax(tr.probs), std::move(tr.probs)};
}

}  // namespace hgr
