#pragma once

// Cross-entropy loss, backpropagation through time, SGD and the epoch loop.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hgr/error.hpp"
#include "hgr/network.hpp"
#include "hgr/rng.hpp"

namespace hgr {

struct LabeledSequence {
  GestureSequence sequence;
  int label = 0;
  std::string id;  // free-form origin tag, used in prediction logs
};

/// Gradient tensors, shape-congruent with the model they were computed for.
struct GradientSet {
  DlstmModel d;

  static GradientSet zeros_like(const DlstmModel& model) {
    return {DlstmModel::zeros(model.dims())};
  }

  double squared_norm() const {
    double s = 0.0;
    d.for_each_tensor([&](const std::string&, const auto& t) { s += t.squaredNorm(); });
    return s;
  }
  double norm() const { return std::sqrt(squared_norm()); }

  bool all_finite() const {
    bool ok = true;
    d.for_each_tensor([&](const std::string&, const auto& t) { ok = ok && t.allFinite(); });
    return ok;
  }
};

inline void check_label(const DlstmModel& model, int label) {
  if (label < 0 || label >= model.dims().classes) {
    throw Error(ErrorKind::BadLabel, "label " + std::to_string(label) + " outside [0, " +
                                         std::to_string(model.dims().classes) + ")");
  }
}

/// -ln p(label), from the logits via log-sum-exp.
inline double nll_from_logits(const VectorXd& logits, int label) {
  Eigen::Index top = 0;
  const double m = logits.maxCoeff(&top);
  double rest = 0.0;  // sum of exp(l_k - m) over k != top
  for (Eigen::Index k = 0; k < logits.size(); ++k) {
    if (k != top) rest += std::exp(logits[k] - m);
  }
  return (m - logits[label]) + std::log1p(rest);
}

/// Summed negative log-likelihood over the batch.
inline double loss(const DlstmModel& model, std::span<const LabeledSequence> batch) {
  if (batch.empty()) throw Error(ErrorKind::EmptySequence, "empty batch");
  double total = 0.0;
  for (const auto& item : batch) {
    check_label(model, item.label);
    total += nll_from_logits(forward(model, item.sequence).logits, item.label);
  }
  return total;
}

/// Accumulates d(-ln p(label))/d(theta) for one sequence into `grads` and
/// returns that sequence's loss.
inline double accumulate_gradient(const DlstmModel& model, const LabeledSequence& item,
                                  GradientSet& grads) {
  check_label(model, item.label);
  const ForwardTrace tr = forward(model, item.sequence);
  const ModelDims& dims = model.dims();
  const Eigen::Index steps = item.sequence.x.cols();
  const int hdim = dims.hidden;
  const int top = dims.layers - 1;

  VectorXd dlogits = tr.probs;
  dlogits[item.label] -= 1.0;

  DlstmModel& g = grads.d;
  const LayerTrace& top_trace = tr.layers[static_cast<std::size_t>(top)];
  g.w_y().noalias() += dlogits * top_trace.h.rowwise().sum().transpose();
  g.b_y() += static_cast<double>(steps) * dlogits;
  const VectorXd dh_out = model.w_y().transpose() * dlogits;

  const VectorXd zero = VectorXd::Zero(hdim);
  std::vector<VectorXd> dh_next(static_cast<std::size_t>(dims.layers), zero);
  std::vector<VectorXd> dc_next(static_cast<std::size_t>(dims.layers), zero);

  VectorXd dh, dc, tc, dzi, dzf, dzc, dzo, c_prev, h_prev, dh_prev, dh_below;
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    VectorXd dh_from_above;
    for (int l = top; l >= 0; --l) {
      const auto li = static_cast<std::size_t>(l);
      const LayerTrace& lt = tr.layers[li];
      const LstmLayerParams& p = model.layers()[li];
      LstmLayerParams& gp = g.layers()[li];

      dh = dh_next[li] + (l == top ? dh_out : dh_from_above);
      c_prev = t > 0 ? VectorXd(lt.c.col(t - 1)) : zero;
      h_prev = t > 0 ? VectorXd(lt.h.col(t - 1)) : zero;
      const auto i = lt.i.col(t).array();
      const auto f = lt.f.col(t).array();
      const auto gc = lt.g.col(t).array();
      const auto o = lt.o.col(t).array();
      tc = lt.c.col(t).array().tanh().matrix();

      dzo = (dh.array() * tc.array() * o * (1.0 - o)).matrix();
      dc = dc_next[li] + (dh.array() * o * (1.0 - tc.array().square())).matrix();
      dzi = (dc.array() * gc * i * (1.0 - i)).matrix();
      dzc = (dc.array() * i * (1.0 - gc.square())).matrix();
      dzf = (dc.array() * c_prev.array() * f * (1.0 - f)).matrix();

      dc_next[li] = dc.cwiseProduct(lt.f.col(t)) + p.input.peep.cwiseProduct(dzi) +
                    p.forget.peep.cwiseProduct(dzf) + p.output.peep.cwiseProduct(dzo);

      const VectorXd x = item.sequence.x.col(t);
      const VectorXd* dzs[4] = {&dzi, &dzf, &dzc, &dzo};
      const GateParams* ps[4] = {&p.input, &p.forget, &p.cell, &p.output};
      GateParams* gs[4] = {&gp.input, &gp.forget, &gp.cell, &gp.output};
      dh_prev = zero;
      if (l > 0) dh_below = zero;
      for (int k = 0; k < 4; ++k) {
        const VectorXd& dz = *dzs[k];
        gs[k]->w_x.noalias() += dz * x.transpose();
        gs[k]->w_h.noalias() += dz * h_prev.transpose();
        gs[k]->bias += dz;
        if (gs[k]->peep.size() > 0) gs[k]->peep += dz.cwiseProduct(c_prev);
        dh_prev.noalias() += ps[k]->w_h.transpose() * dz;
        if (l > 0) {
          const auto h_below = tr.layers[li - 1].h.col(t);
          gs[k]->w_below.noalias() += dz * h_below.transpose();
          dh_below.noalias() += ps[k]->w_below.transpose() * dz;
        }
      }
      dh_next[li] = dh_prev;
      if (l > 0) dh_from_above = dh_below;
    }
  }
  return nll_from_logits(tr.logits, item.label);
}

struct LossAndGrads {
  double loss = 0.0;
  GradientSet grads;
};

/// Exact gradients of the summed batch loss. Items are reduced in batch order.
inline LossAndGrads backward(const DlstmModel& model, std::span<const LabeledSequence> batch) {
  if (batch.empty()) throw Error(ErrorKind::EmptySequence, "empty batch");
  LossAndGrads out{0.0, GradientSet::zeros_like(model)};
  for (const auto& item : batch) out.loss += accumulate_gradient(model, item, out.grads);
  return out;
}

/// theta <- theta - lr * grad. With clip > 0 the gradient is first rescaled so
/// its global L2 norm does not exceed clip.
inline void sgd_step(DlstmModel& model, const GradientSet& grads, double lr,
                     std::optional<double> clip = std::nullopt) {
  double scale = lr;
  if (clip && *clip > 0.0) {
    const double n = grads.norm();
    if (n > *clip) scale *= *clip / n;
  }
  DlstmModel::zip_tensors(model, grads.d,
                          [&](const std::string&, auto& theta, const auto& g) { theta -= scale * g; });
}

struct TrainConfig {
  double learning_rate = 1e-4;
  int epochs = 800;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
  bool shuffle = true;
  std::optional<double> clip;  // global-norm threshold; off by default
  int checkpoint_every = 0;    // epochs between periodic checkpoints, 0 = never
};

struct EpochMetrics {
  int epoch = 0;
  std::size_t iterations = 0;  // cumulative SGD steps
  double train_loss = 0.0;     // mean per sequence, after the epoch
  double train_loss_sum = 0.0;
  double train_acc = 0.0;
  double val_loss = std::numeric_limits<double>::quiet_NaN();
  double val_acc = std::numeric_limits<double>::quiet_NaN();
  double wall_ms = 0.0;

  friend bool operator==(const EpochMetrics& a, const EpochMetrics& b) {
    auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    return a.epoch == b.epoch && a.iterations == b.iterations && same(a.train_loss, b.train_loss) &&
           same(a.train_loss_sum, b.train_loss_sum) && same(a.train_acc, b.train_acc) &&
           same(a.val_loss, b.val_loss) && same(a.val_acc, b.val_acc);
  }
};

struct SetMetrics {
  double loss_sum = 0.0;
  double mean_loss = 0.0;
  double accuracy = 0.0;
};

inline SetMetrics measure(const DlstmModel& model, std::span<const LabeledSequence> set) {
  SetMetrics m;
  if (set.empty()) return m;
  std::size_t correct = 0;
  for (const auto& item : set) {
    check_label(model, item.label);
    const ForwardTrace tr = forward(model, item.sequence);
    m.loss_sum += nll_from_logits(tr.logits, item.label);
    if (argmax(tr.probs) == item.label) ++correct;
  }
  m.mean_loss = m.loss_sum / static_cast<double>(set.size());
  m.accuracy = static_cast<double>(correct) / static_cast<double>(set.size());
  return m;
}

struct TrainResult {
  DlstmModel model;       // parameters after the last epoch
  DlstmModel best_model;  // lowest validation loss (training loss without a validation set)
  int best_epoch = 0;     // 0 = the initial model
  std::vector<EpochMetrics> history;
};

/// Called after every epoch with the metrics and the current parameters.
using EpochObserver = std::function<void(const EpochMetrics&, const DlstmModel&)>;

inline TrainResult train(DlstmModel model, std::span<const LabeledSequence> train_set,
                         std::span<const LabeledSequence> val_set, const TrainConfig& config,
                         const EpochObserver& observer = {}) {
  if (!(config.learning_rate > 0.0)) throw Error(ErrorKind::BadConfig, "learning_rate must be > 0");
  if (config.batch_size < 1) throw Error(ErrorKind::BadConfig, "batch_size must be >= 1");
  if (config.epochs < 0) throw Error(ErrorKind::BadConfig, "epochs must be >= 0");
  for (const auto& s : train_set) check_label(model, s.label);
  for (const auto& s : val_set) check_label(model, s.label);

  TrainResult result{model, model, 0, {}};
  if (config.epochs == 0 || train_set.empty()) return result;

  double best = std::numeric_limits<double>::infinity();
  Rng rng(config.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<LabeledSequence> batch;
  std::size_t iterations = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    if (config.shuffle) rng.shuffle(order);
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      LossAndGrads lg{0.0, GradientSet::zeros_like(model)};
      for (std::size_t k = begin; k < end; ++k) {
        lg.loss += accumulate_gradient(model, train_set[order[k]], lg.grads);
      }
      ++iterations;
      if (!std::isfinite(lg.loss) || !lg.grads.all_finite()) {
        throw Error(ErrorKind::NanLoss, "non-finite loss at iteration " + std::to_string(iterations) +
                                            " (epoch " + std::to_string(epoch) + ")");
      }
      sgd_step(model, lg.grads, config.learning_rate, config.clip);
    }

    EpochMetrics em;
    em.epoch = epoch;
    em.iterations = iterations;
    const SetMetrics tm = measure(model, train_set);
    em.train_loss = tm.mean_loss;
    em.train_loss_sum = tm.loss_sum;
    em.train_acc = tm.accuracy;
    if (!val_set.empty()) {
      const SetMetrics vm = measure(model, val_set);
      em.val_loss = vm.mean_loss;
      em.val_acc = vm.accuracy;
    }
    if (!std::isfinite(em.train_loss)) {
      throw Error(ErrorKind::NanLoss, "non-finite loss after iteration " + std::to_string(iterations));
    }
    em.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
                     .count();
    const double score = val_set.empty() ? em.train_loss : em.val_loss;
    if (score < best) {
      best = score;
      result.best_model = model;
      result.best_epoch = epoch;
    }
    result.history.push_back(em);
    if (observer) observer(em, model);
  }
  result.model = std::move(model);
  return result;
}

}  // namespace hgr
