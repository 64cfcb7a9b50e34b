#pragma once

// Central finite-difference verification of the analytic BPTT gradients.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hgr/network.hpp"
#include "hgr/rng.hpp"
#include "hgr/training.hpp"

namespace hgr {

/// Denominator floor for the relative error. Below it the comparison is
/// effectively absolute; central differences at step 1e-5 carry round-off of
/// order 1e-11 so a tiny true gradient cannot be resolved relatively anyway.
inline constexpr double kGradcheckFloor = 1e-7;

inline double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), kGradcheckFloor});
  return std::abs(analytic - numeric) / denom;
}

struct TensorCheck {
  std::string name;
  double max_rel_error = 0.0;
  Eigen::Index worst_index = 0;
  double analytic = 0.0;  // at worst_index
  double numeric = 0.0;
};

struct GradcheckReport {
  std::vector<TensorCheck> tensors;
  double tolerance = 0.0;
  bool passed = true;

  double max_rel_error() const {
    double m = 0.0;
    for (const auto& t : tensors) m = std::max(m, t.max_rel_error);
    return m;
  }
  /// Names of tensors whose worst entry exceeds the tolerance.
  std::vector<std::string> failing() const {
    std::vector<std::string> out;
    for (const auto& t : tensors) {
      if (!(t.max_rel_error < tolerance)) out.push_back(t.name);
    }
    return out;
  }
};

/// Compares `analytic` against central differences of loss(model, batch).
inline GradcheckReport compare_gradients(const DlstmModel& model,
                                         std::span<const LabeledSequence> batch,
                                         const GradientSet& analytic, double tolerance,
                                         double step = 1e-5) {
  GradcheckReport report;
  report.tolerance = tolerance;
  DlstmModel probe = model;
  std::vector<std::pair<std::string, std::vector<double>>> numeric_by_tensor;

  probe.for_each_tensor([&](const std::string& name, auto& t) {
    std::vector<double> num(static_cast<std::size_t>(t.size()));
    for (Eigen::Index k = 0; k < t.size(); ++k) {
      const double saved = t.data()[k];
      t.data()[k] = saved + step;
      const double up = loss(probe, batch);
      t.data()[k] = saved - step;
      const double down = loss(probe, batch);
      t.data()[k] = saved;
      num[static_cast<std::size_t>(k)] = (up - down) / (2.0 * step);
    }
    numeric_by_tensor.emplace_back(name, std::move(num));
  });

  std::size_t idx = 0;
  analytic.d.for_each_tensor([&](const std::string& name, const auto& t) {
    const auto& num = numeric_by_tensor[idx++].second;
    TensorCheck tc;
    tc.name = name;
    for (Eigen::Index k = 0; k < t.size(); ++k) {
      const double a = t.data()[k];
      const double n = num[static_cast<std::size_t>(k)];
      const double e = relative_error(a, n);
      if (e > tc.max_rel_error || std::isnan(e)) {
        tc.max_rel_error = std::isnan(e) ? std::numeric_limits<double>::infinity() : e;
        tc.worst_index = k;
        tc.analytic = a;
        tc.numeric = n;
      }
    }
    if (!(tc.max_rel_error < tolerance)) report.passed = false;
    report.tensors.push_back(std::move(tc));
  });
  return report;
}

/// Random sequences with N(0,1) features and uniform labels.
inline std::vector<LabeledSequence> random_batch(const ModelDims& dims, int steps, int count,
                                                 std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledSequence> batch(static_cast<std::size_t>(count));
  for (auto& item : batch) {
    item.sequence.x.resize(dims.input, steps);
    for (Eigen::Index k = 0; k < item.sequence.x.size(); ++k) item.sequence.x.data()[k] = rng.normal();
    item.label = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(dims.classes)));
  }
  return batch;
}

/// Random model and batch, analytic vs numeric. Biases are randomised too so
/// no tensor is checked only at its initial constant.
inline GradcheckReport gradcheck(const ModelDims& dims, int steps, std::uint64_t seed,
                                 double tolerance, int batch_size = 2, double step = 1e-5) {
  DlstmModel model = DlstmModel::random(dims, seed);
  Rng rng(mix_seed(seed, 1));
  model.for_each_tensor([&](const std::string& name, auto& t) {
    if (!name.ends_with(".b") && name != "out.b_y") return;
    for (Eigen::Index k = 0; k < t.size(); ++k) t.data()[k] = rng.uniform(-0.5, 0.5);
  });
  const auto batch = random_batch(dims, steps, batch_size, mix_seed(seed, 2));
  const LossAndGrads lg = backward(model, batch);
  return compare_gradients(model, batch, lg.grads, tolerance, step);
}

}  // namespace hgr
