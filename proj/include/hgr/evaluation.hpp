#pragma once

// Confusion matrix, accuracy and per-class / macro / micro precision, recall
// and F1.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hgr/error.hpp"
#include "hgr/network.hpp"
#include "hgr/training.hpp"

namespace hgr {

/// counts[true][predicted].
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int classes = 0)
      : k_(classes), counts_(static_cast<std::size_t>(classes * classes), 0) {}

  static ConfusionMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
    ConfusionMatrix m(static_cast<int>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows.size()) throw Error(ErrorKind::ShapeMismatch, "confusion not square");
      for (std::size_t c = 0; c < rows.size(); ++c) {
        if (rows[r][c] < 0) throw Error(ErrorKind::BadLabel, "negative count");
        m.at(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
      }
    }
    return m;
  }

  int classes() const { return k_; }
  std::int64_t& at(int truth, int predicted) { return counts_[index(truth, predicted)]; }
  std::int64_t at(int truth, int predicted) const { return counts_[index(truth, predicted)]; }

  void add(int truth, int predicted) { ++at(truth, predicted); }

  std::int64_t total() const {
    std::int64_t s = 0;
    for (auto c : counts_) s += c;
    return s;
  }
  std::int64_t trace() const {
    std::int64_t s = 0;
    for (int k = 0; k < k_; ++k) s += at(k, k);
    return s;
  }
  std::int64_t row_sum(int r) const {
    std::int64_t s = 0;
    for (int c = 0; c < k_; ++c) s += at(r, c);
    return s;
  }
  std::int64_t col_sum(int c) const {
    std::int64_t s = 0;
    for (int r = 0; r < k_; ++r) s += at(r, c);
    return s;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t index(int truth, int predicted) const {
    if (truth < 0 || truth >= k_ || predicted < 0 || predicted >= k_) {
      throw Error(ErrorKind::BadLabel, "class index outside confusion matrix");
    }
    return static_cast<std::size_t>(truth * k_ + predicted);
  }

  int k_;
  std::vector<std::int64_t> counts_;
};

/// Undefined entries (zero denominator) are empty optionals.
struct ClassMetrics {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

struct EvalReport {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f1 = 0.0;
  std::vector<ClassMetrics> per_class;
  ConfusionMatrix confusion;
};

namespace detail {
inline double mean_defined(const std::vector<ClassMetrics>& pcs,
                           std::optional<double> ClassMetrics::*field) {
  double s = 0.0;
  int n = 0;
  for (const auto& pc : pcs) {
    if (pc.*field) {
      s += *(pc.*field);
      ++n;
    }
  }
  return n > 0 ? s / n : 0.0;
}
}  // namespace detail

/// Metrics from a filled confusion matrix. Macro averages include only classes
/// whose metric is defined. Micro averages pool TP/FP/FN over all classes.
inline EvalReport report_from_confusion(const ConfusionMatrix& cm) {
  const std::int64_t total = cm.total();
  if (total == 0) throw Error(ErrorKind::EmptyTestSet, "confusion matrix is empty");
  EvalReport r;
  r.confusion = cm;
  r.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  std::int64_t tp_all = 0, fp_all = 0, fn_all = 0;
  for (int k = 0; k < cm.classes(); ++k) {
    const std::int64_t tp = cm.at(k, k);
    const std::int64_t fp = cm.col_sum(k) - tp;
    const std::int64_t fn = cm.row_sum(k) - tp;
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
    ClassMetrics pc;
    if (tp + fp > 0) pc.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) pc.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    // 2PR/(P+R) written over integer counts: one rounding instead of four.
    if (pc.precision && pc.recall) {
      pc.f1 = static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn);
    }
    r.per_class.push_back(pc);
  }
  r.macro_precision = detail::mean_defined(r.per_class, &ClassMetrics::precision);
  r.macro_recall = detail::mean_defined(r.per_class, &ClassMetrics::recall);
  r.macro_f1 = detail::mean_defined(r.per_class, &ClassMetrics::f1);
  r.micro_precision = static_cast<double>(tp_all) / static_cast<double>(tp_all + fp_all);
  r.micro_recall = static_cast<double>(tp_all) / static_cast<double>(tp_all + fn_all);
  const double ps = r.micro_precision + r.micro_recall;
  r.micro_f1 = ps > 0.0 ? 2.0 * r.micro_precision * r.micro_recall / ps : 0.0;
  return r;
}

struct PredictionRecord {
  std::string id;
  int truth = 0;
  int predicted = 0;
  VectorXd probs;
};

struct Evaluation {
  EvalReport report;
  std::vector<PredictionRecord> predictions;
};

inline Evaluation evaluate_detailed(const DlstmModel& model, std::span<const LabeledSequence> test) {
  if (test.empty()) throw Error(ErrorKind::EmptyTestSet, "no test sequences");
  ConfusionMatrix cm(model.dims().classes);
  Evaluation ev;
  for (const auto& item : test) {
    check_label(model, item.label);
    Prediction p = predict(model, item.sequence);
    cm.add(item.label, p.label);
    ev.predictions.push_back({item.id, item.label, p.label, std::move(p.probs)});
  }
  ev.report = report_from_confusion(cm);
  return ev;
}

inline EvalReport evaluate(const DlstmModel& model, std::span<const LabeledSequence> test) {
  return evaluate_detailed(model, test).report;
}

struct RenderedConfusion {
  std::string text;
  std::string csv;
};

/// Fixed-width text grid and CSV. With `normalize`, each row is rendered as
/// percentages of its row total (an all-zero row stays all zeros).
inline RenderedConfusion render_confusion(const ConfusionMatrix& cm, bool normalize,
                                          const std::vector<std::string>& labels = {}) {
  const int k = cm.classes();
  auto label = [&](int i) {
    return i < static_cast<int>(labels.size()) ? labels[static_cast<std::size_t>(i)]
                                               : std::to_string(i);
  };
  auto cell = [&](int r, int c) {
    char buf[32];
    if (normalize) {
      const std::int64_t rs = cm.row_sum(r);
      const double pct = rs > 0 ? 100.0 * static_cast<double>(cm.at(r, c)) / static_cast<double>(rs) : 0.0;
      std::snprintf(buf, sizeof buf, "%.2f", pct);
    } else {
      std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(cm.at(r, c)));
    }
    return std::string(buf);
  };

  std::ostringstream csv;
  csv << "true\\pred";
  for (int c = 0; c < k; ++c) csv << ',' << label(c);
  csv << '\n';
  for (int r = 0; r < k; ++r) {
    csv << label(r);
    for (int c = 0; c < k; ++c) csv << ',' << cell(r, c);
    csv << '\n';
  }

  std::size_t width = 6;
  for (int i = 0; i < k; ++i) width = std::max(width, label(i).size());
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) width = std::max(width, cell(r, c).size());
  }
  auto pad = [&](const std::string& s) { return std::string(width + 1 - s.size(), ' ') + s; };
  std::ostringstream txt;
  txt << pad("");
  for (int c = 0; c < k; ++c) txt << pad(label(c));
  txt << '\n';
  for (int r = 0; r < k; ++r) {
    txt << pad(label(r));
    for (int c = 0; c < k; ++c) txt << pad(cell(r, c));
    txt << '\n';
  }
  return {txt.str(), csv.str()};
}

}  // namespace hgr
