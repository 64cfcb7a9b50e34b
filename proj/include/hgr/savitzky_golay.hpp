#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hgr/error.hpp"

namespace hgr {

/// Savitzky-Golay smoother. The weight table is built once per (window, order):
/// row s holds the weights that evaluate the least-squares polynomial fitted
/// over one window at window position s. Interior samples use the centre row;
/// the first and last half-window evaluate the boundary window's fit.
class SavitzkyGolay {
 public:
  SavitzkyGolay(int window, int order) : window_(window), order_(order) {
    if (window < 1 || window % 2 == 0 || order < 0 || window <= order) {
      throw Error(ErrorKind::BadFilterParams,
                  "window=" + std::to_string(window) + " order=" + std::to_string(order));
    }
    const int half = window / 2;
    Eigen::MatrixXd vander(window, order + 1);
    for (int r = 0; r < window; ++r) {
      const double x = static_cast<double>(r - half) / (half > 0 ? half : 1);
      double p = 1.0;
      for (int c = 0; c <= order; ++c) {
        vander(r, c) = p;
        p *= x;
      }
    }
    // Hat matrix V (V^T V)^-1 V^T via QR: H = Q1 Q1^T.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(vander);
    const Eigen::MatrixXd q1 =
        qr.householderQ() * Eigen::MatrixXd::Identity(window, order + 1);
    weights_ = q1 * q1.transpose();
  }

  int window() const { return window_; }
  int order() const { return order_; }

  std::vector<double> apply(std::span<const double> values) const {
    const auto n = static_cast<std::ptrdiff_t>(values.size());
    if (n < window_) {
      throw Error(ErrorKind::TrackTooShort, "track length " + std::to_string(n) + " < window " +
                                                std::to_string(window_));
    }
    const int half = window_ / 2;
    std::vector<double> out(values.size());
    auto eval = [&](std::ptrdiff_t start, int row) {
      // Weighted offsets from the evaluated sample; flat runs come back bit-exact.
      const double anchor = values[start + row];
      double acc = 0.0;
      for (int k = 0; k < window_; ++k) acc += weights_(row, k) * (values[start + k] - anchor);
      return anchor + acc;
    };
    for (std::ptrdiff_t t = 0; t < n; ++t) {
      if (t < half) {
        out[t] = eval(0, static_cast<int>(t));
      } else if (t >= n - half) {
        out[t] = eval(n - window_, static_cast<int>(t - (n - window_)));
      } else {
        out[t] = eval(t - half, half);
      }
    }
    return out;
  }

 private:
  int window_;
  int order_;
  Eigen::MatrixXd weights_;
};

inline std::vector<double> savgol_smooth(std::span<const double> values, int window, int order) {
  return SavitzkyGolay(window, order).apply(values);
}

}  // namespace hgr
