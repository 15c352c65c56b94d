#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "acsf/tensor.hpp"

namespace acsf::testing {

/// Maximum relative error between analytic gradients (one backward pass) and
/// central finite differences of the rebuilt loss. The relative error uses
/// max(|analytic|, |fd|, floor) as denominator; pairs where both sides are
/// below 1e-10 are treated as matching zeros.
inline double fd_max_rel_err(std::vector<Tensor> params,
                             const std::function<Tensor()>& loss_fn,
                             double step = 1e-5, double denom_floor = 1e-4) {
  for (Tensor& p : params) p.zero_grad();
  backward(loss_fn());
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (Tensor& p : params)
    analytic.emplace_back(p.grad().begin(), p.grad().end());

  double max_err = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto w = params[i].mutable_values();
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double orig = w[j];
      w[j] = orig + step;
      const double fp = loss_fn().item();
      w[j] = orig - step;
      const double fm = loss_fn().item();
      w[j] = orig;
      const double fd = (fp - fm) / (2.0 * step);
      const double an = analytic[i][j];
      if (std::max(std::abs(an), std::abs(fd)) < 1e-10) continue;
      const double denom =
          std::max({std::abs(an), std::abs(fd), denom_floor});
      max_err = std::max(max_err, std::abs(an - fd) / denom);
    }
  }
  return max_err;
}

}  // namespace acsf::testing
