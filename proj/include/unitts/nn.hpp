// Copyright (c) 2026 The unitts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cblas.h>

#include <cmath>
#include <functional>
#include <vector>

#include "unitts/common.hpp"

namespace unitts {

// C[m x n] (+)= A_op[m x k] * B_op[k x n], row-major. The float instantiation
// goes through BLAS; the double one is a plain loop and exists for
// finite-difference gradient checks.
template <typename T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a, const T* b, T beta,
          T* c) {
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int p = 0; p < k; ++p) {
        T av = trans_a ? a[static_cast<size_t>(p) * m + i] : a[static_cast<size_t>(i) * k + p];
        T bv = trans_b ? b[static_cast<size_t>(j) * k + p] : b[static_cast<size_t>(p) * n + j];
        acc += double(av) * double(bv);
      }
      c[static_cast<size_t>(i) * n + j] =
          static_cast<T>(alpha * acc + (beta == T(0) ? 0.0 : double(beta) * c[static_cast<size_t>(i) * n + j]));
    }
}

template <>
inline void gemm<float>(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a,
                        const float* b, float beta, float* c) {
  static const bool init = [] {
    openblas_set_num_threads(1);  // single-threaded: bit-stable runs
    return true;
  }();
  (void)init;
  cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
              trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, trans_a ? m : k, b,
              trans_b ? k : n, beta, c, n);
}

// Adam with a flat learning rate.
template <typename T>
class Adam {
 public:
  Adam(size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::vector<T>& params, const std::vector<T>& grads) {
    if (params.size() != m_.size() || grads.size() != m_.size())
      throw ShapeError("Adam state size mismatch");
    ++t_;
    double c1 = 1.0 - std::pow(beta1_, t_);
    double c2 = 1.0 - std::pow(beta2_, t_);
    for (size_t i = 0; i < params.size(); ++i) {
      double g = grads[i];
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
      params[i] -= static_cast<T>(lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_));
    }
  }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

// Max relative mismatch between an analytic gradient and central finite
// differences, evaluated in double.
inline double gradient_check(const std::function<double(const std::vector<double>&)>& loss,
                             const std::vector<double>& params, const std::vector<double>& grads,
                             double h = 1e-5) {
  double worst = 0.0;
  for (size_t i = 0; i < params.size(); ++i) {
    std::vector<double> p = params;
    p[i] = params[i] + h;
    double up = loss(p);
    p[i] = params[i] - h;
    double dn = loss(p);
    double fd = (up - dn) / (2.0 * h);
    double denom = std::max({std::abs(fd), std::abs(grads[i]), 1e-6});
    worst = std::max(worst, std::abs(fd - grads[i]) / denom);
  }
  return worst;
}

}  // namespace unitts
