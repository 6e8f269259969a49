/**
 * Copyright 2026 The ambiloc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ambiloc/arch.hpp"
#include "ambiloc/features.hpp"

namespace ambiloc {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
struct ParamTensor {
  std::string name;
  std::vector<std::size_t> dims;
  std::vector<Scalar> values;
};

/// Trainable weights, one tensor per entry of parameter_layout(arch).
/// Conv kernels are (k, k, in, out); LSTM kernels pack gates as i, f, g, o.
template <typename Scalar>
class NetworkParams {
 public:
  NetworkParams() = default;

  static NetworkParams zeros(const ArchConfig& arch);
  /// Fan-in scaled uniform weights (He for rectified convolutions, LeCun
  /// elsewhere), zero biases except LSTM forget gates at 1 and output
  /// biases at logit(1 / C).
  static NetworkParams initialized(const ArchConfig& arch, std::uint64_t seed);

  const ArchConfig& arch() const { return arch_; }
  std::vector<ParamTensor<Scalar>>& tensors() { return tensors_; }
  const std::vector<ParamTensor<Scalar>>& tensors() const { return tensors_; }

  /// Throws std::out_of_range for unknown names.
  ParamTensor<Scalar>& tensor(std::string_view name);
  const ParamTensor<Scalar>& tensor(std::string_view name) const;

  std::size_t size() const;
  void set_zero();
  /// this += other, tensor by tensor in storage order.
  void add(const NetworkParams& other);
  bool all_finite() const;

  /// Flat view helpers for finite differences and optimizers.
  Scalar& flat(std::size_t index);
  Scalar flat(std::size_t index) const;
  /// Name of the tensor holding a flat index.
  const std::string& flat_owner(std::size_t index) const;

  template <typename Other>
  NetworkParams<Other> cast() const {
    NetworkParams<Other> out = NetworkParams<Other>::zeros(arch_);
    for (std::size_t t = 0; t < tensors_.size(); ++t) {
      for (std::size_t i = 0; i < tensors_[t].values.size(); ++i) {
        out.tensors()[t].values[i] = static_cast<Other>(tensors_[t].values[i]);
      }
    }
    return out;
  }

  friend bool operator==(const NetworkParams& a, const NetworkParams& b) {
    if (a.tensors_.size() != b.tensors_.size()) return false;
    for (std::size_t t = 0; t < a.tensors_.size(); ++t) {
      if (a.tensors_[t].name != b.tensors_[t].name || a.tensors_[t].values != b.tensors_[t].values) return false;
    }
    return true;
  }

 private:
  ArchConfig arch_;
  std::vector<ParamTensor<Scalar>> tensors_;
};

/// One supervised sequence: 25 x 513 x 6 features and a 0/1 class vector
/// that labels every frame.
struct BatchItem {
  const FeatureTensor* features = nullptr;
  std::span<const float> target;
};

template <typename Scalar>
struct LossAndGradients {
  Scalar loss = 0;
  NetworkParams<Scalar> gradients;
};

/// Per-frame class probabilities, frames x class_count, each in (0, 1).
/// Throws std::invalid_argument when the input shape does not match arch.
template <typename Scalar>
RowMatrix<Scalar> forward(const NetworkParams<Scalar>& params, const FeatureTensor& x);

/// Mean binary cross-entropy over frames, classes and batch items, and its
/// gradient. Items are evaluated on up to `jobs` threads; per-item results
/// are reduced in item order, so the result does not depend on `jobs`.
/// Throws on an empty batch or targets outside {0, 1}.
template <typename Scalar>
LossAndGradients<Scalar> loss_and_gradients(const NetworkParams<Scalar>& params, std::span<const BatchItem> batch,
                                            int jobs = 1);

extern template class NetworkParams<float>;
extern template class NetworkParams<double>;

}  // namespace ambiloc
