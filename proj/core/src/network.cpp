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

#include "ambiloc/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace ambiloc {

// ---------------------------------------------------------------------------
// NetworkParams

template <typename Scalar>
NetworkParams<Scalar> NetworkParams<Scalar>::zeros(const ArchConfig& arch) {
  NetworkParams out;
  out.arch_ = arch;
  for (const auto& spec : parameter_layout(arch)) {
    out.tensors_.push_back({spec.name, spec.dims, std::vector<Scalar>(spec.size(), Scalar(0))});
  }
  return out;
}

template <typename Scalar>
NetworkParams<Scalar> NetworkParams<Scalar>::initialized(const ArchConfig& arch, std::uint64_t seed) {
  NetworkParams out = zeros(arch);
  std::mt19937_64 rng(seed);
  const auto layout = parameter_layout(arch);
  for (std::size_t t = 0; t < layout.size(); ++t) {
    const auto& spec = layout[t];
    auto& values = out.tensors_[t].values;
    const bool is_bias = spec.dims.size() == 1;
    if (is_bias) {
      if (spec.name.find("bilstm") == 0) {
        const std::size_t hidden = spec.dims[0] / 4;
        std::fill(values.begin() + static_cast<std::ptrdiff_t>(hidden),
                  values.begin() + static_cast<std::ptrdiff_t>(2 * hidden), Scalar(1));
      } else if (t + 1 == layout.size()) {
        // Output logits start at the prior of one active class in C. A zero
        // start makes the first updates a common-mode push towards 0 that
        // saturates the recurrent gates before any input dependence is learned.
        const double prior = 1.0 / static_cast<double>(arch.class_count);
        std::fill(values.begin(), values.end(), static_cast<Scalar>(std::log(prior / (1.0 - prior))));
      }
      continue;
    }
    const bool rectified = spec.name.find("/conv") != std::string::npos;
    const double limit = std::sqrt((rectified ? 6.0 : 3.0) / static_cast<double>(spec.fan_in));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& v : values) v = static_cast<Scalar>(dist(rng));
  }
  return out;
}

template <typename Scalar>
ParamTensor<Scalar>& NetworkParams<Scalar>::tensor(std::string_view name) {
  for (auto& t : tensors_) {
    if (t.name == name) return t;
  }
  throw std::out_of_range("params: no tensor named " + std::string(name));
}

template <typename Scalar>
const ParamTensor<Scalar>& NetworkParams<Scalar>::tensor(std::string_view name) const {
  return const_cast<NetworkParams*>(this)->tensor(name);
}

template <typename Scalar>
std::size_t NetworkParams<Scalar>::size() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.values.size();
  return n;
}

template <typename Scalar>
void NetworkParams<Scalar>::set_zero() {
  for (auto& t : tensors_) std::fill(t.values.begin(), t.values.end(), Scalar(0));
}

template <typename Scalar>
void NetworkParams<Scalar>::add(const NetworkParams& other) {
  if (other.tensors_.size() != tensors_.size()) throw std::invalid_argument("params: layout mismatch");
  for (std::size_t t = 0; t < tensors_.size(); ++t) {
    auto& dst = tensors_[t].values;
    const auto& src = other.tensors_[t].values;
    if (dst.size() != src.size()) throw std::invalid_argument("params: layout mismatch");
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
}

template <typename Scalar>
bool NetworkParams<Scalar>::all_finite() const {
  for (const auto& t : tensors_) {
    for (const Scalar v : t.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

template <typename Scalar>
Scalar& NetworkParams<Scalar>::flat(std::size_t index) {
  for (auto& t : tensors_) {
    if (index < t.values.size()) return t.values[index];
    index -= t.values.size();
  }
  throw std::out_of_range("params: flat index");
}

template <typename Scalar>
Scalar NetworkParams<Scalar>::flat(std::size_t index) const {
  return const_cast<NetworkParams*>(this)->flat(index);
}

template <typename Scalar>
const std::string& NetworkParams<Scalar>::flat_owner(std::size_t index) const {
  for (const auto& t : tensors_) {
    if (index < t.values.size()) return t.name;
    index -= t.values.size();
  }
  throw std::out_of_range("params: flat index");
}

template class NetworkParams<float>;
template class NetworkParams<double>;

// ---------------------------------------------------------------------------
// Forward / backward

namespace {

template <typename S>
using Mat = RowMatrix<S>;
template <typename S>
using Row = Eigen::Matrix<S, 1, Eigen::Dynamic>;
template <typename S>
using CMap = Eigen::Map<const Mat<S>>;
template <typename S>
using MMap = Eigen::Map<Mat<S>>;
template <typename S>
using CRowMap = Eigen::Map<const Row<S>>;
template <typename S>
using MRowMap = Eigen::Map<Row<S>>;

template <typename S>
void im2col(const S* in, int frames, int bins, int channels, int k, S* col) {
  const int pad = k / 2;
  const std::size_t width = static_cast<std::size_t>(k) * k * channels;
  for (int t = 0; t < frames; ++t) {
    for (int f = 0; f < bins; ++f) {
      S* row = col + (static_cast<std::size_t>(t) * bins + f) * width;
      for (int kt = 0; kt < k; ++kt) {
        const int tt = t + kt - pad;
        for (int kf = 0; kf < k; ++kf) {
          const int ff = f + kf - pad;
          S* dst = row + static_cast<std::size_t>(kt * k + kf) * channels;
          if (tt < 0 || tt >= frames || ff < 0 || ff >= bins) {
            std::fill(dst, dst + channels, S(0));
          } else {
            std::memcpy(dst, in + (static_cast<std::size_t>(tt) * bins + ff) * channels, sizeof(S) * channels);
          }
        }
      }
    }
  }
}

template <typename S>
void col2im(const S* col, int frames, int bins, int channels, int k, S* in) {
  const int pad = k / 2;
  const std::size_t width = static_cast<std::size_t>(k) * k * channels;
  for (int t = 0; t < frames; ++t) {
    for (int f = 0; f < bins; ++f) {
      const S* row = col + (static_cast<std::size_t>(t) * bins + f) * width;
      for (int kt = 0; kt < k; ++kt) {
        const int tt = t + kt - pad;
        if (tt < 0 || tt >= frames) continue;
        for (int kf = 0; kf < k; ++kf) {
          const int ff = f + kf - pad;
          if (ff < 0 || ff >= bins) continue;
          const S* src = row + static_cast<std::size_t>(kt * k + kf) * channels;
          S* dst = in + (static_cast<std::size_t>(tt) * bins + ff) * channels;
          for (int c = 0; c < channels; ++c) dst[c] += src[c];
        }
      }
    }
  }
}

// Column sums accumulated row by row. Eigen's colwise().sum() into a mapped
// std::vector peels on the destination address, so its rounding would vary
// between runs; this order is fixed.
template <typename S>
void add_column_sums(const Mat<S>& m, S* dst) {
  std::vector<S> acc(static_cast<std::size_t>(m.cols()), S(0));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const S* row = m.data() + r * m.cols();
    for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += row[c];
  }
  for (std::size_t c = 0; c < acc.size(); ++c) dst[c] += acc[c];
}

template <typename S>
S sigmoid(S x) {
  return S(1) / (S(1) + std::exp(-x));
}

template <typename S>
struct ConvCache {
  Mat<S> col;
  Mat<S> out;  // rectified output
  int bins = 0;
  int in_channels = 0;
};

struct PoolCache {
  std::vector<std::int32_t> argmax;
  int in_bins = 0;
  int out_bins = 0;
};

template <typename S>
struct LstmDirection {
  Mat<S> gates;  // i f g o, post-activation
  Mat<S> cell;
  Mat<S> cell_tanh;
  Mat<S> hidden;
};

template <typename S>
struct LstmCache {
  Mat<S> input;
  LstmDirection<S> dir[2];
};

template <typename S>
struct DenseCache {
  Mat<S> input;
  Mat<S> out;  // tanh output for hidden layers, logits for the last
};

template <typename S>
class Pass {
 public:
  explicit Pass(const NetworkParams<S>& params) : p_(params), a_(params.arch()) {
    a_.validate();
    if (a_.input_channels != static_cast<int>(kFeatureChannels)) {
      throw std::invalid_argument("network: input channels must be 6");
    }
  }

  const Mat<S>& run(const FeatureTensor& x) {
    const int T = a_.input_frames;
    if (static_cast<int>(x.frames) != T || static_cast<int>(x.bins) != a_.input_bins) {
      throw std::invalid_argument("network: feature tensor shape does not match the architecture");
    }
    Mat<S> act(static_cast<Eigen::Index>(x.frames * x.bins), static_cast<Eigen::Index>(kFeatureChannels));
    for (std::size_t i = 0; i < x.values.size(); ++i) act.data()[i] = static_cast<S>(x.values[i]);

    int bins = a_.input_bins;
    int channels = a_.input_channels;
    const int k = a_.kernel_size;
    conv_.assign(2 * a_.blocks(), {});
    pool_.assign(a_.blocks(), {});
    for (int b = 0; b < a_.blocks(); ++b) {
      for (int c = 0; c < 2; ++c) {
        const int layer = 2 * b + c;
        auto& cache = conv_[layer];
        cache.bins = bins;
        cache.in_channels = channels;
        cache.col.resize(static_cast<Eigen::Index>(T) * bins, static_cast<Eigen::Index>(k) * k * channels);
        im2col(act.data(), T, bins, channels, k, cache.col.data());
        const auto& kern = p_.tensors()[2 * layer];
        const auto& bias = p_.tensors()[2 * layer + 1];
        CMap<S> K(kern.values.data(), cache.col.cols(), a_.conv_filters);
        CRowMap<S> B(bias.values.data(), a_.conv_filters);
        cache.out.noalias() = cache.col * K;
        cache.out.rowwise() += B;
        cache.out = cache.out.cwiseMax(S(0));
        act = cache.out;
        channels = a_.conv_filters;
      }
      auto& pc = pool_[b];
      const int P = a_.pool_sizes[b];
      pc.in_bins = bins;
      pc.out_bins = bins / P;
      Mat<S> pooled(static_cast<Eigen::Index>(T) * pc.out_bins, channels);
      pc.argmax.assign(static_cast<std::size_t>(pooled.size()), 0);
      for (int t = 0; t < T; ++t) {
        for (int fo = 0; fo < pc.out_bins; ++fo) {
          const Eigen::Index orow = static_cast<Eigen::Index>(t) * pc.out_bins + fo;
          const Eigen::Index first = static_cast<Eigen::Index>(t) * bins + static_cast<Eigen::Index>(fo) * P;
          for (int c = 0; c < channels; ++c) {
            Eigen::Index best_row = first;
            S best = act(first, c);
            for (int q = 1; q < P; ++q) {
              if (act(first + q, c) > best) {
                best = act(first + q, c);
                best_row = first + q;
              }
            }
            pooled(orow, c) = best;
            pc.argmax[static_cast<std::size_t>(orow * channels + c)] = static_cast<std::int32_t>(best_row);
          }
        }
      }
      act = std::move(pooled);
      bins = pc.out_bins;
    }

    // (T * q) x C row-major is the same memory as T x (q * C).
    Mat<S> seq = MMap<S>(act.data(), T, static_cast<Eigen::Index>(bins) * channels);

    lstm_.assign(a_.rnn_layers, {});
    for (int r = 0; r < a_.rnn_layers; ++r) seq = lstm_forward(r, seq);

    dense_.assign(a_.dense_widths.size(), {});
    for (std::size_t d = 0; d < a_.dense_widths.size(); ++d) {
      auto& cache = dense_[d];
      const auto& W = p_.tensors()[dense_base() + 2 * d];
      const auto& Bv = p_.tensors()[dense_base() + 2 * d + 1];
      const auto out = static_cast<Eigen::Index>(a_.dense_widths[d]);
      cache.input = std::move(seq);
      cache.out.noalias() = cache.input * CMap<S>(W.values.data(), cache.input.cols(), out);
      cache.out.rowwise() += CRowMap<S>(Bv.values.data(), out);
      if (d + 1 < a_.dense_widths.size()) cache.out = cache.out.array().tanh().matrix();
      seq = cache.out;
    }
    return dense_.back().out;
  }

  void backprop(const Mat<S>& dlogits, NetworkParams<S>& grads) {
    const int T = a_.input_frames;
    Mat<S> dpre = dlogits;
    Mat<S> dseq;
    for (std::size_t d = dense_.size(); d-- > 0;) {
      auto& cache = dense_[d];
      const auto& W = p_.tensors()[dense_base() + 2 * d];
      auto& gW = grads.tensors()[dense_base() + 2 * d].values;
      auto& gB = grads.tensors()[dense_base() + 2 * d + 1].values;
      const auto in_w = cache.input.cols();
      const auto out_w = dpre.cols();
      MMap<S>(gW.data(), in_w, out_w).noalias() += cache.input.transpose() * dpre;
      add_column_sums(dpre, gB.data());
      dseq.noalias() = dpre * CMap<S>(W.values.data(), in_w, out_w).transpose();
      if (d > 0) {
        const auto& prev = dense_[d - 1].out;
        dpre = (dseq.array() * (S(1) - prev.array().square())).matrix();
      }
    }

    for (int r = a_.rnn_layers; r-- > 0;) dseq = lstm_backward(r, dseq, grads);

    const int channels = a_.conv_filters;
    Mat<S> dact = MMap<S>(dseq.data(), static_cast<Eigen::Index>(T) * pool_.back().out_bins, channels);
    const int k = a_.kernel_size;
    for (int b = a_.blocks(); b-- > 0;) {
      const auto& pc = pool_[b];
      Mat<S> dpool = Mat<S>::Zero(static_cast<Eigen::Index>(T) * pc.in_bins, channels);
      for (Eigen::Index r = 0; r < dact.rows(); ++r) {
        for (int c = 0; c < channels; ++c) {
          dpool(pc.argmax[static_cast<std::size_t>(r * channels + c)], c) += dact(r, c);
        }
      }
      dact = std::move(dpool);
      for (int c = 1; c >= 0; --c) {
        const int layer = 2 * b + c;
        auto& cache = conv_[layer];
        Mat<S> dz = (cache.out.array() > S(0)).select(dact, S(0));
        auto& gK = grads.tensors()[2 * layer].values;
        auto& gB = grads.tensors()[2 * layer + 1].values;
        MMap<S>(gK.data(), cache.col.cols(), channels).noalias() += cache.col.transpose() * dz;
        add_column_sums(dz, gB.data());
        if (layer == 0) break;
        const auto& kern = p_.tensors()[2 * layer];
        Mat<S> dcol = dz * CMap<S>(kern.values.data(), cache.col.cols(), channels).transpose();
        dact = Mat<S>::Zero(static_cast<Eigen::Index>(T) * cache.bins, cache.in_channels);
        col2im(dcol.data(), T, cache.bins, cache.in_channels, k, dact.data());
      }
    }
  }

 private:
  std::size_t lstm_base() const { return static_cast<std::size_t>(4 * a_.blocks()); }
  std::size_t dense_base() const { return lstm_base() + static_cast<std::size_t>(6 * a_.rnn_layers); }

  Mat<S> lstm_forward(int r, const Mat<S>& input) {
    auto& cache = lstm_[r];
    cache.input = input;
    const int T = static_cast<int>(input.rows());
    const auto H = static_cast<Eigen::Index>(a_.rnn_hidden);
    Mat<S> output(T, 2 * H);
    for (int dir = 0; dir < 2; ++dir) {
      const std::size_t base = lstm_base() + static_cast<std::size_t>(6 * r + 3 * dir);
      const auto& Wx = p_.tensors()[base];
      const auto& Wh = p_.tensors()[base + 1];
      const auto& Bv = p_.tensors()[base + 2];
      CMap<S> wx(Wx.values.data(), input.cols(), 4 * H);
      CMap<S> wh(Wh.values.data(), H, 4 * H);
      Mat<S> zx = input * wx;
      zx.rowwise() += CRowMap<S>(Bv.values.data(), 4 * H);

      auto& st = cache.dir[dir];
      st.gates.resize(T, 4 * H);
      st.cell.resize(T, H);
      st.cell_tanh.resize(T, H);
      st.hidden.resize(T, H);
      Row<S> h = Row<S>::Zero(H);
      Row<S> c = Row<S>::Zero(H);
      Row<S> z(4 * H);
      for (int s = 0; s < T; ++s) {
        const int t = dir == 0 ? s : T - 1 - s;
        z.noalias() = zx.row(t) + h * wh;
        for (Eigen::Index j = 0; j < H; ++j) {
          const S i = sigmoid(z[j]);
          const S f = sigmoid(z[H + j]);
          const S g = std::tanh(z[2 * H + j]);
          const S o = sigmoid(z[3 * H + j]);
          c[j] = f * c[j] + i * g;
          const S tc = std::tanh(c[j]);
          h[j] = o * tc;
          st.gates(t, j) = i;
          st.gates(t, H + j) = f;
          st.gates(t, 2 * H + j) = g;
          st.gates(t, 3 * H + j) = o;
          st.cell(t, j) = c[j];
          st.cell_tanh(t, j) = tc;
        }
        st.hidden.row(t) = h;
      }
      output.middleCols(dir * H, H) = st.hidden;
    }
    return output;
  }

  Mat<S> lstm_backward(int r, const Mat<S>& dout, NetworkParams<S>& grads) {
    auto& cache = lstm_[r];
    const int T = static_cast<int>(cache.input.rows());
    const auto H = static_cast<Eigen::Index>(a_.rnn_hidden);
    Mat<S> dinput = Mat<S>::Zero(T, cache.input.cols());
    for (int dir = 0; dir < 2; ++dir) {
      const std::size_t base = lstm_base() + static_cast<std::size_t>(6 * r + 3 * dir);
      const auto& Wx = p_.tensors()[base];
      const auto& Wh = p_.tensors()[base + 1];
      CMap<S> wx(Wx.values.data(), cache.input.cols(), 4 * H);
      CMap<S> wh(Wh.values.data(), H, 4 * H);
      const auto& st = cache.dir[dir];

      Mat<S> dz(T, 4 * H);
      Mat<S> h_prev = Mat<S>::Zero(T, H);
      Row<S> dh_next = Row<S>::Zero(H);
      Row<S> dc_next = Row<S>::Zero(H);
      for (int s = T - 1; s >= 0; --s) {
        const int t = dir == 0 ? s : T - 1 - s;
        const int tp = dir == 0 ? t - 1 : t + 1;
        const bool has_prev = s > 0;
        if (has_prev) h_prev.row(t) = st.hidden.row(tp);
        for (Eigen::Index j = 0; j < H; ++j) {
          const S i = st.gates(t, j), f = st.gates(t, H + j), g = st.gates(t, 2 * H + j), o = st.gates(t, 3 * H + j);
          const S tc = st.cell_tanh(t, j);
          const S dh = dout(t, dir * H + j) + dh_next[j];
          const S dc = dh * o * (S(1) - tc * tc) + dc_next[j];
          const S c_prev = has_prev ? st.cell(tp, j) : S(0);
          dz(t, j) = dc * g * i * (S(1) - i);
          dz(t, H + j) = dc * c_prev * f * (S(1) - f);
          dz(t, 2 * H + j) = dc * i * (S(1) - g * g);
          dz(t, 3 * H + j) = dh * tc * o * (S(1) - o);
          dc_next[j] = dc * f;
        }
        dh_next.noalias() = dz.row(t) * wh.transpose();
      }
      auto& gWx = grads.tensors()[base].values;
      auto& gWh = grads.tensors()[base + 1].values;
      auto& gB = grads.tensors()[base + 2].values;
      MMap<S>(gWx.data(), cache.input.cols(), 4 * H).noalias() += cache.input.transpose() * dz;
      MMap<S>(gWh.data(), H, 4 * H).noalias() += h_prev.transpose() * dz;
      add_column_sums(dz, gB.data());
      dinput.noalias() += dz * wx.transpose();
    }
    return dinput;
  }

  const NetworkParams<S>& p_;
  ArchConfig a_;
  std::vector<ConvCache<S>> conv_;
  std::vector<PoolCache> pool_;
  std::vector<LstmCache<S>> lstm_;
  std::vector<DenseCache<S>> dense_;
};

template <typename S>
struct ItemResult {
  S loss = 0;
  NetworkParams<S> grads;
};

template <typename S>
void run_item(const NetworkParams<S>& params, const BatchItem& item, S scale, ItemResult<S>& out) {
  Pass<S> pass(params);
  const Mat<S>& logits = pass.run(*item.features);
  const auto C = logits.cols();
  if (static_cast<Eigen::Index>(item.target.size()) != C) {
    throw std::invalid_argument("loss: target length differs from class count");
  }
  Mat<S> dlogits(logits.rows(), C);
  S loss = 0;
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    for (Eigen::Index c = 0; c < C; ++c) {
      const S z = logits(t, c);
      const S y = static_cast<S>(item.target[static_cast<std::size_t>(c)]);
      loss += std::max(z, S(0)) - z * y + std::log1p(std::exp(-std::abs(z)));
      dlogits(t, c) = (sigmoid(z) - y) * scale;
    }
  }
  out.loss = loss * scale;
  out.grads = NetworkParams<S>::zeros(params.arch());
  pass.backprop(dlogits, out.grads);
}

}  // namespace

// Per-item workspaces are a few MB each. glibc serves such blocks with mmap
// and returns them on free, so every item would fault its pages in again;
// keeping them on the heap removes that system time without changing results.
static void keep_large_blocks_on_heap() {
#if defined(__GLIBC__)
  static std::once_flag once;
  std::call_once(once, [] {
    mallopt(M_MMAP_THRESHOLD, 256 << 20);
    mallopt(M_TRIM_THRESHOLD, 512 << 20);
  });
#endif
}

template <typename Scalar>
RowMatrix<Scalar> forward(const NetworkParams<Scalar>& params, const FeatureTensor& x) {
  keep_large_blocks_on_heap();
  Pass<Scalar> pass(params);
  const auto& logits = pass.run(x);
  return logits.unaryExpr([](Scalar z) { return sigmoid(z); });
}

template <typename Scalar>
LossAndGradients<Scalar> loss_and_gradients(const NetworkParams<Scalar>& params, std::span<const BatchItem> batch,
                                            int jobs) {
  keep_large_blocks_on_heap();
  if (batch.empty()) throw std::invalid_argument("loss: empty batch");
  for (const auto& item : batch) {
    if (item.features == nullptr) throw std::invalid_argument("loss: missing features");
    for (const float y : item.target) {
      if (y != 0.0f && y != 1.0f) throw std::invalid_argument("loss: targets must be 0 or 1");
    }
  }
  const auto& arch = params.arch();
  const Scalar scale = Scalar(1) / static_cast<Scalar>(static_cast<double>(arch.input_frames) * arch.class_count *
                                                       static_cast<double>(batch.size()));

  LossAndGradients<Scalar> total{Scalar(0), NetworkParams<Scalar>::zeros(arch)};
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, batch.size());
  if (workers == 1) {
    ItemResult<Scalar> item;
    for (const auto& b : batch) {
      run_item(params, b, scale, item);
      total.loss += item.loss;
      total.gradients.add(item.grads);
    }
    return total;
  }

  std::vector<ItemResult<Scalar>> results(batch.size());
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < batch.size(); i += workers) run_item(params, batch[i], scale, results[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& r : results) {
    total.loss += r.loss;
    total.gradients.add(r.grads);
  }
  return total;
}

template RowMatrix<float> forward(const NetworkParams<float>&, const FeatureTensor&);
template RowMatrix<double> forward(const NetworkParams<double>&, const FeatureTensor&);
template LossAndGradients<float> loss_and_gradients(const NetworkParams<float>&, std::span<const BatchItem>, int);
template LossAndGradients<double> loss_and_gradients(const NetworkParams<double>&, std::span<const BatchItem>, int);

}  // namespace ambiloc
