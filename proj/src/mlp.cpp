#include "orl/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace orl {

Mlp::Mlp(std::vector<int> sizes, bool squash_output, double output_scale)
    : sizes_(std::move(sizes)),
      squash_output_(squash_output),
      output_scale_(output_scale) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need >= 2 layers");
  std::size_t count = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] <= 0 || sizes_[l + 1] <= 0)
      throw std::invalid_argument("Mlp: layer sizes must be positive");
    weight_off_.push_back(count);
    count += static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
  }
  params_.assign(count, 0.0);
}

void Mlp::init_xavier(Rng& rng) {
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    const double bound = std::sqrt(6.0 / (in + out));
    double* w = params_.data() + weight_off_[l];
    for (int i = 0; i < out * in; ++i) w[i] = rng.uniform(-bound, bound);
    // biases stay zero
  }
}

std::vector<double> Mlp::forward(std::span<const double> x,
                                 Cache* cache) const {
  if (static_cast<int>(x.size()) != input_dim())
    throw std::invalid_argument("Mlp::forward: input dimension mismatch");
  const std::size_t L = sizes_.size() - 1;
  std::vector<double> a(x.begin(), x.end());
  if (cache) {
    cache->act.assign(1, a);
    cache->pre.clear();
  }
  for (std::size_t l = 0; l < L; ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    const double* w = params_.data() + weight_off_[l];
    const double* b = w + static_cast<std::size_t>(out) * in;
    std::vector<double> z(out);
    for (int i = 0; i < out; ++i) {
      double acc = b[i];
      const double* wi = w + static_cast<std::size_t>(i) * in;
      for (int j = 0; j < in; ++j) acc += wi[j] * a[j];
      z[i] = acc;
    }
    if (cache) cache->pre.push_back(z);
    const bool last = (l + 1 == L);
    std::vector<double> y(out);
    if (!last || squash_output_) {
      const double scale = last ? output_scale_ : 1.0;
      for (int i = 0; i < out; ++i) y[i] = scale * std::tanh(z[i]);
    } else {
      y = z;
    }
    if (cache) cache->act.push_back(y);
    a = std::move(y);
  }
  return a;
}

void Mlp::backward(const Cache& cache, std::span<const double> dout,
                   std::vector<double>& gparams,
                   std::vector<double>* ginput) const {
  const std::size_t L = sizes_.size() - 1;
  if (cache.pre.size() != L || cache.act.size() != L + 1)
    throw std::invalid_argument("Mlp::backward: stale cache");
  if (static_cast<int>(dout.size()) != output_dim())
    throw std::invalid_argument("Mlp::backward: output dimension mismatch");
  if (gparams.size() != params_.size()) gparams.assign(params_.size(), 0.0);

  std::vector<double> dz(dout.begin(), dout.end());
  for (std::size_t li = L; li-- > 0;) {
    const int in = sizes_[li], out = sizes_[li + 1];
    const bool last = (li + 1 == L);
    // activation derivative
    if (!last || squash_output_) {
      const double scale = last ? output_scale_ : 1.0;
      for (int i = 0; i < out; ++i) {
        const double t = std::tanh(cache.pre[li][i]);
        dz[i] *= scale * (1.0 - t * t);
      }
    }
    const double* w = params_.data() + weight_off_[li];
    double* gw = gparams.data() + weight_off_[li];
    double* gb = gw + static_cast<std::size_t>(out) * in;
    const std::vector<double>& a = cache.act[li];
    std::vector<double> da(in, 0.0);
    for (int i = 0; i < out; ++i) {
      gb[i] += dz[i];
      const double* wi = w + static_cast<std::size_t>(i) * in;
      double* gwi = gw + static_cast<std::size_t>(i) * in;
      for (int j = 0; j < in; ++j) {
        gwi[j] += dz[i] * a[j];
        da[j] += wi[j] * dz[i];
      }
    }
    dz = std::move(da);
  }
  if (ginput) *ginput = dz;
}

}  // namespace orl
