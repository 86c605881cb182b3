#pragma once

#include <span>
#include <vector>

#include "orl/rng.hpp"

namespace orl {

// Fixed-topology fully connected network: tanh hidden layers, linear output.
// Actors set squash_output so the output is tanh-squashed and scaled, which
// keeps actions inside bounds for every input.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> sizes, bool squash_output = false,
      double output_scale = 1.0);

  void init_xavier(Rng& rng);

  int input_dim() const { return sizes_.empty() ? 0 : sizes_.front(); }
  int output_dim() const { return sizes_.empty() ? 0 : sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }
  bool squash_output() const { return squash_output_; }
  double output_scale() const { return output_scale_; }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  struct Cache {
    std::vector<std::vector<double>> act;  // act[0] = input, act[L] = output
    std::vector<std::vector<double>> pre;  // pre-activations, one per layer
  };

  std::vector<double> forward(std::span<const double> x,
                              Cache* cache = nullptr) const;
  std::vector<double> forward(std::initializer_list<double> x,
                              Cache* cache = nullptr) const {
    return forward(std::span<const double>(x.begin(), x.size()), cache);
  }

  // Accumulates dL/dparams into gparams given dL/doutput. When ginput is
  // non-null, also produces dL/dinput (used to push critic gradients into
  // actor outputs).
  void backward(const Cache& cache, std::span<const double> dout,
                std::vector<double>& gparams,
                std::vector<double>* ginput = nullptr) const;

 private:
  std::vector<int> sizes_;
  bool squash_output_ = false;
  double output_scale_ = 1.0;
  std::vector<double> params_;
  std::vector<std::size_t> weight_off_;  // per layer; biases follow weights
};

}  // namespace orl
