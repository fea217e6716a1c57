// lfseq/net.hpp
// Small feed-forward model mapping per-frame features to pseudo
// log-likelihoods. The output is used directly as log p(o_t | j): no softmax,
// no prior division.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef LFSEQ_NET_HPP
#define LFSEQ_NET_HPP

#include "lfseq/common.hpp"
#include "lfseq/text_io.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lfseq {

// Exponential interpolation from initial_lr down to final_lr.
struct LrSchedule {
  double initial_lr = 1e-3;
  double final_lr = 1e-4;
  long total_updates = 1;

  double LrAt(long update) const;
};

class ToyNet {
 public:
  struct Layer {
    Matrix weight;  // out x in
    Vector bias;    // out
    bool is_tanh = false;  // output layer is linear
  };

  ToyNet() = default;

  // Hidden layers use tanh; weights initialized uniformly in
  // +-1/sqrt(fan_in) from the given seed, biases at zero.
  static ToyNet Create(int input_dim, const std::vector<int> &hidden_dims,
                       int output_dim, uint64_t seed);

  int InputDim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols()); }
  int OutputDim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows()); }
  const std::vector<Layer> &Layers() const { return layers_; }
  std::vector<Layer> &MutableLayers() { return layers_; }
  long ParamCount() const;

  // features: T x D -> T x J. Per-frame, deterministic.
  Matrix Forward(const Matrix &features) const;

  struct Gradients {
    std::vector<Matrix> weight;
    std::vector<Vector> bias;

    void SetZero();
    void Add(const Gradients &other);
    double GlobalNorm() const;
    bool AllFinite() const;
  };
  Gradients ZeroGradients() const;

  // Exact gradients of sum_t sum_j grad_out(t, j) * output(t, j) w.r.t.
  // all parameters.
  Gradients Backward(const Matrix &features, const Matrix &grad_out) const;

  // Gradient-ascent step with momentum and global-norm clipping. Returns
  // false (and leaves the model untouched) if the gradient is non-finite.
  bool SgdStep(const Gradients &grads, double lr, double momentum,
               double max_grad_norm, Gradients *velocity);

  void Write(std::ostream &os) const;
  static ToyNet Read(LineReader *reader);

 private:
  std::vector<Layer> layers_;
};

void WriteNetFile(const std::string &path, const ToyNet &net);
ToyNet ReadNetFile(const std::string &path);

}  // namespace lfseq

#endif  // LFSEQ_NET_HPP
