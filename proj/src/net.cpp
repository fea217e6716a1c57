// net.cpp

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

#include "lfseq/net.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <random>

namespace lfseq {

double LrSchedule::LrAt(long update) const {
  Require(initial_lr > 0.0 && final_lr > 0.0, "learning rates must be positive");
  Require(total_updates >= 1, "schedule needs at least one update");
  if (update >= total_updates) return final_lr;
  if (update < 0) update = 0;
  double frac = static_cast<double>(update) / static_cast<double>(total_updates);
  return initial_lr * std::pow(final_lr / initial_lr, frac);
}

ToyNet ToyNet::Create(int input_dim, const std::vector<int> &hidden_dims,
                      int output_dim, uint64_t seed) {
  Require(input_dim >= 1 && output_dim >= 1, "bad net dimensions");
  std::mt19937_64 rng(seed);
  ToyNet net;
  int in = input_dim;
  auto make_layer = [&](int out, bool is_tanh) {
    Layer layer;
    double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    layer.weight.resize(out, in);
    for (int r = 0; r < out; r++)
      for (int c = 0; c < in; c++) layer.weight(r, c) = dist(rng);
    layer.bias = Vector::Zero(out);
    layer.is_tanh = is_tanh;
    net.layers_.push_back(std::move(layer));
    in = out;
  };
  for (int width : hidden_dims) {
    Require(width >= 1, "bad hidden width");
    make_layer(width, true);
  }
  make_layer(output_dim, false);
  return net;
}

long ToyNet::ParamCount() const {
  long count = 0;
  for (const Layer &l : layers_) count += l.weight.size() + l.bias.size();
  return count;
}

Matrix ToyNet::Forward(const Matrix &features) const {
  Require(!layers_.empty(), "uninitialized net");
  Require(features.cols() == InputDim(), "feature dim ", features.cols(),
          " does not match net input dim ", InputDim());
  Matrix h = features;
  for (const Layer &l : layers_) {
    Matrix z = (h * l.weight.transpose()).rowwise() + l.bias.transpose();
    h = l.is_tanh ? z.array().tanh().matrix() : z;
  }
  return h;
}

ToyNet::Gradients ToyNet::ZeroGradients() const {
  Gradients g;
  for (const Layer &l : layers_) {
    g.weight.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
    g.bias.push_back(Vector::Zero(l.bias.size()));
  }
  return g;
}

void ToyNet::Gradients::SetZero() {
  for (auto &w : weight) w.setZero();
  for (auto &b : bias) b.setZero();
}

void ToyNet::Gradients::Add(const Gradients &other) {
  for (size_t i = 0; i < weight.size(); i++) {
    weight[i] += other.weight[i];
    bias[i] += other.bias[i];
  }
}

double ToyNet::Gradients::GlobalNorm() const {
  double sq = 0.0;
  for (const auto &w : weight) sq += w.squaredNorm();
  for (const auto &b : bias) sq += b.squaredNorm();
  return std::sqrt(sq);
}

bool ToyNet::Gradients::AllFinite() const {
  for (const auto &w : weight)
    if (!w.allFinite()) return false;
  for (const auto &b : bias)
    if (!b.allFinite()) return false;
  return true;
}

ToyNet::Gradients ToyNet::Backward(const Matrix &features,
                                   const Matrix &grad_out) const {
  Require(grad_out.cols() == OutputDim() && grad_out.rows() == features.rows(),
          "gradient shape mismatch");
  // Forward pass keeping post-activation values.
  std::vector<Matrix> activations;  // activations[l] = input to layer l
  activations.reserve(layers_.size() + 1);
  activations.push_back(features);
  for (const Layer &l : layers_) {
    Matrix z = (activations.back() * l.weight.transpose()).rowwise() +
               l.bias.transpose();
    activations.push_back(l.is_tanh ? z.array().tanh().matrix() : z);
  }

  Gradients grads = ZeroGradients();
  Matrix delta = grad_out;
  for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; l--) {
    grads.weight[l] = delta.transpose() * activations[l];
    grads.bias[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      delta = (delta * layers_[l].weight).array() *
              (1.0 - activations[l].array().square());
    }
  }
  return grads;
}

bool ToyNet::SgdStep(const Gradients &grads, double lr, double momentum,
                     double max_grad_norm, Gradients *velocity) {
  if (!grads.AllFinite()) return false;
  double norm = grads.GlobalNorm();
  double scale = 1.0;
  if (max_grad_norm > 0.0 && norm > max_grad_norm) scale = max_grad_norm / norm;
  for (size_t l = 0; l < layers_.size(); l++) {
    velocity->weight[l] = momentum * velocity->weight[l] + scale * grads.weight[l];
    velocity->bias[l] = momentum * velocity->bias[l] + scale * grads.bias[l];
    layers_[l].weight += lr * velocity->weight[l];
    layers_[l].bias += lr * velocity->bias[l];
  }
  return true;
}

void ToyNet::Write(std::ostream &os) const {
  os << "NET " << InputDim() << ' ' << OutputDim() << ' ' << layers_.size()
     << '\n';
  for (const Layer &l : layers_) {
    os << "L " << l.weight.rows() << ' ' << l.weight.cols() << ' '
       << (l.is_tanh ? "tanh" : "linear") << '\n';
    for (Eigen::Index r = 0; r < l.weight.rows(); r++) {
      for (Eigen::Index c = 0; c < l.weight.cols(); c++) {
        if (c > 0) os << ' ';
        os << FormatDouble(l.weight(r, c));
      }
      os << '\n';
    }
    for (Eigen::Index i = 0; i < l.bias.size(); i++) {
      if (i > 0) os << ' ';
      os << FormatDouble(l.bias(i));
    }
    os << '\n';
  }
}

ToyNet ToyNet::Read(LineReader *reader) {
  std::vector<std::string> tokens;
  if (!reader->Next(&tokens)) reader->FailHere("expected NET header");
  if (tokens.size() != 4 || tokens[0] != "NET")
    reader->FailHere("expected 'NET <D> <J> <n_layers>' header");
  int input_dim = reader->ParseInt(tokens[1]);
  int output_dim = reader->ParseInt(tokens[2]);
  int num_layers = reader->ParseInt(tokens[3]);
  if (num_layers < 1) reader->FailHere("net needs at least one layer");

  ToyNet net;
  for (int l = 0; l < num_layers; l++) {
    if (!reader->Next(&tokens) || tokens.size() != 4 || tokens[0] != "L")
      reader->FailHere("expected 'L <rows> <cols> <tanh|linear>'");
    Layer layer;
    int rows = reader->ParseInt(tokens[1]);
    int cols = reader->ParseInt(tokens[2]);
    if (tokens[3] == "tanh")
      layer.is_tanh = true;
    else if (tokens[3] == "linear")
      layer.is_tanh = false;
    else
      reader->FailHere("unknown nonlinearity '", tokens[3], "'");
    layer.weight.resize(rows, cols);
    for (int r = 0; r < rows; r++) {
      if (!reader->Next(&tokens) || static_cast<int>(tokens.size()) != cols)
        reader->FailHere("weight row truncated");
      for (int c = 0; c < cols; c++)
        layer.weight(r, c) = reader->ParseDouble(tokens[c]);
    }
    if (!reader->Next(&tokens) || static_cast<int>(tokens.size()) != rows)
      reader->FailHere("bias row truncated");
    layer.bias.resize(rows);
    for (int r = 0; r < rows; r++) layer.bias(r) = reader->ParseDouble(tokens[r]);
    net.layers_.push_back(std::move(layer));
  }
  Require(net.InputDim() == input_dim && net.OutputDim() == output_dim,
          "net header dimensions disagree with layer shapes");
  return net;
}

void WriteNetFile(const std::string &path, const ToyNet &net) {
  auto os = OpenOutput(path);
  net.Write(os);
  Require(os.good(), "write failed for '", path, "'");
}

ToyNet ReadNetFile(const std::string &path) {
  auto is = OpenInput(path);
  LineReader reader(is, path);
  return ToyNet::Read(&reader);
}

}  // namespace lfseq
