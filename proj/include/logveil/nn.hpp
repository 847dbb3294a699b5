// Copyright 2026 The LogVeil Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LOGVEIL_NN_HPP_
#define LOGVEIL_NN_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "logveil/matrix.hpp"
#include "logveil/rng.hpp"

namespace logveil {

enum class Activation { linear, relu, sigmoid, tanh };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation activation);

enum class Loss { mse, binary_cross_entropy };

Loss loss_from_string(const std::string& name);
std::string to_string(Loss loss);

struct Layer {
  Matrix weights;             // out_dim x in_dim
  std::vector<double> bias;   // out_dim
  Activation activation = Activation::linear;
};

// Plain fully connected network. Parameters flatten layer by layer,
// weights row-major then bias; that layout is the contract shared by
// per-example gradients and apply_update.
struct DenseNetwork {
  std::vector<Layer> layers;

  bool empty() const { return layers.empty(); }
  std::size_t in_dim() const;
  std::size_t out_dim() const;
  std::size_t parameter_count() const;
};

// Uniform Kaiming-style fan-in initialization (bound gain * sqrt(6 / fan_in)),
// biases zero. Layer l maps dims[l] -> dims[l + 1].
DenseNetwork make_network(const std::vector<std::size_t>& dims,
                          const std::vector<Activation>& activations, Rng& rng,
                          double init_gain = 1.0);

std::vector<double> forward_one(const DenseNetwork& net, const double* input);

// Row-wise forward pass over a batch (OpenMP across rows).
Matrix forward(const DenseNetwork& net, const Matrix& batch);

// Loss of a single example, averaged over output coordinates.
double example_loss(const DenseNetwork& net, Loss loss, const double* input,
                    const double* target);

// Mean example loss over the batch.
double batch_loss(const DenseNetwork& net, Loss loss, const Matrix& batch,
                  const Matrix& targets);

// One flat gradient row per example: the gradient of that example's loss
// with respect to the flat parameter vector. The OpenMP version and the
// serial reference produce bit-identical results.
Matrix per_example_gradients(const DenseNetwork& net, Loss loss,
                             const Matrix& batch, const Matrix& targets);
Matrix per_example_gradients_serial(const DenseNetwork& net, Loss loss,
                                    const Matrix& batch, const Matrix& targets);

// Mean gradient over the batch, accumulated in layer space (the
// non-private update path; also the cross-check for the per-example path).
std::vector<double> batch_gradient(const DenseNetwork& net, Loss loss,
                                   const Matrix& batch, const Matrix& targets);

// Single-example backprop against an externally supplied gradient on the
// network's (post-activation) output. input_grad lets chained networks
// pass gradients through each other.
struct BackpropResult {
  std::vector<double> param_grad;
  std::vector<double> input_grad;
};
BackpropResult backprop_example(const DenseNetwork& net, const double* input,
                                const std::vector<double>& output_grad);

// theta <- theta - learning_rate * gradient
void apply_update(DenseNetwork& net, const std::vector<double>& gradient,
                  double learning_rate);

std::vector<double> flatten_parameters(const DenseNetwork& net);

// Sinusoidal features of a step number: pairs (sin(t w_k), cos(t w_k)) with
// w_k = 10000^(-2k/dim), k = 0 .. dim/2 - 1. dim must be even.
std::vector<double> time_embedding(double t, std::size_t dim);

}  // namespace logveil

#endif  // LOGVEIL_NN_HPP_
