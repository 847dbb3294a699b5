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

#include "logveil/nn.hpp"

#include <cmath>
#include <cstring>

#include "logveil/error.hpp"

namespace logveil {
namespace {

double apply_activation(Activation activation, double z) {
  switch (activation) {
    case Activation::linear:
      return z;
    case Activation::relu:
      return z > 0.0 ? z : 0.0;
    case Activation::sigmoid:
      return 1.0 / (1.0 + std::exp(-z));
    case Activation::tanh:
      return std::tanh(z);
  }
  return z;
}

// Derivative in terms of pre-activation z and post-activation a.
double activation_derivative(Activation activation, double z, double a) {
  switch (activation) {
    case Activation::linear:
      return 1.0;
    case Activation::relu:
      return z > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid:
      return a * (1.0 - a);
    case Activation::tanh:
      return 1.0 - a * a;
  }
  return 1.0;
}

struct ForwardCache {
  std::vector<std::vector<double>> pre;   // z per layer
  std::vector<std::vector<double>> post;  // a per layer (post[0] unused; input passed separately)
};

void forward_cached(const DenseNetwork& net, const double* input, ForwardCache& cache) {
  const std::size_t depth = net.layers.size();
  cache.pre.resize(depth);
  cache.post.resize(depth);
  const double* a = input;
  for (std::size_t l = 0; l < depth; ++l) {
    const Layer& layer = net.layers[l];
    const std::size_t out = layer.weights.rows;
    const std::size_t in = layer.weights.cols;
    cache.pre[l].assign(out, 0.0);
    cache.post[l].assign(out, 0.0);
    for (std::size_t i = 0; i < out; ++i) {
      const double* w = layer.weights.row(i);
      double z = layer.bias[i];
      for (std::size_t j = 0; j < in; ++j) z += w[j] * a[j];
      cache.pre[l][i] = z;
      cache.post[l][i] = apply_activation(layer.activation, z);
    }
    a = cache.post[l].data();
  }
}

// Backward pass from dL/dz of the last layer. Writes the flat parameter
// gradient and, when requested, the gradient w.r.t. the network input.
void backprop_from_delta(const DenseNetwork& net, const double* input,
                         const ForwardCache& cache, std::vector<double> delta,
                         double* param_grad, std::vector<double>* input_grad) {
  const std::size_t depth = net.layers.size();

  std::vector<std::size_t> offsets(depth);
  std::size_t offset = 0;
  for (std::size_t l = 0; l < depth; ++l) {
    offsets[l] = offset;
    offset += net.layers[l].weights.data.size() + net.layers[l].bias.size();
  }

  for (std::size_t li = depth; li-- > 0;) {
    const Layer& layer = net.layers[li];
    const std::size_t out = layer.weights.rows;
    const std::size_t in = layer.weights.cols;
    const double* a_prev = (li == 0) ? input : cache.post[li - 1].data();

    double* gw = param_grad + offsets[li];
    double* gb = gw + out * in;
    for (std::size_t i = 0; i < out; ++i) {
      const double d = delta[i];
      double* gw_row = gw + i * in;
      for (std::size_t j = 0; j < in; ++j) gw_row[j] = d * a_prev[j];
      gb[i] = d;
    }

    if (li == 0) {
      if (input_grad != nullptr) {
        input_grad->assign(in, 0.0);
        for (std::size_t i = 0; i < out; ++i) {
          const double d = delta[i];
          const double* w = layer.weights.row(i);
          for (std::size_t j = 0; j < in; ++j) (*input_grad)[j] += w[j] * d;
        }
      }
      break;
    }

    const Layer& prev = net.layers[li - 1];
    std::vector<double> next_delta(in, 0.0);
    for (std::size_t i = 0; i < out; ++i) {
      const double d = delta[i];
      const double* w = layer.weights.row(i);
      for (std::size_t j = 0; j < in; ++j) next_delta[j] += w[j] * d;
    }
    for (std::size_t j = 0; j < in; ++j) {
      next_delta[j] *= activation_derivative(prev.activation, cache.pre[li - 1][j],
                                             cache.post[li - 1][j]);
    }
    delta = std::move(next_delta);
  }
}

// dL/dz at the output layer for the given loss. The sigmoid +
// binary-cross-entropy pair is fused for numerical stability.
std::vector<double> output_delta(const DenseNetwork& net, Loss loss,
                                 const ForwardCache& cache, const double* target) {
  const Layer& last = net.layers.back();
  const std::size_t out = last.weights.rows;
  const std::vector<double>& y = cache.post.back();
  const double inv_out = 1.0 / static_cast<double>(out);

  std::vector<double> delta(out);
  if (loss == Loss::mse) {
    for (std::size_t i = 0; i < out; ++i) {
      const double da = 2.0 * (y[i] - target[i]) * inv_out;
      delta[i] = da * activation_derivative(last.activation, cache.pre.back()[i], y[i]);
    }
    return delta;
  }
  // binary cross-entropy
  if (last.activation == Activation::sigmoid) {
    for (std::size_t i = 0; i < out; ++i) delta[i] = (y[i] - target[i]) * inv_out;
    return delta;
  }
  for (std::size_t i = 0; i < out; ++i) {
    const double yc = std::min(std::max(y[i], 1e-12), 1.0 - 1e-12);
    const double da = (yc - target[i]) / (yc * (1.0 - yc)) * inv_out;
    delta[i] = da * activation_derivative(last.activation, cache.pre.back()[i], y[i]);
  }
  return delta;
}

void example_gradient_into(const DenseNetwork& net, Loss loss, const double* input,
                           const double* target, double* grad_row) {
  ForwardCache cache;
  forward_cached(net, input, cache);
  backprop_from_delta(net, input, cache, output_delta(net, loss, cache, target),
                      grad_row, nullptr);
}

void check_batch_shapes(const DenseNetwork& net, const Matrix& batch,
                        const Matrix& targets) {
  if (batch.cols != net.in_dim()) {
    throw InputError("batch width does not match network input dimension");
  }
  if (targets.cols != net.out_dim() || targets.rows != batch.rows) {
    throw InputError("target shape does not match network output");
  }
}

}  // namespace

Activation activation_from_string(const std::string& name) {
  if (name == "linear") return Activation::linear;
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  throw InputError("unknown activation '" + name + "'");
}

std::string to_string(Activation activation) {
  switch (activation) {
    case Activation::linear:
      return "linear";
    case Activation::relu:
      return "relu";
    case Activation::sigmoid:
      return "sigmoid";
    case Activation::tanh:
      return "tanh";
  }
  return "linear";
}

Loss loss_from_string(const std::string& name) {
  if (name == "mse") return Loss::mse;
  if (name == "binary-cross-entropy") return Loss::binary_cross_entropy;
  throw InputError("unknown loss '" + name + "'");
}

std::string to_string(Loss loss) {
  return loss == Loss::mse ? "mse" : "binary-cross-entropy";
}

std::size_t DenseNetwork::in_dim() const {
  if (layers.empty()) throw Error("network has no layers");
  return layers.front().weights.cols;
}

std::size_t DenseNetwork::out_dim() const {
  if (layers.empty()) throw Error("network has no layers");
  return layers.back().weights.rows;
}

std::size_t DenseNetwork::parameter_count() const {
  std::size_t count = 0;
  for (const Layer& layer : layers) {
    count += layer.weights.data.size() + layer.bias.size();
  }
  return count;
}

DenseNetwork make_network(const std::vector<std::size_t>& dims,
                          const std::vector<Activation>& activations, Rng& rng,
                          double init_gain) {
  if (dims.size() < 2 || activations.size() != dims.size() - 1) {
    throw InputError("network shape and activation list do not match");
  }
  DenseNetwork net;
  net.layers.resize(dims.size() - 1);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer& layer = net.layers[l];
    layer.weights = Matrix(dims[l + 1], dims[l]);
    layer.bias.assign(dims[l + 1], 0.0);
    layer.activation = activations[l];
    const double bound = init_gain * std::sqrt(6.0 / static_cast<double>(dims[l]));
    for (double& w : layer.weights.data) w = (2.0 * rng.uniform() - 1.0) * bound;
  }
  return net;
}

std::vector<double> forward_one(const DenseNetwork& net, const double* input) {
  ForwardCache cache;
  forward_cached(net, input, cache);
  return cache.post.back();
}

Matrix forward(const DenseNetwork& net, const Matrix& batch) {
  if (batch.cols != net.in_dim()) {
    throw InputError("batch width does not match network input dimension");
  }
  Matrix out(batch.rows, net.out_dim());
  const std::int64_t m = static_cast<std::int64_t>(batch.rows);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) {
    const std::vector<double> y = forward_one(net, batch.row(i));
    std::memcpy(out.row(i), y.data(), y.size() * sizeof(double));
  }
  return out;
}

double example_loss(const DenseNetwork& net, Loss loss, const double* input,
                    const double* target) {
  const std::vector<double> y = forward_one(net, input);
  const double inv_out = 1.0 / static_cast<double>(y.size());
  double total = 0.0;
  if (loss == Loss::mse) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double diff = y[i] - target[i];
      total += diff * diff;
    }
  } else {
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double yc = std::min(std::max(y[i], 1e-12), 1.0 - 1e-12);
      total -= target[i] * std::log(yc) + (1.0 - target[i]) * std::log(1.0 - yc);
    }
  }
  return total * inv_out;
}

double batch_loss(const DenseNetwork& net, Loss loss, const Matrix& batch,
                  const Matrix& targets) {
  check_batch_shapes(net, batch, targets);
  if (batch.rows == 0) return 0.0;
  std::vector<double> losses(batch.rows);
  const std::int64_t m = static_cast<std::int64_t>(batch.rows);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) {
    losses[i] = example_loss(net, loss, batch.row(i), targets.row(i));
  }
  double total = 0.0;
  for (double v : losses) total += v;
  return total / static_cast<double>(batch.rows);
}

Matrix per_example_gradients(const DenseNetwork& net, Loss loss,
                             const Matrix& batch, const Matrix& targets) {
  check_batch_shapes(net, batch, targets);
  Matrix grads(batch.rows, net.parameter_count());
  const std::int64_t m = static_cast<std::int64_t>(batch.rows);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) {
    example_gradient_into(net, loss, batch.row(i), targets.row(i), grads.row(i));
  }
  return grads;
}

Matrix per_example_gradients_serial(const DenseNetwork& net, Loss loss,
                                    const Matrix& batch, const Matrix& targets) {
  check_batch_shapes(net, batch, targets);
  Matrix grads(batch.rows, net.parameter_count());
  for (std::size_t i = 0; i < batch.rows; ++i) {
    example_gradient_into(net, loss, batch.row(i), targets.row(i), grads.row(i));
  }
  return grads;
}

std::vector<double> batch_gradient(const DenseNetwork& net, Loss loss,
                                   const Matrix& batch, const Matrix& targets) {
  check_batch_shapes(net, batch, targets);
  if (batch.rows == 0) throw InputError("batch is empty");
  std::vector<double> sum(net.parameter_count(), 0.0);
  std::vector<double> scratch(net.parameter_count());
  for (std::size_t i = 0; i < batch.rows; ++i) {
    example_gradient_into(net, loss, batch.row(i), targets.row(i), scratch.data());
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += scratch[k];
  }
  const double inv_m = 1.0 / static_cast<double>(batch.rows);
  for (double& v : sum) v *= inv_m;
  return sum;
}

BackpropResult backprop_example(const DenseNetwork& net, const double* input,
                                const std::vector<double>& output_grad) {
  if (output_grad.size() != net.out_dim()) {
    throw InputError("output gradient length does not match network output");
  }
  ForwardCache cache;
  forward_cached(net, input, cache);

  const Layer& last = net.layers.back();
  std::vector<double> delta(output_grad.size());
  for (std::size_t i = 0; i < delta.size(); ++i) {
    delta[i] = output_grad[i] * activation_derivative(last.activation,
                                                      cache.pre.back()[i],
                                                      cache.post.back()[i]);
  }

  BackpropResult result;
  result.param_grad.assign(net.parameter_count(), 0.0);
  backprop_from_delta(net, input, cache, std::move(delta),
                      result.param_grad.data(), &result.input_grad);
  return result;
}

void apply_update(DenseNetwork& net, const std::vector<double>& gradient,
                  double learning_rate) {
  if (gradient.size() != net.parameter_count()) {
    throw InputError("gradient length does not match parameter count");
  }
  std::size_t k = 0;
  for (Layer& layer : net.layers) {
    for (double& w : layer.weights.data) w -= learning_rate * gradient[k++];
    for (double& b : layer.bias) b -= learning_rate * gradient[k++];
  }
}

std::vector<double> flatten_parameters(const DenseNetwork& net) {
  std::vector<double> flat;
  flat.reserve(net.parameter_count());
  for (const Layer& layer : net.layers) {
    flat.insert(flat.end(), layer.weights.data.begin(), layer.weights.data.end());
    flat.insert(flat.end(), layer.bias.begin(), layer.bias.end());
  }
  return flat;
}

std::vector<double> time_embedding(double t, std::size_t dim) {
  if (dim == 0 || dim % 2 != 0) {
    throw InputError("time embedding dimension must be even and positive");
  }
  if (t < 0.0) throw InputError("time embedding step must be non-negative");
  std::vector<double> out(dim);
  for (std::size_t k = 0; k < dim / 2; ++k) {
    const double omega =
        std::pow(10000.0, -2.0 * static_cast<double>(k) / static_cast<double>(dim));
    out[2 * k] = std::sin(t * omega);
    out[2 * k + 1] = std::cos(t * omega);
  }
  return out;
}

}  // namespace logveil
