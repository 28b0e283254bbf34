#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "edgeq/rng.hpp"

namespace edgeq {

// Fully connected network with ReLU hidden layers and a linear output layer.
// Double precision throughout; weights are row-major (out x in).
class QNetwork {
 public:
  struct Layer {
    std::size_t in = 0, out = 0;
    std::vector<double> w;  // out * in, row-major
    std::vector<double> b;  // out
  };

  QNetwork() = default;
  // Zero-initialized network; layer_sizes = [input, hidden..., output].
  explicit QNetwork(std::vector<std::size_t> layer_sizes);

  static QNetwork glorot(std::vector<std::size_t> layer_sizes, Rng& rng);

  std::size_t in_dim() const;
  std::size_t out_dim() const;
  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }
  std::size_t param_count() const;

  // Flat parameter view in layer order (weights then biases per layer).
  std::vector<double> flatten() const;
  void unflatten(std::span<const double> params);

  // Validates arity and finiteness of the input.
  std::vector<double> forward(std::span<const double> input) const;

  // Forward pass that keeps post-activation values per layer for backprop.
  // activations[0] is the input copy; activations.back() is the output.
  void forward_trace(std::span<const double> input,
                     std::vector<std::vector<double>>& activations) const;

  bool same_shape(const QNetwork& other) const;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<Layer> layers_;
};

// Gradient with the same storage shape as the network it was taken from.
struct Gradient {
  std::vector<QNetwork::Layer> layers;

  static Gradient zeros_like(const QNetwork& net);
  void scale(double factor);
};

// Plain SGD: theta <- theta - lr * grad.
void sgd_update(QNetwork& net, const Gradient& grad, double learning_rate);

// JSON checkpoint round-trip; load validates shape and version and restores
// parameters bit-exactly.
void save_checkpoint(const QNetwork& net, const std::filesystem::path& path);
QNetwork load_checkpoint(const std::filesystem::path& path);

}  // namespace edgeq
