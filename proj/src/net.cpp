#include "edgeq/net.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace edgeq {

namespace {

void check_sizes(const std::vector<std::size_t>& sizes) {
  if (sizes.size() < 2) {
    throw std::invalid_argument("network needs at least input and output sizes");
  }
  for (const std::size_t s : sizes) {
    if (s == 0) throw std::invalid_argument("network layer sizes must be >= 1");
  }
}

}  // namespace

QNetwork::QNetwork(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
  check_sizes(sizes_);
  layers_.resize(sizes_.size() - 1);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    layers_[l].in = sizes_[l];
    layers_[l].out = sizes_[l + 1];
    layers_[l].w.assign(layers_[l].in * layers_[l].out, 0.0);
    layers_[l].b.assign(layers_[l].out, 0.0);
  }
}

QNetwork QNetwork::glorot(std::vector<std::size_t> layer_sizes, Rng& rng) {
  QNetwork net(std::move(layer_sizes));
  for (Layer& layer : net.layers_) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    for (double& w : layer.w) w = rng.uniform(-limit, limit);
    // biases stay zero
  }
  return net;
}

std::size_t QNetwork::in_dim() const {
  if (sizes_.empty()) throw std::logic_error("uninitialized network");
  return sizes_.front();
}

std::size_t QNetwork::out_dim() const {
  if (sizes_.empty()) throw std::logic_error("uninitialized network");
  return sizes_.back();
}

std::size_t QNetwork::param_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers_) n += l.w.size() + l.b.size();
  return n;
}

std::vector<double> QNetwork::flatten() const {
  std::vector<double> out;
  out.reserve(param_count());
  for (const Layer& l : layers_) {
    out.insert(out.end(), l.w.begin(), l.w.end());
    out.insert(out.end(), l.b.begin(), l.b.end());
  }
  return out;
}

void QNetwork::unflatten(std::span<const double> params) {
  if (params.size() != param_count()) {
    throw std::invalid_argument("unflatten: parameter count mismatch");
  }
  std::size_t pos = 0;
  for (Layer& l : layers_) {
    std::copy_n(params.begin() + pos, l.w.size(), l.w.begin());
    pos += l.w.size();
    std::copy_n(params.begin() + pos, l.b.size(), l.b.begin());
    pos += l.b.size();
  }
}

void QNetwork::forward_trace(std::span<const double> input,
                             std::vector<std::vector<double>>& activations) const {
  if (input.size() != in_dim()) {
    throw std::invalid_argument("forward: input arity mismatch");
  }
  for (const double v : input) {
    if (!std::isfinite(v)) throw std::invalid_argument("forward: non-finite input");
  }
  activations.resize(layers_.size() + 1);
  activations[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    const std::vector<double>& x = activations[l];
    std::vector<double>& y = activations[l + 1];
    y.assign(layer.out, 0.0);
    const bool hidden = l + 1 < layers_.size();
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double* row = &layer.w[o * layer.in];
      double acc = layer.b[o];
      for (std::size_t k = 0; k < layer.in; ++k) acc += row[k] * x[k];
      y[o] = hidden && acc < 0.0 ? 0.0 : acc;
    }
  }
}

std::vector<double> QNetwork::forward(std::span<const double> input) const {
  std::vector<std::vector<double>> acts;
  forward_trace(input, acts);
  return std::move(acts.back());
}

bool QNetwork::same_shape(const QNetwork& other) const { return sizes_ == other.sizes_; }

Gradient Gradient::zeros_like(const QNetwork& net) {
  Gradient g;
  g.layers.resize(net.layers().size());
  for (std::size_t l = 0; l < g.layers.size(); ++l) {
    const auto& src = net.layers()[l];
    g.layers[l].in = src.in;
    g.layers[l].out = src.out;
    g.layers[l].w.assign(src.w.size(), 0.0);
    g.layers[l].b.assign(src.b.size(), 0.0);
  }
  return g;
}

void Gradient::scale(double factor) {
  for (auto& l : layers) {
    for (double& v : l.w) v *= factor;
    for (double& v : l.b) v *= factor;
  }
}

void sgd_update(QNetwork& net, const Gradient& grad, double learning_rate) {
  if (grad.layers.size() != net.layers().size()) {
    throw std::invalid_argument("sgd_update: gradient shape mismatch");
  }
  for (std::size_t l = 0; l < grad.layers.size(); ++l) {
    auto& layer = net.layers()[l];
    const auto& g = grad.layers[l];
    if (g.w.size() != layer.w.size() || g.b.size() != layer.b.size()) {
      throw std::invalid_argument("sgd_update: gradient shape mismatch");
    }
    for (std::size_t k = 0; k < layer.w.size(); ++k) layer.w[k] -= learning_rate * g.w[k];
    for (std::size_t k = 0; k < layer.b.size(); ++k) layer.b[k] -= learning_rate * g.b[k];
  }
}

void save_checkpoint(const QNetwork& net, const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  doc["format_version"] = 1;
  doc["layer_sizes"] = net.layer_sizes();
  auto& layers = doc["layers"] = nlohmann::ordered_json::array();
  for (const auto& l : net.layers()) {
    nlohmann::ordered_json jl;
    jl["weights"] = l.w;  // row-major, out x in
    jl["biases"] = l.b;
    layers.push_back(std::move(jl));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("save_checkpoint: cannot open '" + path.string() + "'");
  }
  out << doc.dump(2) << '\n';
  if (!out) {
    throw std::runtime_error("save_checkpoint: write to '" + path.string() + "' failed");
  }
}

QNetwork load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("load_checkpoint: cannot open '" + path.string() + "'");
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_checkpoint: '" + path.string() +
                             "' is not valid JSON: " + e.what());
  }
  if (!doc.contains("format_version") || doc["format_version"] != 1) {
    throw std::runtime_error("load_checkpoint: unsupported format version in '" +
                             path.string() + "'");
  }
  const auto sizes = doc.at("layer_sizes").get<std::vector<std::size_t>>();
  QNetwork net(sizes);
  const auto& layers = doc.at("layers");
  if (!layers.is_array() || layers.size() != net.layers().size()) {
    throw std::runtime_error("load_checkpoint: layer count mismatch in '" + path.string() + "'");
  }
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    auto w = layers[l].at("weights").get<std::vector<double>>();
    auto b = layers[l].at("biases").get<std::vector<double>>();
    auto& layer = net.layers()[l];
    if (w.size() != layer.w.size() || b.size() != layer.b.size()) {
      throw std::runtime_error("load_checkpoint: layer shape mismatch in '" + path.string() + "'");
    }
    layer.w = std::move(w);
    layer.b = std::move(b);
  }
  return net;
}

}  // namespace edgeq
