#include "smoothq/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace smoothq::mlp {

namespace {

const char* activation_name(Activation a) { return a == Activation::kRelu ? "relu" : "identity"; }

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "identity") return Activation::kIdentity;
  throw std::runtime_error("mlp::load: unknown activation '" + name + "'");
}

void check_shapes(const MlpParams& params, const GradAccumulator& grads) {
  if (grads.weights.size() != params.layers.size() || grads.bias.size() != params.layers.size()) {
    throw std::invalid_argument("mlp: gradient layer count does not match parameters");
  }
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    const Layer& layer = params.layers[k];
    if (grads.weights[k].rows() != layer.weights.rows() || grads.weights[k].cols() != layer.weights.cols() ||
        grads.bias[k].size() != layer.bias.size()) {
      throw std::invalid_argument("mlp: gradient shape mismatch at layer " + std::to_string(k));
    }
  }
}

}  // namespace

std::vector<LayerSpec> make_architecture(std::size_t input_dim, std::size_t output_dim,
                                         std::span<const std::size_t> hidden) {
  std::vector<LayerSpec> specs;
  std::size_t in = input_dim;
  for (std::size_t width : hidden) {
    specs.push_back({in, width, Activation::kRelu});
    in = width;
  }
  specs.push_back({in, output_dim, Activation::kIdentity});
  validate_architecture(specs);
  return specs;
}

void validate_architecture(std::span<const LayerSpec> specs) {
  if (specs.empty()) throw std::invalid_argument("mlp: empty layer chain");
  for (std::size_t k = 0; k < specs.size(); ++k) {
    if (specs[k].input_dim == 0 || specs[k].output_dim == 0) {
      throw std::invalid_argument("mlp: layer " + std::to_string(k) + " has a zero dimension");
    }
    if (k > 0 && specs[k].input_dim != specs[k - 1].output_dim) {
      throw std::invalid_argument("mlp: layer " + std::to_string(k) + " input does not match previous output");
    }
  }
  if (specs.back().activation != Activation::kIdentity) {
    throw std::invalid_argument("mlp: final layer must use the identity activation");
  }
}

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& layer : layers) n += layer.weights.size() + layer.bias.size();
  return n;
}

GradAccumulator::GradAccumulator(const MlpParams& params) {
  for (const Layer& layer : params.layers) {
    weights.push_back(Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()));
    bias.push_back(Eigen::VectorXd::Zero(layer.bias.size()));
  }
}

void GradAccumulator::zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : bias) b.setZero();
}

MlpParams init_params(std::span<const LayerSpec> specs, Rng& rng) {
  validate_architecture(specs);
  MlpParams params;
  for (const LayerSpec& spec : specs) {
    Layer layer;
    const auto rows = static_cast<Eigen::Index>(spec.output_dim);
    const auto cols = static_cast<Eigen::Index>(spec.input_dim);
    const double bound = std::sqrt(6.0 / static_cast<double>(spec.input_dim + spec.output_dim));
    layer.weights.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) layer.weights(r, c) = rng.uniform(-bound, bound);
    }
    layer.bias = Eigen::VectorXd::Zero(rows);
    layer.activation = spec.activation;
    params.layers.push_back(std::move(layer));
  }
  return params;
}

const Eigen::VectorXd& forward(const MlpParams& params, const Eigen::VectorXd& input, ForwardCache& cache) {
  if (params.layers.empty()) throw std::invalid_argument("mlp::forward: no layers");
  if (static_cast<std::size_t>(input.size()) != params.input_dim()) {
    throw std::invalid_argument("mlp::forward: input has " + std::to_string(input.size()) + " entries, expected " +
                                std::to_string(params.input_dim()));
  }
  const std::size_t n = params.layers.size();
  cache.inputs.resize(n);
  cache.pre_activations.resize(n);
  cache.inputs[0] = input;
  for (std::size_t k = 0; k < n; ++k) {
    const Layer& layer = params.layers[k];
    Eigen::VectorXd& z = cache.pre_activations[k];
    z.noalias() = layer.weights * cache.inputs[k];
    z += layer.bias;
    Eigen::VectorXd& out = k + 1 < n ? cache.inputs[k + 1] : cache.output;
    out = layer.activation == Activation::kRelu ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
  }
  return cache.output;
}

Eigen::VectorXd forward(const MlpParams& params, const Eigen::VectorXd& input) {
  ForwardCache cache;
  return forward(params, input, cache);
}

void backward(const MlpParams& params, const ForwardCache& cache, const Eigen::VectorXd& output_error,
              GradAccumulator& grads) {
  check_shapes(params, grads);
  if (static_cast<std::size_t>(output_error.size()) != params.output_dim()) {
    throw std::invalid_argument("mlp::backward: error vector has " + std::to_string(output_error.size()) +
                                " entries, expected " + std::to_string(params.output_dim()));
  }
  if (cache.inputs.size() != params.layers.size()) {
    throw std::invalid_argument("mlp::backward: forward cache does not match parameters");
  }
  Eigen::VectorXd delta = output_error;
  for (std::size_t k = params.layers.size(); k-- > 0;) {
    const Layer& layer = params.layers[k];
    if (layer.activation == Activation::kRelu) {
      delta = (cache.pre_activations[k].array() > 0.0).select(delta, 0.0);
    }
    grads.weights[k].noalias() += delta * cache.inputs[k].transpose();
    grads.bias[k] += delta;
    if (k > 0) delta = layer.weights.transpose() * delta;
  }
}

GradAccumulator backward(const MlpParams& params, const Eigen::VectorXd& input,
                         const Eigen::VectorXd& output_error) {
  ForwardCache cache;
  forward(params, input, cache);
  GradAccumulator grads(params);
  backward(params, cache, output_error, grads);
  return grads;
}

void apply_update(MlpParams& params, const GradAccumulator& grads, double alpha) {
  check_shapes(params, grads);
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    params.layers[k].weights -= alpha * grads.weights[k];
    params.layers[k].bias -= alpha * grads.bias[k];
  }
}

std::vector<double> flatten(const MlpParams& params) {
  std::vector<double> out;
  out.reserve(params.parameter_count());
  for (const Layer& layer : params.layers) {
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) out.push_back(layer.weights(r, c));
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) out.push_back(layer.bias(i));
  }
  return out;
}

std::vector<double> flatten(const GradAccumulator& grads) {
  std::vector<double> out;
  for (std::size_t k = 0; k < grads.weights.size(); ++k) {
    const auto& w = grads.weights[k];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) out.push_back(w(r, c));
    }
    for (Eigen::Index i = 0; i < grads.bias[k].size(); ++i) out.push_back(grads.bias[k](i));
  }
  return out;
}

void unflatten(MlpParams& params, std::span<const double> values) {
  if (values.size() != params.parameter_count()) {
    throw std::invalid_argument("mlp::unflatten: expected " + std::to_string(params.parameter_count()) +
                                " values, got " + std::to_string(values.size()));
  }
  std::size_t i = 0;
  for (Layer& layer : params.layers) {
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = values[i++];
    }
    for (Eigen::Index j = 0; j < layer.bias.size(); ++j) layer.bias(j) = values[i++];
  }
}

void save(const MlpParams& params, std::ostream& out) {
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  out << "smoothq-mlp 1\n" << "layers " << params.layers.size() << '\n';
  for (const Layer& layer : params.layers) {
    out << "layer " << layer.weights.cols() << ' ' << layer.weights.rows() << ' '
        << activation_name(layer.activation) << '\n';
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
        if (c) out << ' ';
        put(layer.weights(r, c));
      }
      out << '\n';
    }
    for (Eigen::Index j = 0; j < layer.bias.size(); ++j) {
      if (j) out << ' ';
      put(layer.bias(j));
    }
    out << '\n';
  }
}

MlpParams load(std::istream& in) {
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "smoothq-mlp" || version != 1) {
    throw std::runtime_error("mlp::load: not a smoothq-mlp v1 checkpoint");
  }
  std::size_t count = 0;
  if (!(in >> tag >> count) || tag != "layers" || count == 0) {
    throw std::runtime_error("mlp::load: bad layer count");
  }
  std::vector<LayerSpec> specs;
  MlpParams params;
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    std::string act;
    if (!(in >> tag >> in_dim >> out_dim >> act) || tag != "layer") {
      throw std::runtime_error("mlp::load: bad header for layer " + std::to_string(k));
    }
    specs.push_back({in_dim, out_dim, parse_activation(act)});
    Layer layer;
    layer.activation = specs.back().activation;
    layer.weights.resize(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(in_dim));
    layer.bias.resize(static_cast<Eigen::Index>(out_dim));
    // operator>> does not parse "inf"/"nan"; checkpoints only ever hold finite values.
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
        if (!(in >> layer.weights(r, c))) throw std::runtime_error("mlp::load: truncated weights");
      }
    }
    for (Eigen::Index j = 0; j < layer.bias.size(); ++j) {
      if (!(in >> layer.bias(j))) throw std::runtime_error("mlp::load: truncated bias");
    }
    params.layers.push_back(std::move(layer));
  }
  try {
    validate_architecture(specs);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("mlp::load: ") + e.what());
  }
  return params;
}

}  // namespace smoothq::mlp
