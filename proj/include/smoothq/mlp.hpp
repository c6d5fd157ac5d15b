#pragma once

// Small fully connected network with hand-written backpropagation. Serves as
// the parametric action-value function: one output per discrete action.

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "smoothq/rng.hpp"

namespace smoothq::mlp {

enum class Activation { kRelu, kIdentity };

struct LayerSpec {
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  Activation activation = Activation::kIdentity;
};

inline constexpr std::size_t kDefaultHiddenWidths[] = {64, 64};
inline constexpr std::span<const std::size_t> kDefaultHidden{kDefaultHiddenWidths};

/// Hidden rectifier layers of the given widths followed by an identity head.
std::vector<LayerSpec> make_architecture(std::size_t input_dim, std::size_t output_dim,
                                         std::span<const std::size_t> hidden = kDefaultHidden);

/// Throws std::invalid_argument unless the chain is non-empty, dimensions are
/// positive and consecutive, and the last layer is an identity.
void validate_architecture(std::span<const LayerSpec> specs);

struct Layer {
  Eigen::MatrixXd weights;  // output_dim x input_dim
  Eigen::VectorXd bias;
  Activation activation = Activation::kIdentity;
};

struct MlpParams {
  std::vector<Layer> layers;

  std::size_t input_dim() const { return layers.front().weights.cols(); }
  std::size_t output_dim() const { return layers.back().weights.rows(); }
  std::size_t parameter_count() const;
};

/// Same shapes as MlpParams.
struct GradAccumulator {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> bias;

  GradAccumulator() = default;
  explicit GradAccumulator(const MlpParams& params);
  void zero();
};

/// Pre-activations and activations of one forward pass, reused by backward.
struct ForwardCache {
  std::vector<Eigen::VectorXd> inputs;  // inputs[k] feeds layer k
  std::vector<Eigen::VectorXd> pre_activations;
  Eigen::VectorXd output;
};

/// Glorot-uniform weights, zero biases.
MlpParams init_params(std::span<const LayerSpec> specs, Rng& rng);

Eigen::VectorXd forward(const MlpParams& params, const Eigen::VectorXd& input);
const Eigen::VectorXd& forward(const MlpParams& params, const Eigen::VectorXd& input, ForwardCache& cache);

/// Adds the parameter gradient of a loss whose derivative with respect to the
/// network outputs is `output_error` into `grads`.
void backward(const MlpParams& params, const ForwardCache& cache, const Eigen::VectorXd& output_error,
              GradAccumulator& grads);
GradAccumulator backward(const MlpParams& params, const Eigen::VectorXd& input,
                         const Eigen::VectorXd& output_error);

/// theta -= alpha * grads.
void apply_update(MlpParams& params, const GradAccumulator& grads, double alpha);

/// Parameters in layer order: weights row-major, then bias.
std::vector<double> flatten(const MlpParams& params);
std::vector<double> flatten(const GradAccumulator& grads);
void unflatten(MlpParams& params, std::span<const double> values);

/// Text checkpoint: a shape header per layer followed by row-major weights and
/// the bias, printed with round-trip precision.
void save(const MlpParams& params, std::ostream& out);
MlpParams load(std::istream& in);

}  // namespace smoothq::mlp
