#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "delenox/image_io.hpp"
#include "delenox/random.hpp"
#include "delenox/sprite.hpp"

namespace delenox {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Single-hidden-layer denoising autoencoder with tied weights:
///   Q  = sig(W P + B)
///   P' = sig(W^T Q + B')
/// W is N x D (features x inputs). There is no separate decoder matrix.
class DenoisingAutoencoder {
 public:
  DenoisingAutoencoder(int features, int inputs);
  DenoisingAutoencoder(Matrix weights, Vector encoder_bias, Vector decoder_bias);

  int features() const { return static_cast<int>(weights_.rows()); }
  int inputs() const { return static_cast<int>(weights_.cols()); }

  const Matrix& weights() const { return weights_; }
  const Vector& encoder_bias() const { return encoder_bias_; }
  const Vector& decoder_bias() const { return decoder_bias_; }

  Matrix& weights() { return weights_; }
  Vector& encoder_bias() { return encoder_bias_; }
  Vector& decoder_bias() { return decoder_bias_; }

  friend bool operator==(const DenoisingAutoencoder& a, const DenoisingAutoencoder& b) {
    return a.weights_ == b.weights_ && a.encoder_bias_ == b.encoder_bias_ &&
           a.decoder_bias_ == b.decoder_bias_;
  }

 private:
  Matrix weights_;
  Vector encoder_bias_;
  Vector decoder_bias_;
};

/// Masking noise: each element is zeroed with probability `rate`, otherwise
/// kept. Never turns a 0 into a 1.
std::vector<double> corrupt(std::span<const double> input, double rate, Rng& rng);

Vector encode(const DenoisingAutoencoder& da, std::span<const double> input);
Vector decode(const DenoisingAutoencoder& da, std::span<const double> features);

/// Mean squared error over pixels between decode(encode(input)) and input.
double reconstruction_mse(const DenoisingAutoencoder& da, std::span<const double> input);

struct Gradient {
  Matrix weights;
  Vector encoder_bias;
  Vector decoder_bias;
};

/// SGD objective for one example: 0.5 * sum_j (P'_j - target_j)^2 where P' is
/// reconstructed from `corrupted`. Writes the gradient with respect to every
/// parameter into `grad`; the weight gradient sums the encoder and decoder
/// paths through the shared matrix. Returns the objective.
double objective_and_gradient(const DenoisingAutoencoder& da, std::span<const double> corrupted,
                              std::span<const double> target, Gradient& grad);

struct TrainConfig {
  int epochs = 1000;
  double corruption_rate = 0.10;
  /// Step size applied to the gradient of objective_and_gradient().
  double learning_rate = 0.1;
  /// Examples per update. 1 = plain per-example SGD.
  int batch_size = 1;
  int features = 64;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainResult {
  DenoisingAutoencoder model;
  /// Per-epoch mean over examples of the per-pixel MSE between the
  /// reconstruction of the corrupted input and the clean input.
  std::vector<double> loss_curve;
};

TrainResult train(const std::vector<std::vector<double>>& dataset, const TrainConfig& config);

/// One grayscale image per feature, laid out like the half-sprite
/// (ceil(W/2) wide, H tall). Weights are rescaled per feature so the minimum
/// maps to 0 (black) and the maximum to 255 (white); constant features are
/// uniform mid-gray (128).
std::vector<GrayImage> feature_images(const DenoisingAutoencoder& da, SpriteShape shape);

/// Binary model file, little-endian:
///   "DLNXDAE\0" | u32 version | u32 N | u32 D | W (N*D f64, row-major) | B (N f64) | B' (D f64)
void save_model(const DenoisingAutoencoder& da, const std::filesystem::path& path);
DenoisingAutoencoder load_model(const std::filesystem::path& path);
std::vector<std::uint8_t> model_bytes(const DenoisingAutoencoder& da);
DenoisingAutoencoder model_from_bytes(std::span<const std::uint8_t> bytes);

}  // namespace delenox
