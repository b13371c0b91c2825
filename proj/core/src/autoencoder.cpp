#include "delenox/autoencoder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>

#include <fmt/format.h>

#include "delenox/error.hpp"

namespace delenox {

namespace {

using ConstMap = Eigen::Map<const Vector>;

ConstMap as_vector(std::span<const double> values) {
  return ConstMap(values.data(), static_cast<Eigen::Index>(values.size()));
}

template <typename Derived>
Vector logistic(const Eigen::MatrixBase<Derived>& x) {
  return (1.0 + (-x.array()).exp()).inverse().matrix();
}

void check_length(std::size_t got, int expected, const char* what) {
  if (got != static_cast<std::size_t>(expected)) {
    throw ContractViolation(fmt::format("{} has length {}, expected {}", what, got, expected));
  }
}

}  // namespace

DenoisingAutoencoder::DenoisingAutoencoder(int features, int inputs)
    : weights_(Matrix::Zero(features, inputs)),
      encoder_bias_(Vector::Zero(features)),
      decoder_bias_(Vector::Zero(inputs)) {
  if (features <= 0 || inputs <= 0) throw ContractViolation("autoencoder dimensions must be positive");
}

DenoisingAutoencoder::DenoisingAutoencoder(Matrix weights, Vector encoder_bias, Vector decoder_bias)
    : weights_(std::move(weights)),
      encoder_bias_(std::move(encoder_bias)),
      decoder_bias_(std::move(decoder_bias)) {
  if (weights_.rows() == 0 || weights_.cols() == 0) {
    throw ContractViolation("autoencoder dimensions must be positive");
  }
  if (encoder_bias_.size() != weights_.rows() || decoder_bias_.size() != weights_.cols()) {
    throw ContractViolation("autoencoder bias lengths do not match the weight matrix");
  }
}

std::vector<double> corrupt(std::span<const double> input, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ContractViolation("corruption rate outside [0,1]");
  std::vector<double> out(input.begin(), input.end());
  for (double& v : out) {
    if (bernoulli(rng, rate)) v = 0.0;
  }
  return out;
}

Vector encode(const DenoisingAutoencoder& da, std::span<const double> input) {
  check_length(input.size(), da.inputs(), "encoder input");
  return logistic(da.weights() * as_vector(input) + da.encoder_bias());
}

Vector decode(const DenoisingAutoencoder& da, std::span<const double> features) {
  check_length(features.size(), da.features(), "decoder input");
  return logistic(da.weights().transpose() * as_vector(features) + da.decoder_bias());
}

double reconstruction_mse(const DenoisingAutoencoder& da, std::span<const double> input) {
  const Vector q = encode(da, input);
  const Vector p = decode(da, std::span<const double>(q.data(), static_cast<std::size_t>(q.size())));
  return (p - as_vector(input)).squaredNorm() / static_cast<double>(input.size());
}

double objective_and_gradient(const DenoisingAutoencoder& da, std::span<const double> corrupted,
                              std::span<const double> target, Gradient& grad) {
  check_length(corrupted.size(), da.inputs(), "corrupted input");
  check_length(target.size(), da.inputs(), "target");
  const auto p = as_vector(corrupted);
  const Matrix& w = da.weights();

  const Vector q = logistic(w * p + da.encoder_bias());
  const Vector y = logistic(w.transpose() * q + da.decoder_bias());
  const Vector err = y - as_vector(target);

  const Vector delta_out = err.array() * y.array() * (1.0 - y.array());
  const Vector delta_hidden = (w * delta_out).array() * q.array() * (1.0 - q.array());

  grad.decoder_bias = delta_out;
  grad.encoder_bias = delta_hidden;
  grad.weights.noalias() = delta_hidden * p.transpose();
  grad.weights.noalias() += q * delta_out.transpose();
  return 0.5 * err.squaredNorm();
}

namespace {

// Per-example SGD update, same arithmetic as objective_and_gradient() followed
// by params -= rate * gradient, without materialising the weight gradient.
double sgd_step(DenoisingAutoencoder& da, std::span<const double> corrupted, std::span<const double> target,
                double rate) {
  const auto p = as_vector(corrupted);
  Matrix& w = da.weights();

  const Vector q = logistic(w * p + da.encoder_bias());
  const Vector y = logistic(w.transpose() * q + da.decoder_bias());
  const Vector err = y - as_vector(target);

  const Vector delta_out = err.array() * y.array() * (1.0 - y.array());
  const Vector delta_hidden = (w * delta_out).array() * q.array() * (1.0 - q.array());

  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    w.row(i) -= (rate * delta_hidden(i)) * p.transpose() + (rate * q(i)) * delta_out.transpose();
  }
  da.encoder_bias() -= rate * delta_hidden;
  da.decoder_bias() -= rate * delta_out;
  return 0.5 * err.squaredNorm();
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 0) throw ContractViolation("epochs must be non-negative");
  if (!(corruption_rate >= 0.0 && corruption_rate <= 1.0)) {
    throw ContractViolation("corruption rate outside [0,1]");
  }
  if (!(learning_rate > 0.0)) throw ContractViolation("learning rate must be positive");
  if (batch_size < 1) throw ContractViolation("batch size must be at least 1");
  if (features < 1) throw ContractViolation("feature count must be at least 1");
}

TrainResult train(const std::vector<std::vector<double>>& dataset, const TrainConfig& config) {
  config.validate();
  if (dataset.empty()) throw ContractViolation("cannot train an autoencoder on an empty dataset");
  const int inputs = static_cast<int>(dataset.front().size());
  for (const auto& example : dataset) check_length(example.size(), inputs, "training example");

  DenoisingAutoencoder da(config.features, inputs);
  {
    Rng init = make_rng(config.seed, "da-init");
    const double bound = 1.0 / std::sqrt(static_cast<double>(inputs));
    for (Eigen::Index r = 0; r < da.weights().rows(); ++r) {
      for (Eigen::Index c = 0; c < da.weights().cols(); ++c) da.weights()(r, c) = uniform(init, -bound, bound);
    }
  }

  TrainResult result{std::move(da), {}};
  DenoisingAutoencoder& model = result.model;
  result.loss_curve.reserve(static_cast<std::size_t>(config.epochs));

  Gradient step{Matrix::Zero(config.features, inputs), Vector::Zero(config.features), Vector::Zero(inputs)};
  Gradient batch = step;
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng = make_rng(config.seed, "da-epoch", {static_cast<std::uint64_t>(epoch)});
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0.0;
    if (config.batch_size == 1) {
      for (std::size_t i : order) {
        const auto& clean = dataset[i];
        const std::vector<double> noisy = corrupt(clean, config.corruption_rate, rng);
        loss_sum += 2.0 * sgd_step(model, noisy, clean, config.learning_rate) / static_cast<double>(inputs);
      }
    } else {
      for (std::size_t pos = 0; pos < order.size();) {
        const std::size_t end = std::min(order.size(), pos + static_cast<std::size_t>(config.batch_size));
        for (std::size_t i = pos; i < end; ++i) {
          const auto& clean = dataset[order[i]];
          const std::vector<double> noisy = corrupt(clean, config.corruption_rate, rng);
          loss_sum += 2.0 * objective_and_gradient(model, noisy, clean, step) / static_cast<double>(inputs);
          if (i == pos) {
            batch.weights = step.weights;
            batch.encoder_bias = step.encoder_bias;
            batch.decoder_bias = step.decoder_bias;
          } else {
            batch.weights += step.weights;
            batch.encoder_bias += step.encoder_bias;
            batch.decoder_bias += step.decoder_bias;
          }
        }
        const double scale = config.learning_rate / static_cast<double>(end - pos);
        model.weights() -= scale * batch.weights;
        model.encoder_bias() -= scale * batch.encoder_bias;
        model.decoder_bias() -= scale * batch.decoder_bias;
        pos = end;
      }
    }
    result.loss_curve.push_back(loss_sum / static_cast<double>(dataset.size()));
  }
  return result;
}

std::vector<GrayImage> feature_images(const DenoisingAutoencoder& da, SpriteShape shape) {
  if (da.inputs() != shape.half_size()) {
    throw ContractViolation("autoencoder input size does not match the half-sprite layout");
  }
  std::vector<GrayImage> images;
  images.reserve(static_cast<std::size_t>(da.features()));
  for (int f = 0; f < da.features(); ++f) {
    const auto row = da.weights().row(f);
    const double lo = row.minCoeff();
    const double hi = row.maxCoeff();
    GrayImage image(shape.half_width(), shape.height, 128);
    if (hi > lo) {
      for (int x = 0; x < shape.half_width(); ++x) {
        for (int y = 0; y < shape.height; ++y) {
          const double v = row(x * shape.height + y);
          image.at(x, y) = static_cast<std::uint8_t>(std::lround(255.0 * (v - lo) / (hi - lo)));
        }
      }
    }
    images.push_back(std::move(image));
  }
  return images;
}

namespace {

constexpr char kModelMagic[8] = {'D', 'L', 'N', 'X', 'D', 'A', 'E', '\0'};
constexpr std::uint32_t kModelVersion = 1;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t& offset) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  if (offset + sizeof(T) > bytes.size()) throw FormatError("truncated autoencoder model");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(bytes[offset + i]) << (8 * i);
  offset += sizeof(T);
  return std::bit_cast<T>(bits);
}

}  // namespace

std::vector<std::uint8_t> model_bytes(const DenoisingAutoencoder& da) {
  std::vector<std::uint8_t> out(std::begin(kModelMagic), std::end(kModelMagic));
  put_le(out, kModelVersion);
  put_le(out, static_cast<std::uint32_t>(da.features()));
  put_le(out, static_cast<std::uint32_t>(da.inputs()));
  for (Eigen::Index r = 0; r < da.weights().rows(); ++r) {
    for (Eigen::Index c = 0; c < da.weights().cols(); ++c) put_le(out, da.weights()(r, c));
  }
  for (double b : da.encoder_bias()) put_le(out, b);
  for (double b : da.decoder_bias()) put_le(out, b);
  return out;
}

DenoisingAutoencoder model_from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kModelMagic) || std::memcmp(bytes.data(), kModelMagic, sizeof(kModelMagic)) != 0) {
    throw FormatError("not an autoencoder model file");
  }
  std::size_t offset = sizeof(kModelMagic);
  const auto version = get_le<std::uint32_t>(bytes, offset);
  if (version != kModelVersion) throw FormatError(fmt::format("unsupported model version {}", version));
  const auto n = get_le<std::uint32_t>(bytes, offset);
  const auto d = get_le<std::uint32_t>(bytes, offset);
  if (n == 0 || d == 0) throw FormatError("model has zero dimension");
  const std::size_t expected = offset + 8 * (static_cast<std::size_t>(n) * d + n + d);
  if (bytes.size() != expected) throw FormatError("model file size does not match its header");

  Matrix w(n, d);
  Vector b(n), b_prime(d);
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = get_le<double>(bytes, offset);
  }
  for (auto& v : b) v = get_le<double>(bytes, offset);
  for (auto& v : b_prime) v = get_le<double>(bytes, offset);
  return DenoisingAutoencoder(std::move(w), std::move(b), std::move(b_prime));
}

void save_model(const DenoisingAutoencoder& da, const std::filesystem::path& path) {
  const auto bytes = model_bytes(da);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing " + path.string());
}

DenoisingAutoencoder load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return model_from_bytes(bytes);
}

}  // namespace delenox
