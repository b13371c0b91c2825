#pragma once

#include <cstdint>

#include "delenox/autoencoder.hpp"
#include "delenox/cppn.hpp"
#include "delenox/random.hpp"

namespace delenox::testing {

/// Structurally richer genome: a minimal one pushed through `depth` mutations
/// with boosted structural rates.
inline CppnGenome grown_genome(std::uint64_t seed, int depth) {
  Rng rng(seed);
  CppnGenome g = random_minimal(rng);
  MutationParams params{0.3, 0.4, 0.3, 0.5};
  for (int i = 0; i < depth; ++i) g = mutate(g, params, rng);
  return g;
}

/// Untrained encoder with weights drawn from U[-scale, scale].
inline DenoisingAutoencoder random_encoder(int features, int inputs, std::uint64_t seed, double scale = 0.1) {
  Rng rng(seed);
  DenoisingAutoencoder da(features, inputs);
  for (int i = 0; i < features; ++i) {
    for (int j = 0; j < inputs; ++j) da.weights()(i, j) = uniform(rng, -scale, scale);
  }
  return da;
}

}  // namespace delenox::testing
