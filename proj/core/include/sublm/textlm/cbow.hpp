#pragma once

#include <vector>

#include "sublm/ndl/tensor.hpp"

namespace sublm::textlm {

// CBOW with negative sampling: the mean of the context embeddings predicts
// the center token against k noise tokens from the unigram^0.75 distribution.
struct CbowOptions {
  size_t dim = 768;
  size_t window = 4;
  size_t negatives = 5;
  size_t epochs = 5;
  double lr = 0.025;
  uint64_t seed = 1;
};

struct CbowParams {
  size_t vocab_size = 0;
  size_t dim = 0;
  ndl::Tensor<float> input;  // V × dim, used to seed the LM embedding
  ndl::Tensor<float> output; // V × dim
};

struct CbowResult {
  CbowParams params;
  double initial_loss = 0.0;      // evaluation pass before any update
  std::vector<double> epoch_loss; // mean negative-sampling loss per epoch
};

CbowResult cbow_pretrain(const std::vector<std::vector<size_t>>& corpus, size_t vocab_size,
                         const CbowOptions& opts);

} // namespace sublm::textlm
