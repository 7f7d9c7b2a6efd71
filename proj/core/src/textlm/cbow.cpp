#include "sublm/textlm/cbow.hpp"

#include <cmath>

#include "sublm/error.hpp"
#include "sublm/util/rng.hpp"

namespace sublm::textlm {

namespace {

// cumulative unigram^0.75 distribution for negative sampling
std::vector<double> noise_cdf(const std::vector<std::vector<size_t>>& corpus, size_t vocab_size) {
  std::vector<double> weight(vocab_size, 0.0);
  for (const auto& utt : corpus)
    for (size_t id : utt) weight[id] += 1.0;
  double total = 0.0;
  for (double& w : weight) {
    w = std::pow(w, 0.75);
    total += w;
  }
  if (total <= 0.0) throw ValidationError("cbow: empty corpus");
  std::vector<double> cdf(vocab_size);
  double acc = 0.0;
  for (size_t i = 0; i < vocab_size; ++i) {
    acc += weight[i] / total;
    cdf[i] = acc;
  }
  cdf.back() = 1.0;
  return cdf;
}

size_t sample_cdf(const std::vector<double>& cdf, util::Rng& rng) {
  const double u = rng.next_double();
  return static_cast<size_t>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

} // namespace

CbowResult cbow_pretrain(const std::vector<std::vector<size_t>>& corpus, size_t vocab_size,
                         const CbowOptions& opts) {
  if (vocab_size < 2) throw ValidationError("cbow: vocab size must be >= 2");
  if (opts.negatives == 0) throw ValidationError("cbow: need at least one negative sample");
  if (opts.dim == 0 || opts.window == 0) throw ValidationError("cbow: bad dim/window");

  CbowResult result;
  result.params.vocab_size = vocab_size;
  result.params.dim = opts.dim;
  result.params.input = ndl::Tensor<float>({vocab_size, opts.dim});
  result.params.output = ndl::Tensor<float>({vocab_size, opts.dim});

  util::Rng rng(opts.seed);
  const double init_bound = 0.5 / static_cast<double>(opts.dim);
  result.params.input.fill_uniform(rng, init_bound);
  // output embeddings start at zero, as in the original implementation

  const auto cdf = noise_cdf(corpus, vocab_size);
  const size_t dim = opts.dim;
  auto& input = result.params.input;
  auto& output = result.params.output;

  std::vector<float> ctx_mean(dim), ctx_grad(dim);
  // epoch 0 is an evaluation-only pass recording the starting loss
  for (size_t epoch = 0; epoch <= opts.epochs; ++epoch) {
    const bool update = epoch > 0;
    double loss_sum = 0.0;
    size_t n_samples = 0;
    for (const auto& utt : corpus) {
      for (size_t center = 0; center < utt.size(); ++center) {
        const size_t lo = center >= opts.window ? center - opts.window : 0;
        const size_t hi = std::min(utt.size(), center + opts.window + 1);
        std::vector<size_t> context;
        for (size_t j = lo; j < hi; ++j)
          if (j != center) context.push_back(utt[j]);
        if (context.empty()) continue;

        std::fill(ctx_mean.begin(), ctx_mean.end(), 0.0f);
        for (size_t c : context) {
          const float* row = input.row(c);
          for (size_t d = 0; d < dim; ++d) ctx_mean[d] += row[d];
        }
        const float inv = 1.0f / static_cast<float>(context.size());
        for (size_t d = 0; d < dim; ++d) ctx_mean[d] *= inv;

        std::fill(ctx_grad.begin(), ctx_grad.end(), 0.0f);
        double sample_loss = 0.0;
        for (size_t k = 0; k <= opts.negatives; ++k) {
          size_t target;
          float sign;
          if (k == 0) {
            target = utt[center];
            sign = 1.0f;
          } else {
            do {
              target = sample_cdf(cdf, rng);
            } while (target == utt[center]);
            sign = 0.0f;
          }
          float* out_row = output.row(target);
          double score = 0.0;
          for (size_t d = 0; d < dim; ++d) score += ctx_mean[d] * out_row[d];
          const double p = 1.0 / (1.0 + std::exp(-score));
          sample_loss += sign > 0.5f ? -std::log(std::max(p, 1e-12))
                                     : -std::log(std::max(1.0 - p, 1e-12));
          if (update) {
            const float g = static_cast<float>(opts.lr * (static_cast<double>(sign) - p));
            for (size_t d = 0; d < dim; ++d) {
              ctx_grad[d] += g * out_row[d];
              out_row[d] += g * ctx_mean[d];
            }
          }
        }
        if (update) {
          for (size_t c : context) {
            float* row = input.row(c);
            for (size_t d = 0; d < dim; ++d) row[d] += ctx_grad[d];
          }
        }
        loss_sum += sample_loss;
        ++n_samples;
      }
    }
    if (n_samples == 0) throw ValidationError("cbow: corpus has no trainable positions");
    const double mean_loss = loss_sum / static_cast<double>(n_samples);
    if (update)
      result.epoch_loss.push_back(mean_loss);
    else
      result.initial_loss = mean_loss;
  }
  ndl::check_finite(input, "cbow input embeddings");
  ndl::check_finite(output, "cbow output embeddings");
  return result;
}

} // namespace sublm::textlm
