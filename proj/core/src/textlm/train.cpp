#include "sublm/textlm/train.hpp"

#include <cmath>

#include "sublm/ndl/adam.hpp"
#include "sublm/ndl/serialize.hpp"

namespace sublm::textlm {

namespace {

// One long stream with a BOS before every utterance.
std::vector<size_t> flatten_with_bos(const std::vector<std::vector<size_t>>& utts) {
  std::vector<size_t> stream;
  for (const auto& utt : utts) {
    stream.push_back(SubwordVocab::kBos);
    stream.insert(stream.end(), utt.begin(), utt.end());
  }
  return stream;
}

} // namespace

TextLmTrainResult lm_train(const std::vector<std::vector<size_t>>& train_utts, size_t vocab_size,
                           const TextLmConfig& cfg, const CbowParams* init,
                           const TextLmTrainOptions& opts,
                           const std::vector<std::vector<size_t>>* val_utts) {
  if (vocab_size < 2) throw ValidationError("lm_train: vocab size must be >= 2");
  const std::vector<size_t> stream = flatten_with_bos(train_utts);
  if (stream.size() < 2) throw ValidationError("lm_train: corpus too small");

  TextLmTrainResult result;
  result.model = TextLm<float>(cfg, vocab_size);
  util::Rng rng(opts.seed);
  result.model.init(rng);
  if (init) {
    result.model.init_embedding_from_cbow(*init);
    result.init_kind = "cbow";
  } else {
    result.init_kind = "random";
  }

  // contiguous lanes; at least 2 tokens per lane so every lane has a target
  const size_t batch = std::max<size_t>(1, std::min(opts.batch, stream.size() / 2));
  const size_t lane_len = stream.size() / batch;

  TextLmGrads<float> grads(result.model);
  auto params = result.model.named_params(&grads);
  ndl::Adam<float> adam(opts.lr);

  for (size_t epoch = 0; epoch < opts.epochs; ++epoch) {
    double ce_sum = 0.0;
    size_t token_count = 0;
    for (size_t pos = 0; pos + 1 < lane_len; pos += opts.bptt) {
      const size_t n = std::min(opts.bptt, lane_len - 1 - pos);
      size_t chunk_tokens = 0;
      for (size_t b = 0; b < batch; ++b) chunk_tokens += n;
      grads.zero();
      const double scale = 1.0 / static_cast<double>(chunk_tokens);
      for (size_t b = 0; b < batch; ++b) {
        const size_t* lane = stream.data() + b * lane_len;
        ce_sum += textlm_chunk<float>(result.model, {lane + pos, n}, {lane + pos + 1, n}, &grads,
                                      scale);
      }
      token_count += chunk_tokens;
      ndl::clip_grad_norm(params, opts.clip_norm);
      adam.step(params);
    }

    TextLmEpoch row;
    row.epoch = epoch;
    row.train_ce = token_count ? ce_sum / static_cast<double>(token_count) : 0.0;
    if (val_utts && !val_utts->empty()) {
      const auto eval = evaluate_lm(result.model, *val_utts);
      row.val_ppl = eval.perplexity;
      row.val_acc = eval.accuracy;
    }
    result.epochs.push_back(row);
  }
  return result;
}

LmEvaluation evaluate_lm(const TextLm<float>& model,
                         const std::vector<std::vector<size_t>>& utts) {
  LmEvaluation out;
  double nll = 0.0;
  size_t correct = 0;
  for (const auto& utt : utts) {
    if (utt.empty()) continue;
    std::vector<size_t> inputs;
    inputs.push_back(SubwordVocab::kBos);
    inputs.insert(inputs.end(), utt.begin(), utt.end() - 1);
    nll += textlm_chunk<float>(model, inputs, utt, nullptr, 1.0, &correct);
    out.n_tokens += utt.size();
  }
  if (out.n_tokens == 0) throw ValidationError("evaluate_lm: empty evaluation stream");
  out.perplexity = std::exp(nll / static_cast<double>(out.n_tokens));
  out.accuracy = static_cast<double>(correct) / static_cast<double>(out.n_tokens);
  return out;
}

double unigram_perplexity(const std::vector<std::vector<size_t>>& train_utts,
                          const std::vector<std::vector<size_t>>& eval_utts, size_t vocab_size) {
  std::vector<double> counts(vocab_size, 1.0); // add-one smoothing
  double total = static_cast<double>(vocab_size);
  for (const auto& utt : train_utts)
    for (size_t id : utt) {
      counts[id] += 1.0;
      total += 1.0;
    }
  double nll = 0.0;
  size_t n = 0;
  for (const auto& utt : eval_utts)
    for (size_t id : utt) {
      nll += -std::log(counts[id] / total);
      ++n;
    }
  if (n == 0) throw ValidationError("unigram_perplexity: empty evaluation stream");
  return std::exp(nll / static_cast<double>(n));
}

void save_textlm(const std::filesystem::path& path, TextLm<float>& model,
                 const std::string& init_kind, uint64_t seed) {
  auto params = model.named_params();
  ndl::save_checkpoint(path,
                       {{"component", "textlm"},
                        {"embed_dim", std::to_string(model.cfg.embed_dim)},
                        {"vocab_size", std::to_string(model.vocab_size)},
                        {"init", init_kind},
                        {"seed", std::to_string(seed)}},
                       params);
}

TextLm<float> load_textlm(const std::filesystem::path& path) {
  const auto header = ndl::peek_checkpoint(path);
  if (header.field("component") != "textlm")
    throw IoError("checkpoint is not a textlm component: " + path.string());
  TextLmConfig cfg;
  cfg.embed_dim = std::stoul(header.field("embed_dim", "768"));
  const size_t vocab = std::stoul(header.field("vocab_size", "0"));
  TextLm<float> model(cfg, vocab);
  auto params = model.named_params();
  ndl::load_checkpoint(path, params);
  return model;
}

} // namespace sublm::textlm
