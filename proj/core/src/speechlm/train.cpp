#include "sublm/speechlm/train.hpp"

#include <algorithm>
#include <sstream>
#include <thread>

#include "sublm/ndl/adam.hpp"
#include "sublm/ndl/serialize.hpp"
#include "sublm/util/io.hpp"
#include "sublm/util/rng.hpp"

namespace sublm::speechlm {

LossBreakdown evaluate_speechlm(const SpeechLmModel<float>& model,
                                const std::vector<WindowSample<float>>& windows) {
  if (windows.empty()) throw ValidationError("evaluate_speechlm: no windows");
  LossBreakdown acc;
  ForwardCache<float> cache;
  for (const auto& w : windows) {
    const auto losses = forward(model, w, cache);
    acc.total += losses.total;
    acc.mse += losses.mse;
    acc.bce += losses.bce;
    acc.len_term += losses.len_term;
  }
  const double inv = 1.0 / static_cast<double>(windows.size());
  acc.total *= inv;
  acc.mse *= inv;
  acc.bce *= inv;
  acc.len_term *= inv;
  return acc;
}

SpeechTrainResult train_speechlm(const std::vector<WindowSample<float>>& windows,
                                 const SpeechLmConfig& cfg, const SpeechTrainOptions& opts) {
  if (windows.empty()) throw ValidationError("train_speechlm: empty window set");

  SpeechTrainResult result;
  result.model = SpeechLmModel<float>(cfg);
  result.model.init(opts.seed);

  // deterministic train/val split
  util::Rng rng(opts.seed ^ 0x737065656368ull);
  std::vector<size_t> order(windows.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  size_t n_val = static_cast<size_t>(std::llround(opts.val_fraction * windows.size()));
  if (windows.size() >= 2 && opts.val_fraction > 0.0) n_val = std::max<size_t>(n_val, 1);
  n_val = std::min(n_val, windows.size() - 1);
  std::vector<size_t> val_idx(order.begin(), order.begin() + static_cast<ptrdiff_t>(n_val));
  std::vector<size_t> train_idx(order.begin() + static_cast<ptrdiff_t>(n_val), order.end());

  std::vector<WindowSample<float>> val_set;
  for (size_t i : val_idx) val_set.push_back(windows[i]);
  // without a held-out split, validation columns report the training set
  if (val_set.empty())
    for (size_t i : train_idx) val_set.push_back(windows[i]);

  {
    std::vector<WindowSample<float>> train_set;
    for (size_t i : train_idx) train_set.push_back(windows[i]);
    result.initial_train_mse = evaluate_speechlm(result.model, train_set).mse;
  }

  SpeechLmGrads<float> grads(result.model);
  auto params = result.model.named_params(&grads);
  ndl::Adam<float> adam(opts.lr);

  const size_t batches_per_epoch = (train_idx.size() + opts.batch - 1) / opts.batch;
  size_t epochs = opts.epochs;
  if (opts.max_steps > 0)
    epochs = (opts.max_steps + batches_per_epoch - 1) / batches_per_epoch;

  // snapshot of the last completed epoch, for divergence recovery
  std::vector<ndl::Tensor<float>> last_good;
  auto snapshot = [&]() {
    last_good.clear();
    for (auto& p : params) last_good.push_back(*p.value);
  };
  auto restore = [&]() {
    for (size_t k = 0; k < params.size(); ++k) *params[k].value = last_good[k];
  };
  snapshot();

  const size_t workers = std::max<size_t>(1, opts.jobs);
  std::vector<SpeechLmGrads<float>> worker_grads(workers, SpeechLmGrads<float>(result.model));
  std::vector<double> worker_loss(workers, 0.0);

  // fixed contiguous slices + in-order reduction keep multi-worker runs
  // deterministic for a given worker count
  auto accumulate_batch = [&](size_t lo, size_t hi) {
    const double scale = 1.0 / static_cast<double>(hi - lo);
    const size_t n = hi - lo;
    const size_t active = std::min(workers, n);
    std::vector<std::exception_ptr> errors(active, nullptr);
    auto work = [&](size_t w) {
      try {
        const size_t w_lo = lo + w * n / active;
        const size_t w_hi = lo + (w + 1) * n / active;
        worker_grads[w].zero();
        worker_loss[w] = 0.0;
        ForwardCache<float> cache;
        for (size_t k = w_lo; k < w_hi; ++k) {
          const auto losses = forward(result.model, windows[train_idx[k]], cache);
          worker_loss[w] += losses.total;
          backward(result.model, windows[train_idx[k]], cache, worker_grads[w], scale);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    };
    if (active == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (size_t w = 0; w < active; ++w) pool.emplace_back(work, w);
      for (auto& t : pool) t.join();
    }
    for (const auto& err : errors)
      if (err) std::rethrow_exception(err);
    grads.zero();
    double batch_loss = 0.0;
    for (size_t w = 0; w < active; ++w) {
      grads.add(worker_grads[w]);
      batch_loss += worker_loss[w];
    }
    return batch_loss;
  };

  for (size_t epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(train_idx);
    double epoch_loss = 0.0;
    size_t epoch_windows = 0;
    try {
      for (size_t b = 0; b < batches_per_epoch; ++b) {
        const size_t lo = b * opts.batch;
        const size_t hi = std::min(train_idx.size(), lo + opts.batch);
        if (lo >= hi) break;
        epoch_loss += accumulate_batch(lo, hi);
        epoch_windows += hi - lo;
        ndl::clip_grad_norm(params, opts.clip_norm);
        adam.step(params);
        ++result.steps_taken;
        if (opts.max_steps > 0 && result.steps_taken >= opts.max_steps) break;
      }
    } catch (const NumericError& e) {
      restore();
      result.diverged = true;
      result.divergence_message = e.what();
      return result;
    }

    EpochRow row;
    row.epoch = epoch;
    row.train_loss = epoch_windows ? epoch_loss / static_cast<double>(epoch_windows) : 0.0;
    const auto val = evaluate_speechlm(result.model, val_set);
    row.val_loss = val.total;
    row.val_mse = val.mse;
    row.val_bce = val.bce;
    result.curve.push_back(row);
    snapshot();

    if (opts.max_steps > 0 && result.steps_taken >= opts.max_steps) break;
  }
  return result;
}

void write_loss_curve(const std::filesystem::path& path, const std::vector<EpochRow>& curve) {
  std::ostringstream os;
  os << "epoch,train_loss,val_loss,val_mse,val_bce\n";
  for (const auto& row : curve)
    os << row.epoch << ',' << row.train_loss << ',' << row.val_loss << ',' << row.val_mse << ','
       << row.val_bce << '\n';
  util::write_text_file(path, os.str());
}

void save_speechlm(const std::filesystem::path& path, SpeechLmModel<float>& model, uint64_t seed) {
  const auto& cfg = model.cfg;
  std::ostringstream floor_str;
  floor_str.precision(17);
  floor_str << cfg.first_frame_value;
  auto params = model.named_params();
  ndl::save_checkpoint(path,
                       {{"component", "speechlm"},
                        {"variant", variant_name(cfg.variant)},
                        {"mel_bins", std::to_string(cfg.mel_bins)},
                        {"hidden", std::to_string(cfg.hidden)},
                        {"n_ctx", std::to_string(cfg.n_ctx)},
                        {"artic_dim", std::to_string(cfg.artic_dim)},
                        {"text_dim", std::to_string(cfg.text_dim)},
                        {"lambda_mtl", std::to_string(cfg.lambda_mtl)},
                        {"lambda_len", std::to_string(cfg.lambda_len)},
                        {"max_len_frames", std::to_string(cfg.max_len_frames)},
                        {"first_frame_value", floor_str.str()},
                        {"seed", std::to_string(seed)}},
                       params);
}

SpeechLmModel<float> load_speechlm(const std::filesystem::path& path) {
  const auto header = ndl::peek_checkpoint(path);
  if (header.field("component") != "speechlm")
    throw IoError("checkpoint is not a speechlm component: " + path.string());
  SpeechLmConfig cfg;
  cfg.variant = parse_variant(header.field("variant"));
  cfg.mel_bins = std::stoul(header.field("mel_bins", "80"));
  cfg.hidden = std::stoul(header.field("hidden", "256"));
  cfg.n_ctx = std::stoul(header.field("n_ctx", "4"));
  cfg.artic_dim = std::stoul(header.field("artic_dim", "66"));
  cfg.text_dim = std::stoul(header.field("text_dim", "768"));
  cfg.lambda_mtl = std::stod(header.field("lambda_mtl", "1"));
  cfg.lambda_len = std::stod(header.field("lambda_len", "0.1"));
  cfg.max_len_frames = std::stoul(header.field("max_len_frames", "43"));
  cfg.first_frame_value = std::stod(header.field("first_frame_value", "-11.512925464970229"));
  SpeechLmModel<float> model(cfg);
  auto params = model.named_params();
  ndl::load_checkpoint(path, params);
  return model;
}

} // namespace sublm::speechlm
