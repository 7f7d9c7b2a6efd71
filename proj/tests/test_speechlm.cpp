#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "sublm/ndl/serialize.hpp"
#include "sublm/speechlm/babble.hpp"
#include "sublm/speechlm/data.hpp"
#include "sublm/speechlm/gradcheck.hpp"
#include "sublm/speechlm/model.hpp"
#include "sublm/speechlm/train.hpp"
#include "sublm/util/io.hpp"
#include "sublm/util/rng.hpp"

using namespace sublm;
using namespace sublm::speechlm;

namespace {

SpeechLmConfig tiny_config(Variant v) {
  SpeechLmConfig cfg;
  cfg.mel_bins = 6;
  cfg.hidden = 5;
  cfg.n_ctx = 4;
  cfg.artic_dim = 8;
  cfg.text_dim = 7;
  cfg.variant = v;
  return cfg;
}

std::vector<ndl::Vec<float>> random_unit(util::Rng& rng, size_t frames, size_t mel) {
  std::vector<ndl::Vec<float>> unit(frames, ndl::Vec<float>(mel));
  for (auto& f : unit)
    for (auto& v : f) v = static_cast<float>(rng.uniform(-2.0, 1.0));
  return unit;
}

WindowSample<float> random_sample(util::Rng& rng, const SpeechLmConfig& cfg, size_t t_frames) {
  WindowSample<float> s;
  s.context.resize(cfg.n_ctx);
  for (auto& u : s.context) u = random_unit(rng, 2 + rng.uniform_int(3), cfg.mel_bins);
  s.target = random_unit(rng, t_frames, cfg.mel_bins);
  if (cfg.aux_dim() > 0) {
    s.aux.resize(cfg.aux_dim());
    for (auto& v : s.aux) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  }
  if (cfg.variant == Variant::mtl_panphon) {
    s.artic_target.resize(cfg.artic_dim);
    for (auto& v : s.artic_target) v = rng.next_double() < 0.5 ? 0.0f : 1.0f;
  }
  return s;
}

} // namespace

TEST_CASE("dimension ledger at paper-scale configuration") {
  SpeechLmConfig cfg; // defaults: mel 80, hidden 256, 4 units, artic 66, text 768
  cfg.variant = Variant::synthesis_only;
  CHECK(SpeechLmModel<float>(cfg).dims().v == 256);
  CHECK(SpeechLmModel<float>(cfg).dims().z == 1024);
  CHECK(SpeechLmModel<float>(cfg).dims().z_aug == 1024);

  cfg.variant = Variant::mtl_panphon;
  auto mtl = SpeechLmModel<float>(cfg);
  CHECK(mtl.dims().z_aug == 1024);
  CHECK(mtl.mtl_head.output_dim == 66);
  CHECK(mtl.mtl_head.input_dim == 1024);

  cfg.variant = Variant::aux_textlm;
  CHECK(SpeechLmModel<float>(cfg).dims().z_aug == 1792);

  cfg.variant = Variant::top_line;
  CHECK(SpeechLmModel<float>(cfg).dims().z_aug == 1090);
}

TEST_CASE("encode_unit base cases") {
  auto cfg = tiny_config(Variant::synthesis_only);
  SpeechLmModel<float> model(cfg); // zero params

  util::Rng rng(4);
  auto unit = random_unit(rng, 3, cfg.mel_bins);
  auto v = encode_unit(model, unit);
  REQUIRE(v.size() == cfg.hidden);
  for (float x : v) CHECK(x == 0.0f);

  // single frame equals one lstm_step
  model.init(11);
  ndl::Vec<float> h(cfg.hidden, 0.0f), c(cfg.hidden, 0.0f), h1, c1;
  ndl::lstm_step(model.encoder, unit[0], h, c, h1, c1);
  auto v1 = encode_unit(model, {unit[0]});
  for (size_t i = 0; i < cfg.hidden; ++i) CHECK(v1[i] == h1[i]);

  CHECK_THROWS_AS(encode_unit(model, {}), ValidationError);
}

TEST_CASE("encoder is order-sensitive") {
  auto cfg = tiny_config(Variant::synthesis_only);
  SpeechLmModel<float> model(cfg);
  model.init(21);
  util::Rng rng(9);
  auto unit = random_unit(rng, 3, cfg.mel_bins);
  auto v = encode_unit(model, unit);
  std::swap(unit[0], unit[2]);
  auto v_swapped = encode_unit(model, unit);
  double diff = 0.0;
  for (size_t i = 0; i < v.size(); ++i) diff += std::abs(v[i] - v_swapped[i]);
  CHECK(diff > 1e-6);
}

TEST_CASE("build_context: aux wiring per variant") {
  util::Rng rng(5);

  auto check_dim = [&](Variant v, size_t expected_aux) {
    auto cfg = tiny_config(v);
    SpeechLmModel<float> model(cfg);
    model.init(1);
    auto s = random_sample(rng, cfg, 3);
    ndl::Vec<float> z, z_aug;
    build_context(model, s.context, s.aux, z, z_aug);
    CHECK(z.size() == cfg.z_dim());
    CHECK(z_aug.size() == cfg.z_dim() + expected_aux);
  };
  check_dim(Variant::synthesis_only, 0);
  check_dim(Variant::aux_textlm, 7);
  check_dim(Variant::top_line, 8);

  // missing / wrong-size aux is rejected
  auto cfg = tiny_config(Variant::aux_textlm);
  SpeechLmModel<float> model(cfg);
  model.init(1);
  auto s = random_sample(rng, cfg, 3);
  ndl::Vec<float> z, z_aug;
  ndl::Vec<float> empty_aux;
  CHECK_THROWS_AS(build_context(model, s.context, empty_aux, z, z_aug), ValidationError);
  ndl::Vec<float> wrong(cfg.text_dim + 1, 0.0f);
  CHECK_THROWS_AS(build_context(model, s.context, wrong, z, z_aug), ValidationError);
}

TEST_CASE("teacher-forced output shape equals target shape") {
  auto cfg = tiny_config(Variant::synthesis_only);
  SpeechLmModel<float> model(cfg);
  model.init(3);
  util::Rng rng(6);
  for (size_t t_frames : {1, 3, 7}) {
    auto s = random_sample(rng, cfg, t_frames);
    ForwardCache<float> cache;
    forward(model, s, cache);
    REQUIRE(cache.pred.size() == t_frames);
    for (const auto& f : cache.pred) CHECK(f.size() == cfg.mel_bins);
  }
}

TEST_CASE("generate_unit obeys the length head and the clamp") {
  auto cfg = tiny_config(Variant::synthesis_only);
  SpeechLmModel<float> model(cfg); // zero params: length head output 0 -> exp(0)=1 frame
  auto z_aug = ndl::Vec<float>(cfg.z_aug_dim(), 0.0f);
  size_t predicted = 0;
  auto frames = generate_unit(model, z_aug, 0, &predicted);
  CHECK(predicted == 1);
  CHECK(frames.size() == 1);

  // length head bias ln 5 -> 5 frames
  model.length_head.b[0] = static_cast<float>(std::log(5.0));
  frames = generate_unit(model, z_aug, 0, &predicted);
  CHECK(frames.size() == 5);

  // huge bias clamps at max_len_frames
  model.length_head.b[0] = 20.0f;
  frames = generate_unit(model, z_aug, 0, &predicted);
  CHECK(frames.size() == cfg.max_len_frames);

  // zero-parameter model emits the frame-head bias every step
  model.frame_head.b[2] = 1.5f;
  frames = generate_unit(model, z_aug, 3);
  for (const auto& f : frames) {
    CHECK(f[2] == 1.5f);
    CHECK(f[0] == 0.0f);
  }
}

TEST_CASE("loss: perfect prediction leaves only the length term") {
  auto cfg = tiny_config(Variant::mtl_panphon);
  SpeechLmModel<float> model(cfg); // zero params

  // with zero params every pred frame is 0; make targets 0 so MSE vanishes
  WindowSample<float> s;
  s.context.assign(cfg.n_ctx, {ndl::Vec<float>(cfg.mel_bins, 0.0f)});
  s.target.assign(3, ndl::Vec<float>(cfg.mel_bins, 0.0f));
  s.artic_target.assign(cfg.artic_dim, 0.0f);
  // saturate the MTL logits toward the targets via the bias
  for (size_t i = 0; i < cfg.artic_dim; ++i) model.mtl_head.b[i] = -50.0f;

  ForwardCache<float> cache;
  auto losses = forward(model, s, cache);
  CHECK(losses.mse == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(losses.bce == doctest::Approx(0.0).epsilon(1e-9));
  const double len_expect = std::pow(std::log(3.0), 2.0);
  CHECK(losses.len_term == doctest::Approx(len_expect).epsilon(1e-6));
  CHECK(losses.total == doctest::Approx(cfg.lambda_len * len_expect).epsilon(1e-6));
}

TEST_CASE("synthesis_only has no BCE term or MTL parameters") {
  auto cfg = tiny_config(Variant::synthesis_only);
  SpeechLmModel<float> model(cfg);
  model.init(2);
  CHECK(model.mtl_head.empty());
  CHECK(model.named_params().size() == 12);

  util::Rng rng(8);
  auto s = random_sample(rng, cfg, 3);
  ForwardCache<float> cache;
  auto losses = forward(model, s, cache);
  CHECK(losses.bce == 0.0);

  auto mtl_cfg = tiny_config(Variant::mtl_panphon);
  SpeechLmModel<float> mtl(mtl_cfg);
  CHECK(mtl.named_params().size() == 14);
}

TEST_CASE("full-model gradients pass finite differences for all variants") {
  for (Variant v : {Variant::synthesis_only, Variant::mtl_panphon, Variant::aux_textlm,
                    Variant::top_line}) {
    auto res = gradcheck_variant(v, 99);
    INFO("variant ", variant_name(v), " worst ", res.worst_tensor, " err ", res.max_rel_err);
    CHECK(res.max_rel_err < 1e-4);
  }
}

TEST_CASE("encoder sharing: gradient flows into one tensor from every position") {
  auto cfg = tiny_config(Variant::synthesis_only);
  SpeechLmModel<double> model(cfg);
  model.init(5);

  util::Rng rng(10);
  WindowSample<double> s;
  s.context.assign(cfg.n_ctx, {});
  // only position 3 carries signal; others are single zero frames
  for (size_t i = 0; i < cfg.n_ctx; ++i)
    s.context[i].assign(1, ndl::Vec<double>(cfg.mel_bins, 0.0));
  for (auto& v : s.context[3][0]) v = rng.uniform(-1.0, 1.0);
  s.target.assign(2, ndl::Vec<double>(cfg.mel_bins, 0.5));

  SpeechLmGrads<double> grads(model);
  grads.zero();
  ForwardCache<double> cache;
  forward(model, s, cache);
  backward(model, s, cache, grads);

  double wih_grad = 0.0;
  for (double g : grads.encoder.w_ih.data) wih_grad += std::abs(g);
  CHECK(wih_grad > 0.0); // position 3 updates the single shared encoder

  // and the update changes the encoding at *every* position
  // (bias perturbation: position 0's frames are all-zero)
  auto before = encode_unit(model, s.context[0]);
  for (auto& b : model.encoder.bias.data) b += 0.05;
  auto after = encode_unit(model, s.context[0]);
  double diff = 0.0;
  for (size_t i = 0; i < before.size(); ++i) diff += std::abs(before[i] - after[i]);
  CHECK(diff > 0.0);
}

TEST_CASE("training overfits a tiny corpus and is seed-deterministic") {
  auto cfg = tiny_config(Variant::synthesis_only);
  cfg.hidden = 12;
  util::Rng rng(14);
  std::vector<WindowSample<float>> windows;
  for (int i = 0; i < 10; ++i) windows.push_back(random_sample(rng, cfg, 3));

  SpeechTrainOptions opts;
  opts.batch = 10;
  opts.max_steps = 1500;
  opts.val_fraction = 0.0;
  opts.seed = 3;
  auto r1 = train_speechlm(windows, cfg, opts);
  CHECK_FALSE(r1.diverged);
  CHECK(r1.steps_taken == 1500);
  const double final_mse = evaluate_speechlm(r1.model, windows).mse;
  CHECK(final_mse < 0.1 * r1.initial_train_mse);

  auto r2 = train_speechlm(windows, cfg, opts);
  REQUIRE(r1.curve.size() == r2.curve.size());
  for (size_t i = 0; i < r1.curve.size(); ++i)
    CHECK(r1.curve[i].train_loss == r2.curve[i].train_loss);
}

TEST_CASE("checkpoint round trip preserves config and parameters") {
  auto cfg = tiny_config(Variant::mtl_panphon);
  SpeechLmModel<float> model(cfg);
  model.init(7);
  const auto path = std::filesystem::temp_directory_path() / "sublm_speech_test.sblm";
  save_speechlm(path, model, 7);

  auto back = load_speechlm(path);
  CHECK(back.cfg.variant == Variant::mtl_panphon);
  CHECK(back.cfg.mel_bins == cfg.mel_bins);
  CHECK(back.cfg.hidden == cfg.hidden);
  CHECK(back.cfg.artic_dim == cfg.artic_dim);
  CHECK(back.encoder.w_ih.data == model.encoder.w_ih.data);
  CHECK(back.mtl_head.w.data == model.mtl_head.w.data);

  // loading into a different variant fails on the manifest
  auto other_cfg = tiny_config(Variant::synthesis_only);
  SpeechLmModel<float> other(other_cfg);
  auto params = other.named_params();
  CHECK_THROWS_AS(ndl::load_checkpoint(path, params), IoError);
  std::filesystem::remove(path);
}

TEST_CASE("babble: n_units 0 and 1, with a deterministic corpus") {
  auto cfg = tiny_config(Variant::synthesis_only);
  SpeechLmModel<float> model(cfg);
  model.init(13);

  // build a small fake unit corpus
  corpus::UnitSequence seq;
  seq.utt_id = "u0";
  util::Rng rng(15);
  for (int i = 0; i < 6; ++i) {
    corpus::Unit u;
    u.kind = corpus::UnitKind::syllable;
    u.label = "l" + std::to_string(i);
    u.frames.n_frames = 3;
    u.frames.n_mels = cfg.mel_bins;
    u.frames.hop_seconds = 128.0 / 22050.0;
    u.frames.values.resize(3 * cfg.mel_bins);
    for (auto& v : u.frames.values) v = rng.uniform(-3.0, 0.0);
    u.frame_begin = static_cast<size_t>(i) * 3;
    u.frame_end = u.frame_begin + 3;
    seq.units.push_back(std::move(u));
  }
  std::vector<corpus::UnitSequence> seqs = {seq};

  dsp::DspConfig dsp_cfg;
  dsp_cfg.mel_bins = cfg.mel_bins;
  dsp_cfg.fft_size = 64;
  dsp_cfg.hop = 16;
  dsp_cfg.fmax = 8000;

  BabbleOptions opts;
  opts.n_units = 0;
  auto empty = babble(model, seqs, dsp_cfg, opts);
  CHECK(empty.mel.n_frames == 0);
  CHECK(empty.audio.samples.empty());

  opts.n_units = 1;
  auto one = babble(model, seqs, dsp_cfg, opts);
  CHECK(one.unit_frame_counts.size() == 1);
  CHECK(one.mel.n_frames == one.unit_frame_counts[0]);
  CHECK(one.seed_labels.size() == cfg.n_ctx);

  opts.n_units = 5;
  auto a = babble(model, seqs, dsp_cfg, opts);
  auto b = babble(model, seqs, dsp_cfg, opts);
  CHECK(a.mel.values == b.mel.values); // deterministic per seed
  CHECK(a.audio.samples == b.audio.samples);

  // total length bounded by the clamp
  CHECK(a.mel.n_frames <= 5 * cfg.max_len_frames);
  CHECK(a.mel.n_frames >= 5);
}
