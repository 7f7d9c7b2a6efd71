#include <benchmark/benchmark.h>

#include "sublm/ndl/adam.hpp"
#include "sublm/ndl/lstm.hpp"
#include "sublm/speechlm/model.hpp"
#include "sublm/util/rng.hpp"

using namespace sublm;
using namespace sublm::ndl;

static void BM_LstmStepForward(benchmark::State& state) {
  util::Rng rng(1);
  LstmParams<float> p(80, 256);
  p.init(rng);
  Vec<float> x(80, 0.2f), h(256, 0.1f), c(256, 0.1f), ho, co;
  for (auto _ : state) {
    lstm_step(p, x, h, c, ho, co);
    benchmark::DoNotOptimize(ho);
  }
}
BENCHMARK(BM_LstmStepForward);

static void BM_LstmStepBackward(benchmark::State& state) {
  util::Rng rng(1);
  LstmParams<float> p(80, 256);
  p.init(rng);
  Vec<float> x(80, 0.2f), h(256, 0.1f), c(256, 0.1f), ho, co;
  LstmStepCache<float> cache;
  lstm_step(p, x, h, c, ho, co, &cache);
  LstmGrads<float> grads(p);
  Vec<float> dh(256, 0.01f), dc(256, 0.0f), dx;
  for (auto _ : state) {
    Vec<float> dh2 = dh, dc2 = dc;
    lstm_step_backward(p, cache, dh2, dc2, grads, &dx);
    benchmark::DoNotOptimize(grads.w_hh.data);
  }
}
BENCHMARK(BM_LstmStepBackward);

static void BM_WindowForwardBackward(benchmark::State& state) {
  speechlm::SpeechLmConfig cfg;
  cfg.variant = speechlm::Variant::mtl_panphon;
  speechlm::SpeechLmModel<float> model(cfg);
  model.init(3);

  util::Rng rng(5);
  speechlm::WindowSample<float> sample;
  sample.context.assign(cfg.n_ctx, {});
  for (auto& unit : sample.context) {
    unit.assign(static_cast<size_t>(state.range(0)), Vec<float>(cfg.mel_bins));
    for (auto& f : unit)
      for (auto& v : f) v = static_cast<float>(rng.uniform(-8.0, 0.0));
  }
  sample.target.assign(static_cast<size_t>(state.range(0)), Vec<float>(cfg.mel_bins, -4.0f));
  sample.artic_target.assign(cfg.artic_dim, 0.0f);
  for (size_t i = 0; i < cfg.artic_dim; i += 3) sample.artic_target[i] = 1.0f;

  speechlm::SpeechLmGrads<float> grads(model);
  speechlm::ForwardCache<float> cache;
  for (auto _ : state) {
    grads.zero();
    speechlm::forward(model, sample, cache);
    speechlm::backward(model, sample, cache, grads);
    benchmark::DoNotOptimize(grads.encoder.w_hh.data);
  }
  state.SetLabel(std::to_string(state.range(0)) + " frames/unit");
}
BENCHMARK(BM_WindowForwardBackward)->Arg(8)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_AdamStep(benchmark::State& state) {
  util::Rng rng(2);
  Tensor<float> param({1024, 256}), grad({1024, 256});
  param.fill_uniform(rng, 0.1);
  grad.fill_uniform(rng, 0.01);
  NamedParamList<float> params{{"w", &param, &grad}};
  Adam<float> adam(1e-3);
  for (auto _ : state) {
    adam.step(params);
    benchmark::DoNotOptimize(param.data);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(param.size()));
}
BENCHMARK(BM_AdamStep);

BENCHMARK_MAIN();
