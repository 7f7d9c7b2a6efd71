#include <benchmark/benchmark.h>

#include <cmath>

#include "sublm/dsp/cepstrum.hpp"
#include "sublm/dsp/fft.hpp"
#include "sublm/dsp/griffin_lim.hpp"
#include "sublm/dsp/mel.hpp"

using namespace sublm;

namespace {

dsp::AudioBuffer test_tone(double seconds) {
  dsp::AudioBuffer a;
  a.sample_rate = 22050;
  const size_t n = static_cast<size_t>(seconds * a.sample_rate);
  a.samples.resize(n);
  for (size_t i = 0; i < n; ++i)
    a.samples[i] = 0.6 * std::sin(2.0 * M_PI * 440.0 * static_cast<double>(i) / a.sample_rate) +
                   0.3 * std::sin(2.0 * M_PI * 1320.0 * static_cast<double>(i) / a.sample_rate);
  return a;
}

} // namespace

static void BM_Fft1024(benchmark::State& state) {
  std::vector<std::complex<double>> buf(1024);
  for (size_t i = 0; i < buf.size(); ++i) buf[i] = {std::sin(0.01 * static_cast<double>(i)), 0.0};
  for (auto _ : state) {
    auto copy = buf;
    dsp::fft_inplace(copy);
    benchmark::DoNotOptimize(copy);
  }
}
BENCHMARK(BM_Fft1024);

static void BM_Melspectrogram(benchmark::State& state) {
  const auto audio = test_tone(static_cast<double>(state.range(0)) / 10.0);
  dsp::DspConfig cfg;
  for (auto _ : state) {
    auto mel = dsp::melspectrogram(audio, cfg);
    benchmark::DoNotOptimize(mel);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(dsp::frame_count(audio.samples.size(), cfg)));
}
BENCHMARK(BM_Melspectrogram)->Arg(5)->Arg(10)->Arg(30);

static void BM_GriffinLim(benchmark::State& state) {
  dsp::DspConfig cfg;
  cfg.griffin_lim_iters = static_cast<size_t>(state.range(0));
  const auto mel = dsp::melspectrogram(test_tone(0.5), cfg);
  for (auto _ : state) {
    auto audio = dsp::griffin_lim(mel, cfg);
    benchmark::DoNotOptimize(audio);
  }
}
BENCHMARK(BM_GriffinLim)->Arg(10)->Arg(60)->Unit(benchmark::kMillisecond);

static void BM_MelCepstrum(benchmark::State& state) {
  dsp::DspConfig cfg;
  const auto mel = dsp::melspectrogram(test_tone(1.0), cfg);
  for (auto _ : state) {
    auto ceps = dsp::mel_cepstrum(mel);
    benchmark::DoNotOptimize(ceps);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(mel.n_frames));
}
BENCHMARK(BM_MelCepstrum);

BENCHMARK_MAIN();
