#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "sublm/artic/features.hpp"
#include "sublm/corpus/inventory.hpp"
#include "sublm/dsp/mel.hpp"
#include "sublm/evalprobe/mcd.hpp"
#include "sublm/evalprobe/probe.hpp"
#include "sublm/evalprobe/report.hpp"
#include "sublm/util/io.hpp"
#include "sublm/util/rng.hpp"

using namespace sublm;
using namespace sublm::evalprobe;

namespace {

dsp::MelSpectrogram random_mel(util::Rng& rng, size_t frames, size_t mels = 20) {
  dsp::MelSpectrogram mel;
  mel.n_frames = frames;
  mel.n_mels = mels;
  mel.hop_seconds = 128.0 / 22050.0;
  mel.values.resize(frames * mels);
  for (auto& v : mel.values) v = rng.uniform(-11.5, 2.0);
  return mel;
}

// Exhaustive enumeration of all monotone DTW paths for small matrices:
// minimum total cost, breaking ties by fewest nodes.
struct OraclePath {
  double cost = 0.0;
  size_t nodes = 0;
};

void enumerate(const util::RealMatrix& a, const util::RealMatrix& b, size_t i, size_t j,
               double cost, size_t nodes, OraclePath& best) {
  double local = 0.0;
  for (size_t k = 0; k < a.cols; ++k) {
    const double d = a.at(i, k) - b.at(j, k);
    local += d * d;
  }
  cost += std::sqrt(local);
  ++nodes;
  if (i == a.rows - 1 && j == b.rows - 1) {
    if (cost < best.cost || (cost == best.cost && nodes < best.nodes)) {
      best.cost = cost;
      best.nodes = nodes;
    }
    return;
  }
  if (i + 1 < a.rows && j + 1 < b.rows) enumerate(a, b, i + 1, j + 1, cost, nodes, best);
  if (i + 1 < a.rows) enumerate(a, b, i + 1, j, cost, nodes, best);
  if (j + 1 < b.rows) enumerate(a, b, i, j + 1, cost, nodes, best);
}

} // namespace

TEST_CASE("mcd identity is exactly zero") {
  util::Rng rng(2);
  auto mel = random_mel(rng, 12);
  auto result = mcd(mel, mel);
  CHECK(result.value == 0.0);
  CHECK(result.frames_compared == 12);
}

TEST_CASE("mcd symmetry within 1e-12") {
  util::Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = random_mel(rng, 5 + rng.uniform_int(10));
    auto b = random_mel(rng, 5 + rng.uniform_int(10));
    const double ab = mcd(a, b).value;
    const double ba = mcd(b, a).value;
    CHECK(std::abs(ab - ba) < 1e-12);
    CHECK(ab >= 0.0);
  }
}

TEST_CASE("2x3 DTW equals exhaustive path enumeration exactly") {
  util::Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    util::RealMatrix a(2, 4), b(3, 4);
    for (auto& v : a.v) v = rng.uniform(-2, 2);
    for (auto& v : b.v) v = rng.uniform(-2, 2);

    OraclePath best;
    best.cost = 1e300;
    enumerate(a, b, 0, 0, 0.0, 0, best);

    auto result = mcd_from_cepstra(a, b);
    CHECK(result.value == kMcdConstant * best.cost / static_cast<double>(best.nodes));
    CHECK(result.frames_compared == best.nodes);
  }
}

TEST_CASE("DTW path bounds and plain-diagonal dominance") {
  util::Rng rng(9);
  auto a = random_mel(rng, 10);
  auto b = random_mel(rng, 14);
  auto result = mcd(a, b);
  CHECK(result.frames_compared >= 14);     // at least max(T1, T2)
  CHECK(result.frames_compared <= 10 + 14 - 1);

  // for equal lengths, the DTW cost never exceeds the diagonal cost
  auto c = random_mel(rng, 10);
  const auto ra = dsp::mel_cepstrum(a), rc = dsp::mel_cepstrum(c);
  double diag_cost = 0.0;
  for (size_t t = 0; t < ra.rows; ++t) {
    double acc = 0.0;
    for (size_t k = 0; k < ra.cols; ++k) {
      const double d = ra.at(t, k) - rc.at(t, k);
      acc += d * d;
    }
    diag_cost += std::sqrt(acc);
  }
  auto dtw = mcd_from_cepstra(ra, rc);
  const double dtw_total = dtw.value / kMcdConstant * static_cast<double>(dtw.frames_compared);
  CHECK(dtw_total <= diag_cost + 1e-12);

  CHECK(mcd_plain(a, c).frames_compared == 10);
  CHECK_THROWS_AS(mcd_plain(a, b), ValidationError);
}

TEST_CASE("mcd rejects empty and mismatched inputs") {
  util::Rng rng(3);
  auto a = random_mel(rng, 5);
  dsp::MelSpectrogram empty;
  empty.n_mels = a.n_mels;
  CHECK_THROWS_AS(mcd(a, empty), ValidationError);

  auto other = random_mel(rng, 5, 30);
  CHECK_THROWS_AS(mcd(a, other), ValidationError);
}

TEST_CASE("probe on binarized articulatory nucleus vectors reaches 100%") {
  const auto& table = artic::ArticTable::builtin();
  const auto& order = corpus::PhoneInventory::english().vowel_order();
  std::vector<std::string> consonants(corpus::PhoneInventory::english().consonants().begin(),
                                      corpus::PhoneInventory::english().consonants().end());

  // several samples per vowel with varying onsets/codas
  util::Rng rng(11);
  std::vector<std::vector<float>> rows;
  std::vector<int> labels;
  for (size_t v = 0; v < order.size(); ++v) {
    for (int rep = 0; rep < 6; ++rep) {
      std::vector<std::string> onset, coda;
      if (rng.next_double() < 0.7) onset.push_back(consonants[rng.uniform_int(consonants.size())]);
      if (rng.next_double() < 0.4) coda.push_back(consonants[rng.uniform_int(consonants.size())]);
      rows.push_back(artic::syllable_vector(onset, order[v], coda, table));
      labels.push_back(static_cast<int>(v));
    }
  }
  util::RealMatrix features(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t d = 0; d < rows[i].size(); ++d) features.at(i, d) = rows[i][d];

  auto model = probe_train(features, labels);
  auto cm = probe_eval(model, features, labels);
  CHECK(cm.accuracy == 1.0);
  CHECK_FALSE(cm.majority_flag);
  // diagonal confusion matrix
  for (size_t c = 0; c < 16; ++c)
    for (size_t p = 0; p < 16; ++p)
      if (c != p) CHECK(cm.at(c, p) == 0);
}

TEST_CASE("probe on all-zero features converges to the class prior") {
  util::RealMatrix features(64, 8); // all zeros
  std::vector<int> labels;
  for (int i = 0; i < 64; ++i) labels.push_back(i < 40 ? 3 : (i % 16));
  auto model = probe_train(features, labels);
  auto cm = probe_eval(model, features, labels);
  // majority class is 3 with share 40/64 + the i%16==3 stragglers
  size_t majority = 0;
  std::vector<size_t> counts(16, 0);
  for (int l : labels) ++counts[static_cast<size_t>(l)];
  for (size_t c = 0; c < 16; ++c) majority = std::max(majority, counts[c]);
  CHECK(cm.accuracy == doctest::Approx(static_cast<double>(majority) / 64.0));
}

TEST_CASE("probe contract errors") {
  util::RealMatrix features(20, 4);
  std::vector<int> one_class(20, 5);
  CHECK_THROWS_AS(probe_train(features, one_class), ValidationError);

  util::RealMatrix tiny(8, 4);
  std::vector<int> labels8 = {0, 1, 2, 3, 4, 5, 6, 7};
  CHECK_THROWS_AS(probe_train(tiny, labels8), ValidationError);
}

TEST_CASE("probe_eval: perfect and constant predictors") {
  // craft a 2-informative-feature problem
  util::RealMatrix features(32, 2);
  std::vector<int> labels;
  util::Rng rng(13);
  for (size_t i = 0; i < 32; ++i) {
    const int cls = static_cast<int>(i % 2);
    features.at(i, 0) = cls == 0 ? 1.0 : 0.0;
    features.at(i, 1) = cls == 1 ? 1.0 : 0.0;
    labels.push_back(cls);
  }
  auto model = probe_train(features, labels);
  auto cm = probe_eval(model, features, labels);
  CHECK(cm.accuracy == 1.0);

  // constant predictor: one nonzero column, majority flag raised
  ProbeModel constant;
  constant.n_classes = 16;
  constant.dim = 2;
  constant.w = util::RealMatrix(16, 2);
  constant.b.assign(16, 0.0);
  constant.b[7] = 10.0;
  auto cm2 = probe_eval(constant, features, labels);
  CHECK(cm2.majority_flag);
  CHECK(cm2.majority_class == 7);
  CHECK(cm2.accuracy == 0.0);
  for (size_t c = 0; c < 16; ++c)
    for (size_t p = 0; p < 16; ++p)
      if (p != 7) CHECK(cm2.at(c, p) == 0);
}

TEST_CASE("random 2-class accuracy matches the counting oracle") {
  util::Rng rng(17);
  util::RealMatrix features(40, 3);
  std::vector<int> labels;
  for (size_t i = 0; i < 40; ++i) {
    for (size_t d = 0; d < 3; ++d) features.at(i, d) = rng.uniform(-1, 1);
    labels.push_back(static_cast<int>(rng.uniform_int(2)));
  }
  ProbeOptions opts;
  opts.steps = 200;
  auto model = probe_train(features, labels, 16, opts);
  auto cm = probe_eval(model, features, labels);
  size_t correct = 0;
  for (size_t i = 0; i < 40; ++i)
    if (probe_predict(model, features.row(i)) == static_cast<size_t>(labels[i])) ++correct;
  CHECK(cm.accuracy == doctest::Approx(static_cast<double>(correct) / 40.0));
}

TEST_CASE("ranks and pearson: identical rankings give rank-r of 1") {
  std::vector<double> a = {1.0, 5.0, 3.0, 4.0};
  std::vector<double> b = {10.0, 500.0, 30.0, 40.0}; // same order, different scale
  CHECK(pearson(ranks(a), ranks(b)) == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> c = {4.0, 3.0, 5.0, 1.0};
  CHECK(pearson(ranks(a), ranks(c)) < 1.0);

  // ties get averaged ranks
  auto r = ranks({2.0, 2.0, 1.0});
  CHECK(r[0] == doctest::Approx(2.5));
  CHECK(r[1] == doctest::Approx(2.5));
  CHECK(r[2] == doctest::Approx(1.0));
}

TEST_CASE("confusion csv layout") {
  ConfusionMatrix cm;
  cm.n_classes = 2;
  cm.counts = {3, 1, 0, 4};
  cm.total = 8;
  const auto path = std::filesystem::temp_directory_path() / "sublm_conf_test.csv";
  write_confusion_csv(path, cm, {"x", "y"});
  CHECK(util::read_text_file(path) == "true\\pred,x,y\nx,3,1\ny,0,4\n");
  std::filesystem::remove(path);
}
