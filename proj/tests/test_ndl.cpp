#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "sublm/ndl/adam.hpp"
#include "sublm/ndl/gradcheck.hpp"
#include "sublm/ndl/linear.hpp"
#include "sublm/ndl/losses.hpp"
#include "sublm/ndl/lstm.hpp"
#include "sublm/ndl/serialize.hpp"
#include "sublm/util/rng.hpp"

using namespace sublm;
using namespace sublm::ndl;

namespace {

// Straight-line scalar reimplementation of one LSTM step, kept deliberately
// independent of the library code path.
template <typename T>
void oracle_lstm_step(const LstmParams<T>& p, const std::vector<T>& x, const std::vector<T>& h,
                      const std::vector<T>& c, std::vector<T>& h_out, std::vector<T>& c_out) {
  const size_t H = p.hidden_dim, I = p.input_dim;
  h_out.assign(H, 0);
  c_out.assign(H, 0);
  for (size_t j = 0; j < H; ++j) {
    double a_i = p.bias[j], a_f = p.bias[H + j], a_g = p.bias[2 * H + j], a_o = p.bias[3 * H + j];
    for (size_t k = 0; k < I; ++k) {
      a_i += p.w_ih.data[j * I + k] * x[k];
      a_f += p.w_ih.data[(H + j) * I + k] * x[k];
      a_g += p.w_ih.data[(2 * H + j) * I + k] * x[k];
      a_o += p.w_ih.data[(3 * H + j) * I + k] * x[k];
    }
    for (size_t k = 0; k < H; ++k) {
      a_i += p.w_hh.data[j * H + k] * h[k];
      a_f += p.w_hh.data[(H + j) * H + k] * h[k];
      a_g += p.w_hh.data[(2 * H + j) * H + k] * h[k];
      a_o += p.w_hh.data[(3 * H + j) * H + k] * h[k];
    }
    const double gi = 1.0 / (1.0 + std::exp(-a_i));
    const double gf = 1.0 / (1.0 + std::exp(-a_f));
    const double gg = std::tanh(a_g);
    const double go = 1.0 / (1.0 + std::exp(-a_o));
    const double cc = gf * c[j] + gi * gg;
    c_out[j] = static_cast<T>(cc);
    h_out[j] = static_cast<T>(go * std::tanh(cc));
  }
}

template <typename T>
LstmParams<T> random_lstm(size_t in, size_t hidden, uint64_t seed) {
  LstmParams<T> p(in, hidden);
  util::Rng rng(seed);
  p.w_ih.fill_uniform(rng, 0.5);
  p.w_hh.fill_uniform(rng, 0.5);
  p.bias.fill_uniform(rng, 0.5);
  return p;
}

} // namespace

TEST_CASE("lstm_step: zero params, zero cell") {
  LstmParams<double> p(3, 2); // zero-initialized
  Vec<double> x{0.3, -0.2, 0.1}, h(2, 0.0), c(2, 0.0), ho, co;
  lstm_step(p, x, h, c, ho, co);
  for (double v : ho) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
  for (double v : co) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("lstm_step: zero params, unit cell gives closed form") {
  LstmParams<double> p(3, 2);
  Vec<double> x{1.0, 2.0, 3.0}, h(2, 0.0), c(2, 1.0), ho, co;
  lstm_step(p, x, h, c, ho, co);
  // sigma(0)=0.5: c' = 0.5, h' = 0.5 * tanh(0.5)
  const double expect_h = 0.5 * std::tanh(0.5);
  for (double v : co) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
  for (double v : ho) CHECK(v == doctest::Approx(expect_h).epsilon(1e-12));
  CHECK(expect_h == doctest::Approx(0.23106).epsilon(1e-4));
}

TEST_CASE("lstm_step matches scalar-loop oracle on a random case") {
  auto p = random_lstm<double>(3, 2, 42);
  util::Rng rng(7);
  Vec<double> x(3), h(2), c(2), ho, co, oh, oc;
  for (auto& v : x) v = rng.uniform(-1, 1);
  for (auto& v : h) v = rng.uniform(-1, 1);
  for (auto& v : c) v = rng.uniform(-1, 1);
  lstm_step(p, x, h, c, ho, co);
  oracle_lstm_step(p, x, h, c, oh, oc);
  for (size_t i = 0; i < 2; ++i) {
    CHECK(ho[i] == doctest::Approx(oh[i]).epsilon(1e-12));
    CHECK(co[i] == doctest::Approx(oc[i]).epsilon(1e-12));
  }
}

TEST_CASE("lstm_step raises when the output turns non-finite") {
  auto p = random_lstm<double>(2, 2, 1);
  p.w_ih.data[0] = std::nan("");
  Vec<double> x{1.0, 1.0}, h(2, 0.0), c(2, 0.0), ho, co;
  CHECK_THROWS_AS(lstm_step(p, x, h, c, ho, co), NumericError);
}

TEST_CASE("lstm_backward against central finite differences") {
  const size_t I = 3, H = 4, T = 3;
  auto p = random_lstm<double>(I, H, 99);
  util::Rng rng(5);
  std::vector<Vec<double>> inputs(T, Vec<double>(I));
  for (auto& f : inputs)
    for (auto& v : f) v = rng.uniform(-1, 1);
  Vec<double> target(H);
  for (auto& v : target) v = rng.uniform(-1, 1);

  // loss = MSE(final h, target)
  auto loss_fn = [&]() {
    auto run = lstm_forward(p, inputs);
    return static_cast<double>(mse_loss(run.h, target));
  };

  auto run = lstm_forward(p, inputs);
  Vec<double> dh;
  mse_loss(run.h, target, &dh);
  LstmGrads<double> grads(p);
  lstm_backward(p, run, nullptr, &dh, nullptr, grads);

  NamedParamList<double> params{{"w_ih", &p.w_ih, &grads.w_ih},
                                {"w_hh", &p.w_hh, &grads.w_hh},
                                {"bias", &p.bias, &grads.bias}};
  auto result = grad_check(loss_fn, params, 1e-5, 500, 0);
  CHECK(result.max_rel_err < 1e-4);
}

TEST_CASE("lstm_backward input gradients match finite differences") {
  const size_t I = 2, H = 3, T = 2;
  auto p = random_lstm<double>(I, H, 3);
  util::Rng rng(11);
  std::vector<Vec<double>> inputs(T, Vec<double>(I));
  for (auto& f : inputs)
    for (auto& v : f) v = rng.uniform(-1, 1);
  Vec<double> target(H);
  for (auto& v : target) v = rng.uniform(-1, 1);

  auto run = lstm_forward(p, inputs);
  Vec<double> dh;
  mse_loss(run.h, target, &dh);
  LstmGrads<double> grads(p);
  std::vector<Vec<double>> dx;
  lstm_backward(p, run, nullptr, &dh, nullptr, grads, &dx);

  const double eps = 1e-6;
  for (size_t t = 0; t < T; ++t) {
    for (size_t i = 0; i < I; ++i) {
      const double saved = inputs[t][i];
      inputs[t][i] = saved + eps;
      const double up = mse_loss(lstm_forward(p, inputs).h, target);
      inputs[t][i] = saved - eps;
      const double down = mse_loss(lstm_forward(p, inputs).h, target);
      inputs[t][i] = saved;
      const double numeric = (up - down) / (2 * eps);
      CHECK(dx[t][i] == doctest::Approx(numeric).epsilon(1e-5));
    }
  }
}

TEST_CASE("lstm_backward: zero upstream gradient gives zero parameter grads") {
  auto p = random_lstm<double>(2, 3, 8);
  std::vector<Vec<double>> inputs(3, Vec<double>{0.5, -0.5});
  auto run = lstm_forward(p, inputs);
  Vec<double> dh(3, 0.0);
  LstmGrads<double> grads(p);
  lstm_backward(p, run, nullptr, &dh, nullptr, grads);
  for (double g : grads.w_ih.data) CHECK(g == 0.0);
  for (double g : grads.w_hh.data) CHECK(g == 0.0);
  for (double g : grads.bias.data) CHECK(g == 0.0);
}

TEST_CASE("single-step lstm_backward equals direct cell-level chain rule") {
  // One step, loss = sum(h). Hand chain rule for db_o as a spot check:
  // dL/da_o = tanh(c) * o * (1 - o), evaluated at the cached values.
  const size_t I = 2, H = 2;
  auto p = random_lstm<double>(I, H, 13);
  std::vector<Vec<double>> inputs{{0.2, -0.7}};
  auto run = lstm_forward(p, inputs);
  Vec<double> dh(H, 1.0);
  LstmGrads<double> grads(p);
  lstm_backward(p, run, nullptr, &dh, nullptr, grads);

  const auto& cache = run.steps[0];
  for (size_t j = 0; j < H; ++j) {
    const double o = cache.go[j], tc = cache.tanh_c[j];
    const double d_ao = tc * o * (1 - o);
    CHECK(grads.bias[3 * H + j] == doctest::Approx(d_ao).epsilon(1e-12));
    const double dct = o * (1 - tc * tc);
    const double d_ai = dct * cache.gg[j] * cache.gi[j] * (1 - cache.gi[j]);
    CHECK(grads.bias[j] == doctest::Approx(d_ai).epsilon(1e-12));
  }
}

TEST_CASE("mse_loss basics and random oracle") {
  Vec<double> a{1, 2, 3}, b{1, 2, 3};
  CHECK(mse_loss(a, b) == 0.0);

  Vec<double> c{2, 3, 4};
  CHECK(mse_loss(c, b) == doctest::Approx(1.0).epsilon(1e-15));

  util::Rng rng(21);
  Vec<double> p(6), t(6);
  for (auto& v : p) v = rng.uniform(-2, 2);
  for (auto& v : t) v = rng.uniform(-2, 2);
  Vec<double> grad;
  const double loss = mse_loss(p, t, &grad);
  double acc = 0;
  for (size_t i = 0; i < 6; ++i) acc += (p[i] - t[i]) * (p[i] - t[i]);
  CHECK(loss == doctest::Approx(acc / 6.0).epsilon(1e-12));
  for (size_t i = 0; i < 6; ++i)
    CHECK(grad[i] == doctest::Approx(2 * (p[i] - t[i]) / 6.0).epsilon(1e-12));

  Vec<double> wrong{1, 2};
  CHECK_THROWS_AS(mse_loss(a, wrong), ValidationError);
}

TEST_CASE("bce_loss: zeros, saturation, naive oracle") {
  Vec<double> logits(66, 0.0), targets(66, 0.0);
  for (size_t i = 0; i < 66; i += 2) targets[i] = 1.0;
  CHECK(bce_loss(logits, targets) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  Vec<double> big{50.0}, one{1.0};
  CHECK(bce_loss(big, one) == doctest::Approx(0.0).epsilon(1e-9));
  Vec<double> bigneg{-50.0}, zero{0.0};
  CHECK(bce_loss(bigneg, zero) == doctest::Approx(0.0).epsilon(1e-9));

  util::Rng rng(31);
  Vec<double> l(10), t(10), grad;
  for (auto& v : l) v = rng.uniform(-5, 5);
  for (auto& v : t) v = rng.next_double() < 0.5 ? 0.0 : 1.0;
  const double loss = bce_loss(l, t, &grad);
  double naive = 0.0;
  for (size_t i = 0; i < 10; ++i) {
    const double s = 1.0 / (1.0 + std::exp(-l[i]));
    naive += -(t[i] * std::log(s) + (1 - t[i]) * std::log(1 - s));
  }
  CHECK(loss == doctest::Approx(naive / 10.0).epsilon(1e-9));
  for (size_t i = 0; i < 10; ++i) {
    const double s = 1.0 / (1.0 + std::exp(-l[i]));
    CHECK(grad[i] == doctest::Approx((s - t[i]) / 10.0).epsilon(1e-9));
  }

  Vec<double> bad{0.5};
  CHECK_THROWS_AS(bce_loss(big, bad), ValidationError);
}

TEST_CASE("adam: first-step magnitude, zero-grad identity, 3-step scalar trace") {
  Tensor<double> param({3});
  param.data = {1.0, -2.0, 0.5};
  Tensor<double> grad({3});
  grad.data = {0.4, -0.01, 2.0};
  NamedParamList<double> params{{"p", &param, &grad}};

  Adam<double> opt(1e-3);
  opt.step(params);
  // After one step the update is lr * g/(|g| + eps) which is ~ +/- lr.
  CHECK(param.data[0] == doctest::Approx(1.0 - 1e-3).epsilon(1e-6));
  CHECK(param.data[1] == doctest::Approx(-2.0 + 1e-3).epsilon(1e-6));
  CHECK(param.data[2] == doctest::Approx(0.5 - 1e-3).epsilon(1e-6));

  // zero gradient leaves parameters unchanged (moments decay but m stays 0)
  Tensor<double> p2({2});
  p2.data = {3.0, -4.0};
  Tensor<double> g2({2}); // zeros
  NamedParamList<double> params2{{"p", &p2, &g2}};
  Adam<double> opt2(1e-2);
  for (int i = 0; i < 5; ++i) opt2.step(params2);
  CHECK(p2.data[0] == 3.0);
  CHECK(p2.data[1] == -4.0);

  // 3-step scalar trace against an independently coded update rule
  Tensor<double> p3({1});
  p3.data = {0.7};
  Tensor<double> g3({1});
  NamedParamList<double> params3{{"p", &p3, &g3}};
  Adam<double> opt3(0.05);
  const double grads_seq[3] = {0.3, -0.1, 0.25};

  double x = 0.7, m = 0.0, v = 0.0;
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8, lr = 0.05;
  for (int s = 0; s < 3; ++s) {
    g3.data[0] = grads_seq[s];
    opt3.step(params3);

    m = b1 * m + (1 - b1) * grads_seq[s];
    v = b2 * v + (1 - b2) * grads_seq[s] * grads_seq[s];
    const double mh = m / (1 - std::pow(b1, s + 1));
    const double vh = v / (1 - std::pow(b2, s + 1));
    x -= lr * mh / (std::sqrt(vh) + eps);
    CHECK(p3.data[0] == doctest::Approx(x).epsilon(1e-12));
  }

  // non-finite gradient raises
  g3.data[0] = std::nan("");
  CHECK_THROWS_AS(opt3.step(params3), NumericError);
}

TEST_CASE("grad_check: quadratic sanity and corrupted-gradient detection") {
  Tensor<double> p({1});
  p.data = {3.0};
  Tensor<double> g({1});
  g.data = {6.0}; // d(p^2)/dp at 3
  NamedParamList<double> params{{"p", &p, &g}};
  auto loss = [&]() { return p.data[0] * p.data[0]; };
  auto res = grad_check(loss, params, 1e-5, 500, 0);
  CHECK(res.max_rel_err < 1e-9);

  g.data = {6.0 * 1.1}; // corrupt by 10%
  auto res2 = grad_check(loss, params, 1e-5, 500, 0);
  CHECK(res2.max_rel_err > 1e-2);
}

TEST_CASE("clip_grad_norm scales to the requested global norm") {
  Tensor<double> p({2}), g({2});
  g.data = {3.0, 4.0}; // norm 5
  NamedParamList<double> params{{"p", &p, &g}};
  const double pre = clip_grad_norm(params, 1.0);
  CHECK(pre == doctest::Approx(5.0));
  CHECK(std::hypot(g.data[0], g.data[1]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("checkpoint round trip is bitwise exact for float tensors") {
  const auto path = std::filesystem::temp_directory_path() / "sublm_test_ckpt.sblm";
  LstmParams<float> p(3, 4);
  util::Rng rng(17);
  p.init(rng);
  LinearParams<float> head(4, 2);
  head.init(rng);

  NamedParamList<float> params{{"lstm.w_ih", &p.w_ih, nullptr},
                               {"lstm.w_hh", &p.w_hh, nullptr},
                               {"lstm.bias", &p.bias, nullptr},
                               {"head.w", &head.w, nullptr},
                               {"head.b", &head.b, nullptr}};
  save_checkpoint(path, {{"component", "test"}, {"variant", "unit"}}, params);

  LstmParams<float> p2(3, 4);
  LinearParams<float> head2(4, 2);
  NamedParamList<float> params2{{"lstm.w_ih", &p2.w_ih, nullptr},
                                {"lstm.w_hh", &p2.w_hh, nullptr},
                                {"lstm.bias", &p2.bias, nullptr},
                                {"head.w", &head2.w, nullptr},
                                {"head.b", &head2.b, nullptr}};
  auto header = load_checkpoint(path, params2);
  CHECK(header.field("component") == "test");
  CHECK(header.field("variant") == "unit");
  CHECK(p2.w_ih.data == p.w_ih.data);
  CHECK(p2.w_hh.data == p.w_hh.data);
  CHECK(p2.bias.data == p.bias.data);
  CHECK(head2.w.data == head.w.data);

  SUBCASE("truncated file raises a corrupt-checkpoint error") {
    const auto trunc = std::filesystem::temp_directory_path() / "sublm_test_trunc.sblm";
    std::string bytes = util::read_text_file(path);
    util::write_text_file(trunc, bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(load_checkpoint(trunc, params2), IoError);
    std::filesystem::remove(trunc);
  }

  SUBCASE("shape-manifest mismatch raises") {
    LstmParams<float> other(3, 5); // different hidden size
    LinearParams<float> head3(5, 2);
    NamedParamList<float> wrong{{"lstm.w_ih", &other.w_ih, nullptr},
                                {"lstm.w_hh", &other.w_hh, nullptr},
                                {"lstm.bias", &other.bias, nullptr},
                                {"head.w", &head3.w, nullptr},
                                {"head.b", &head3.b, nullptr}};
    CHECK_THROWS_AS(load_checkpoint(path, wrong), IoError);
  }

  std::filesystem::remove(path);
}

TEST_CASE("fixed seed gives identical init and adam trajectory") {
  auto make = [](uint64_t seed) {
    LstmParams<float> p(4, 4);
    util::Rng rng(seed);
    p.init(rng);
    return p;
  };
  auto a = make(123), b = make(123);
  CHECK(a.w_ih.data == b.w_ih.data);
  CHECK(a.w_hh.data == b.w_hh.data);

  // forget-gate bias is +1, the rest 0
  for (size_t h = 0; h < 4; ++h) {
    CHECK(a.bias[4 + h] == 1.0f);
    CHECK(a.bias[h] == 0.0f);
    CHECK(a.bias[8 + h] == 0.0f);
    CHECK(a.bias[12 + h] == 0.0f);
  }
}
