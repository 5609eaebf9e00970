#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "skirmish/policy.hpp"

using namespace skirmish;

namespace {

NetworkSpec tiny_spec(int input = 3, int width = 4, bool attention = true, bool shoot = true,
                      int adim = 3, int seq = 4) {
  NetworkSpec s;
  s.input_width = input;
  s.mlp_width = width;
  s.use_attention = attention;
  s.attention_dim = adim;
  s.max_seq = seq;
  s.shoot_head = shoot;
  return s;
}

// Completely independent forward pass: plain loops over the flat vector with
// locally re-derived offsets. Returns {mean0, mean1, value, shoot_logit}.
std::vector<double> naive_forward(const NetworkSpec& spec, const std::vector<double>& flat,
                                  const std::vector<std::vector<double>>& history) {
  const int w = spec.mlp_width;
  int at = 0;
  auto take_mat = [&](int rows, int cols) {
    int offset = at;
    at += rows * cols;
    return offset;  // column-major storage: m(i, j) = flat[offset + j*rows + i]
  };
  struct Off {
    int w0, b0, w1, b1, q, k, v, mw, mb, ls, sw, sb, vw, vb;
  } off{};
  off.w0 = take_mat(w, spec.input_width);
  off.b0 = take_mat(w, 1);
  off.w1 = take_mat(w, w);
  off.b1 = take_mat(w, 1);
  if (spec.use_attention) {
    off.q = take_mat(spec.attention_dim, w);
    off.k = take_mat(spec.attention_dim, w);
    off.v = take_mat(spec.attention_dim, w);
  }
  int fw = spec.use_attention ? spec.attention_dim : w;
  off.mw = take_mat(2, fw);
  off.mb = take_mat(2, 1);
  off.ls = take_mat(2, 1);
  if (spec.shoot_head) {
    off.sw = take_mat(1, fw);
    off.sb = take_mat(1, 1);
  }
  off.vw = take_mat(1, fw);
  off.vb = take_mat(1, 1);
  REQUIRE(at == static_cast<int>(flat.size()));

  auto matvec = [&](int offset, int rows, int cols, const std::vector<double>& x) {
    std::vector<double> y(static_cast<std::size_t>(rows), 0.0);
    for (int j = 0; j < cols; ++j) {
      for (int i = 0; i < rows; ++i) {
        y[static_cast<std::size_t>(i)] +=
            flat[static_cast<std::size_t>(offset + j * rows + i)] *
            x[static_cast<std::size_t>(j)];
      }
    }
    return y;
  };

  std::vector<std::vector<double>> enc;
  for (const auto& obs : history) {
    std::vector<double> h = matvec(off.w0, w, spec.input_width, obs);
    for (int i = 0; i < w; ++i) {
      h[static_cast<std::size_t>(i)] =
          std::tanh(h[static_cast<std::size_t>(i)] + flat[static_cast<std::size_t>(off.b0 + i)]);
    }
    std::vector<double> h2 = matvec(off.w1, w, w, h);
    for (int i = 0; i < w; ++i) {
      h2[static_cast<std::size_t>(i)] =
          std::tanh(h2[static_cast<std::size_t>(i)] + flat[static_cast<std::size_t>(off.b1 + i)]);
    }
    enc.push_back(h2);
  }

  std::vector<double> feature;
  if (spec.use_attention) {
    int a = spec.attention_dim;
    std::vector<double> q = matvec(off.q, a, w, enc.back());
    std::vector<std::vector<double>> keys, vals;
    for (const auto& e : enc) {
      keys.push_back(matvec(off.k, a, w, e));
      vals.push_back(matvec(off.v, a, w, e));
    }
    std::vector<double> scores;
    for (const auto& k : keys) {
      double s = 0.0;
      for (int i = 0; i < a; ++i) {
        s += k[static_cast<std::size_t>(i)] * q[static_cast<std::size_t>(i)];
      }
      scores.push_back(s / std::sqrt(static_cast<double>(a)));
    }
    double mx = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (double& s : scores) {
      s = std::exp(s - mx);
      z += s;
    }
    feature.assign(static_cast<std::size_t>(a), 0.0);
    for (std::size_t t = 0; t < enc.size(); ++t) {
      for (int i = 0; i < a; ++i) {
        feature[static_cast<std::size_t>(i)] +=
            scores[t] / z * vals[t][static_cast<std::size_t>(i)];
      }
    }
  } else {
    feature = enc.back();
  }

  std::vector<double> mean = matvec(off.mw, 2, fw, feature);
  mean[0] += flat[static_cast<std::size_t>(off.mb)];
  mean[1] += flat[static_cast<std::size_t>(off.mb + 1)];
  double value = matvec(off.vw, 1, fw, feature)[0] + flat[static_cast<std::size_t>(off.vb)];
  double shoot = 0.0;
  if (spec.shoot_head) {
    shoot = matvec(off.sw, 1, fw, feature)[0] + flat[static_cast<std::size_t>(off.sb)];
  }
  return {mean[0], mean[1], value, shoot};
}

MatX<double> random_history(Rng& rng, int len, int width) {
  MatX<double> h(len, width);
  for (int i = 0; i < len; ++i) {
    for (int j = 0; j < width; ++j) h(i, j) = rng.uniform(-1.0, 1.0);
  }
  return h;
}

void jitter_params(PolicyParams<double>& p, Rng& rng, double scale) {
  for (Eigen::Index i = 0; i < p.flat.size(); ++i) p.flat[i] += rng.uniform(-scale, scale);
}

}  // namespace

TEST_CASE("zero parameters give the neutral output", "[policy]") {
  for (bool attention : {false, true}) {
    NetworkSpec spec = tiny_spec(5, 6, attention, true);
    PolicyParams<float> p;
    p.spec = spec;
    p.layout = ParamLayout::from_spec(spec);
    p.flat = VecX<float>::Zero(p.layout.total);
    MatX<float> h = MatX<float>::Random(3, 5);
    PolicyOutput<float> out = forward(p, h);
    CHECK(out.move_mean[0] == 0.0f);
    CHECK(out.move_mean[1] == 0.0f);
    CHECK(out.shoot_prob() == 0.5f);
    CHECK(out.value == 0.0f);
  }
}

TEST_CASE("single observation equals the same observation repeated", "[policy]") {
  NetworkSpec spec = tiny_spec(4, 5, true, true, 3, 20);
  PolicyParams<double> p = init_params<double>(spec, 99);
  Rng rng(3);
  MatX<double> one = random_history(rng, 1, 4);
  MatX<double> rep(20, 4);
  for (int i = 0; i < 20; ++i) rep.row(i) = one.row(0);
  PolicyOutput<double> a = forward(p, one);
  PolicyOutput<double> b = forward(p, rep);
  CHECK(a.move_mean[0] == Catch::Approx(b.move_mean[0]).margin(1e-12));
  CHECK(a.move_mean[1] == Catch::Approx(b.move_mean[1]).margin(1e-12));
  CHECK(a.value == Catch::Approx(b.value).margin(1e-12));
  CHECK(a.shoot_logit == Catch::Approx(b.shoot_logit).margin(1e-12));
}

TEST_CASE("forward matches an independent matrix-arithmetic oracle", "[policy]") {
  Rng rng(1234);
  for (int iter = 0; iter < 20; ++iter) {
    NetworkSpec spec = tiny_spec(rng.uniform_int(2, 5), rng.uniform_int(3, 6),
                                 rng.bernoulli(0.5), rng.bernoulli(0.5), rng.uniform_int(2, 4),
                                 rng.uniform_int(1, 4));
    PolicyParams<double> p = init_params<double>(spec, rng.next_u64());
    jitter_params(p, rng, 0.2);
    int len = rng.uniform_int(1, spec.max_seq);
    MatX<double> h = random_history(rng, len, spec.input_width);

    std::vector<double> flat(p.flat.data(), p.flat.data() + p.flat.size());
    std::vector<std::vector<double>> hist;
    for (int i = 0; i < len; ++i) {
      std::vector<double> row(static_cast<std::size_t>(spec.input_width));
      for (int j = 0; j < spec.input_width; ++j) row[static_cast<std::size_t>(j)] = h(i, j);
      hist.push_back(std::move(row));
    }
    std::vector<double> want = naive_forward(spec, flat, hist);
    PolicyOutput<double> got = forward(p, h);
    REQUIRE(got.move_mean[0] == Catch::Approx(want[0]).margin(1e-10));
    REQUIRE(got.move_mean[1] == Catch::Approx(want[1]).margin(1e-10));
    REQUIRE(got.value == Catch::Approx(want[2]).margin(1e-10));
    if (spec.shoot_head) REQUIRE(got.shoot_logit == Catch::Approx(want[3]).margin(1e-10));
  }
}

TEST_CASE("attention weights sum to one over the window", "[policy]") {
  NetworkSpec spec = tiny_spec(4, 5, true, false, 3, 8);
  PolicyParams<double> p = init_params<double>(spec, 7);
  Rng rng(8);
  for (int len : {1, 3, 8}) {
    WindowBatch<double> wb;
    wb.X = random_history(rng, len, 4);
    wb.offset = {0};
    wb.length = {len};
    BatchCache<double> cache;
    batch_forward(p, wb, cache);
    REQUIRE(static_cast<int>(cache.alpha[0].size()) == len);
    CHECK(cache.alpha[0].sum() == Catch::Approx(1.0).margin(1e-12));
    CHECK(cache.alpha[0].minCoeff() > 0.0);
  }
}

TEST_CASE("analytic gradients match central finite differences", "[policy]") {
  Rng rng(777);
  for (int iter = 0; iter < 10; ++iter) {
    NetworkSpec spec = tiny_spec(rng.uniform_int(2, 4), rng.uniform_int(3, 6),
                                 rng.bernoulli(0.6), rng.bernoulli(0.5), rng.uniform_int(2, 4),
                                 rng.uniform_int(2, 4));
    PolicyParams<double> p = init_params<double>(spec, rng.next_u64());
    jitter_params(p, rng, 0.3);
    int len = rng.uniform_int(1, spec.max_seq);
    MatX<double> h = random_history(rng, len, spec.input_width);
    Vec2S<double> raw{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
    bool shoot_bit = rng.bernoulli(0.5);

    // Scalar objective: log-prob of a fixed action plus twice the value.
    auto objective = [&](const PolicyParams<double>& params) {
      PolicyOutput<double> out = forward(params, h);
      return action_log_prob(out, raw, shoot_bit) + 2.0 * out.value;
    };

    WindowBatch<double> wb;
    wb.X = h;
    wb.offset = {0};
    wb.length = {len};
    BatchCache<double> cache;
    batch_forward(p, wb, cache);
    PolicyOutput<double> out = output_of(p, cache, 0);

    MatX<double> d_mean(1, 2);
    Vec2S<double> d_logstd;
    for (int j = 0; j < 2; ++j) {
      double sigma = std::exp(out.move_logstd[j]);
      double z = (raw[j] - out.move_mean[j]) / sigma;
      d_mean(0, j) = z / sigma;
      d_logstd[j] = z * z - 1.0;
    }
    VecX<double> d_shoot = VecX<double>::Zero(1);
    if (spec.shoot_head) d_shoot[0] = (shoot_bit ? 1.0 : 0.0) - out.shoot_prob();
    VecX<double> d_value = VecX<double>::Constant(1, 2.0);
    VecX<double> grad = VecX<double>::Zero(p.flat.size());
    batch_backward(p, wb, cache, d_mean, d_shoot, d_value, d_logstd, grad);

    VecX<double> fd(p.flat.size());
    const double step = 1e-6;
    PolicyParams<double> pp = p;
    for (Eigen::Index i = 0; i < p.flat.size(); ++i) {
      pp.flat[i] = p.flat[i] + step;
      double up = objective(pp);
      pp.flat[i] = p.flat[i] - step;
      double down = objective(pp);
      pp.flat[i] = p.flat[i];
      fd[i] = (up - down) / (2.0 * step);
    }
    double rel = (grad - fd).norm() / std::max(fd.norm(), 1e-12);
    REQUIRE(rel < 1e-6);
  }
}

TEST_CASE("sampled actions follow the distribution", "[policy]") {
  PolicyOutput<double> out;
  out.move_mean = {0.3, -0.2};
  out.move_logstd = {-0.5, 0.1};
  out.has_shoot = true;
  out.shoot_logit = 0.8;
  Rng rng(2026);
  const int n = 100000;
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  long shoots = 0;
  for (int i = 0; i < n; ++i) {
    SampledAction<double> s = sample_action(out, rng);
    sum += Eigen::Vector2d(s.raw_move[0], s.raw_move[1]);
    shoots += s.shoot ? 1 : 0;
    REQUIRE(s.command.lateral >= -1.0);
    REQUIRE(s.command.lateral <= 1.0);
  }
  for (int j = 0; j < 2; ++j) {
    double se = std::exp(out.move_logstd[j]) / std::sqrt(static_cast<double>(n));
    REQUIRE(std::abs(sum[j] / n - out.move_mean[j]) < 3.0 * se);
  }
  double p = 1.0 / (1.0 + std::exp(-0.8));
  double se_p = std::sqrt(p * (1.0 - p) / n);
  REQUIRE(std::abs(static_cast<double>(shoots) / n - p) < 3.0 * se_p);

  // Sampling-time log-probs agree with the analytic density.
  SampledAction<double> s = sample_action(out, rng);
  double lp = gaussian_log_prob(out.move_mean, out.move_logstd, s.raw_move) +
              bernoulli_log_prob(out.shoot_logit, s.shoot);
  CHECK(s.log_prob == Catch::Approx(lp).margin(1e-12));
}

TEST_CASE("deterministic mode returns the mean and thresholded shoot", "[policy]") {
  PolicyOutput<float> out;
  out.move_mean = {0.4f, -2.0f};
  out.has_shoot = true;
  out.shoot_logit = 0.1f;
  ActionCommand cmd = deterministic_action(out);
  CHECK(cmd.lateral == Catch::Approx(0.4));
  CHECK(cmd.forward == -1.0);  // clamped
  CHECK(cmd.shoot);
  out.shoot_logit = -0.1f;
  CHECK_FALSE(deterministic_action(out).shoot);
}

TEST_CASE("certain shoot has zero log-prob", "[policy]") {
  CHECK(bernoulli_log_prob(40.0, true) == Catch::Approx(0.0).margin(1e-12));
  CHECK(bernoulli_log_prob(-40.0, false) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("log-std clamps to its range", "[policy]") {
  NetworkSpec spec = tiny_spec(3, 4, false, false);
  PolicyParams<double> p = init_params<double>(spec, 1);
  auto entry = p.layout.find("move.logstd");
  p.flat[entry.offset] = 10.0;
  p.flat[entry.offset + 1] = -10.0;
  MatX<double> h = MatX<double>::Random(1, 3);
  PolicyOutput<double> out = forward(p, h);
  CHECK(out.move_logstd[0] == 2.0);
  CHECK(out.move_logstd[1] == -5.0);
}

TEST_CASE("weight files round-trip bit-exactly", "[policy]") {
  NetworkSpec spec = tiny_spec(6, 8, true, true);
  PolicyParams<float> p = init_params<float>(spec, 5);
  std::string path = (std::filesystem::temp_directory_path() / "skirmish_test.params").string();
  save_params(p, path);
  PolicyParams<float> q = load_params<float>(path, spec);
  REQUIRE(q.flat.size() == p.flat.size());
  for (Eigen::Index i = 0; i < p.flat.size(); ++i) REQUIRE(q.flat[i] == p.flat[i]);

  // Saving the loaded params reproduces the identical file.
  std::string path2 = path + "2";
  save_params(q, path2);
  std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
  std::string ca((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string cb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(ca == cb);
  std::remove(path2.c_str());

  // Truncation is detected.
  std::ofstream trunc(path2, std::ios::binary);
  trunc.write(ca.data(), static_cast<std::streamsize>(ca.size() / 2));
  trunc.close();
  CHECK_THROWS_AS(load_params<float>(path2, spec), PolicyError);
  std::remove(path2.c_str());

  // Spec mismatch is detected.
  NetworkSpec other = spec;
  other.mlp_width = 16;
  CHECK_THROWS_AS(load_params<float>(path, other), PolicyError);
  std::remove(path.c_str());
}

TEST_CASE("incremental runtime matches the batched forward", "[policy]") {
  NetworkSpec spec = tiny_spec(5, 6, true, true, 4, 6);
  PolicyParams<double> p = init_params<double>(spec, 21);
  Rng rng(22);
  PolicyRuntime<double> runtime(&p);
  MatX<double> all = random_history(rng, 10, 5);
  for (int t = 0; t < 10; ++t) {
    PolicyOutput<double> inc = runtime.observe(all.row(t).transpose());
    int start = std::max(0, t - spec.max_seq + 1);
    MatX<double> window = all.middleRows(start, t - start + 1);
    PolicyOutput<double> batch = forward(p, window);
    REQUIRE(inc.move_mean[0] == Catch::Approx(batch.move_mean[0]).margin(1e-10));
    REQUIRE(inc.value == Catch::Approx(batch.value).margin(1e-10));
    REQUIRE(inc.shoot_logit == Catch::Approx(batch.shoot_logit).margin(1e-10));
  }
}

TEST_CASE("orthogonal init is deterministic and orthogonal", "[policy]") {
  NetworkSpec spec = tiny_spec(8, 6, false, false);
  PolicyParams<double> a = init_params<double>(spec, 42);
  PolicyParams<double> b = init_params<double>(spec, 42);
  REQUIRE(a.flat == b.flat);
  auto W = a.mat("mlp0.W");  // 6x8: orthonormal rows scaled by sqrt(2)
  MatX<double> g = W * W.transpose();
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      REQUIRE(g(i, j) == Catch::Approx(i == j ? 2.0 : 0.0).margin(1e-9));
    }
  }
}
