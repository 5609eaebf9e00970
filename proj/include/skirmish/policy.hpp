#pragma once

// Policy/value networks: a small tanh MLP over each observation, an optional
// single-head scaled-dot-product attention block over the encodings of the
// last max_seq observations (query = newest encoding), and linear heads for
// the movement Gaussian, the optional shoot Bernoulli, and the value.
//
// Everything is templated on the scalar type: training and inference run in
// float, while gradient-check tests instantiate the identical code in double.
// Forward passes are pure functions of (params, history); the analytic
// backward pass is hand-written and verified against finite differences.
//
// Parameters live in one flat vector with a named layout. Weight files store
// float32 little-endian regardless of the in-memory scalar:
//   "SBRL" | u32 version | u64 spec hash | u16 spec string len | spec string
//   | u32 n entries | entries (u16 name len, name, u32 rows, u32 cols,
//   u64 offset) | u64 total | total * f32

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <deque>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "skirmish/arena.hpp"
#include "skirmish/config.hpp"
#include "skirmish/rng.hpp"

namespace skirmish {

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using Vec2S = Eigen::Matrix<S, 2, 1>;

class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NetworkSpec {
  int input_width = 0;
  int mlp_depth = 2;
  int mlp_width = 64;
  bool use_attention = false;
  int attention_dim = 60;
  int max_seq = 20;
  bool shoot_head = false;

  int feature_width() const { return use_attention ? attention_dim : mlp_width; }

  std::string canonical() const {
    return "in=" + std::to_string(input_width) + " depth=" + std::to_string(mlp_depth) +
           " width=" + std::to_string(mlp_width) + " attn=" + (use_attention ? "1" : "0") +
           " adim=" + std::to_string(attention_dim) + " seq=" + std::to_string(max_seq) +
           " shoot=" + (shoot_head ? "1" : "0");
  }
  std::uint64_t hash() const { return fnv1a(canonical()); }
  bool operator==(const NetworkSpec&) const = default;
};

struct ParamLayout {
  struct Entry {
    std::string name;
    int rows = 0;
    int cols = 1;
    int offset = 0;
  };
  std::vector<Entry> entries;
  int total = 0;

  static ParamLayout from_spec(const NetworkSpec& s) {
    ParamLayout l;
    auto add = [&](const std::string& name, int rows, int cols) {
      l.entries.push_back({name, rows, cols, l.total});
      l.total += rows * cols;
    };
    int in = s.input_width;
    for (int i = 0; i < s.mlp_depth; ++i) {
      add("mlp" + std::to_string(i) + ".W", s.mlp_width, in);
      add("mlp" + std::to_string(i) + ".b", s.mlp_width, 1);
      in = s.mlp_width;
    }
    if (s.use_attention) {
      add("attn.q", s.attention_dim, s.mlp_width);
      add("attn.k", s.attention_dim, s.mlp_width);
      add("attn.v", s.attention_dim, s.mlp_width);
    }
    int fw = s.feature_width();
    add("move.W", 2, fw);
    add("move.b", 2, 1);
    add("move.logstd", 2, 1);
    if (s.shoot_head) {
      add("shoot.W", 1, fw);
      add("shoot.b", 1, 1);
    }
    add("value.W", 1, fw);
    add("value.b", 1, 1);
    return l;
  }

  const Entry& find(const std::string& name) const {
    for (const auto& e : entries) {
      if (e.name == name) return e;
    }
    throw PolicyError("no parameter tensor named '" + name + "'");
  }
};

template <typename S>
struct PolicyParams {
  NetworkSpec spec;
  ParamLayout layout;
  VecX<S> flat;

  Eigen::Map<const MatX<S>> mat(const std::string& name) const {
    const auto& e = layout.find(name);
    return {flat.data() + e.offset, e.rows, e.cols};
  }
  Eigen::Map<const VecX<S>> vec(const std::string& name) const {
    const auto& e = layout.find(name);
    return {flat.data() + e.offset, static_cast<Eigen::Index>(e.rows) * e.cols};
  }
};

namespace detail {

// Orthogonal columns with QR sign fixing, computed in double for a scalar-
// independent initialization basis.
inline Eigen::MatrixXd orthogonal_matrix(int rows, int cols, Rng& rng) {
  int hi = std::max(rows, cols), lo = std::min(rows, cols);
  Eigen::MatrixXd a(hi, lo);
  for (int j = 0; j < lo; ++j) {
    for (int i = 0; i < hi; ++i) a(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(hi, lo);
  Eigen::MatrixXd r = qr.matrixQR().topRows(lo);
  for (int j = 0; j < lo; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return rows >= cols ? q : Eigen::MatrixXd(q.transpose());
}

inline double init_gain(const std::string& name) {
  if (name.rfind("mlp", 0) == 0 && name.back() == 'W') return std::sqrt(2.0);
  if (name == "move.W" || name == "shoot.W") return 0.01;
  return 1.0;  // attention projections and the value head
}

template <typename S>
S softplus(S x) {
  if (x > S(30)) return x;
  if (x < S(-30)) return std::exp(x);
  return std::log1p(std::exp(x));
}

template <typename S>
S sigmoid(S x) {
  if (x >= S(0)) return S(1) / (S(1) + std::exp(-x));
  S e = std::exp(x);
  return e / (S(1) + e);
}

}  // namespace detail

template <typename S>
PolicyParams<S> init_params(const NetworkSpec& spec, std::uint64_t seed) {
  PolicyParams<S> p;
  p.spec = spec;
  p.layout = ParamLayout::from_spec(spec);
  p.flat = VecX<S>::Zero(p.layout.total);
  Rng rng(seed);
  for (const auto& e : p.layout.entries) {
    if (e.cols == 1) continue;  // biases and logstd start at zero
    Eigen::MatrixXd w = detail::orthogonal_matrix(e.rows, e.cols, rng) * detail::init_gain(e.name);
    Eigen::Map<MatX<S>> dst(p.flat.data() + e.offset, e.rows, e.cols);
    dst = w.cast<S>();
  }
  return p;
}

// ---------------------------------------------------------------------------
// Forward

constexpr double kLogStdMin = -5.0;
constexpr double kLogStdMax = 2.0;

template <typename S>
struct PolicyOutput {
  Vec2S<S> move_mean = Vec2S<S>::Zero();
  Vec2S<S> move_logstd = Vec2S<S>::Zero();
  bool has_shoot = false;
  S shoot_logit = S(0);
  S value = S(0);

  S shoot_prob() const { return detail::sigmoid(shoot_logit); }
};

// A minibatch of observation windows stacked row-wise: sample i owns rows
// [offset[i], offset[i] + length[i]), ordered oldest to newest.
template <typename S>
struct WindowBatch {
  MatX<S> X;
  std::vector<int> offset;
  std::vector<int> length;

  int samples() const { return static_cast<int>(offset.size()); }
};

template <typename S>
struct BatchCache {
  std::vector<MatX<S>> acts;  // post-tanh activations per MLP layer
  MatX<S> K, V;               // rows x adim
  MatX<S> q;                  // samples x adim
  std::vector<VecX<S>> alpha;
  MatX<S> F;          // samples x feature_width
  MatX<S> move_mean;  // samples x 2
  VecX<S> shoot_logit;
  VecX<S> value;
  Vec2S<S> logstd;  // clamped values in use
};

template <typename S>
void batch_forward(const PolicyParams<S>& p, const WindowBatch<S>& wb, BatchCache<S>& c) {
  const NetworkSpec& spec = p.spec;
  const int m = wb.samples();
  if (m == 0) throw PolicyError("empty window batch");
  if (wb.X.cols() != spec.input_width) throw PolicyError("observation width mismatch");
  for (int i = 0; i < m; ++i) {
    if (wb.length[i] < 1 || wb.length[i] > spec.max_seq) {
      throw PolicyError("window length out of range");
    }
  }

  c.acts.resize(static_cast<std::size_t>(spec.mlp_depth));
  const MatX<S>* prev = &wb.X;
  for (int l = 0; l < spec.mlp_depth; ++l) {
    auto W = p.mat("mlp" + std::to_string(l) + ".W");
    auto b = p.vec("mlp" + std::to_string(l) + ".b");
    c.acts[static_cast<std::size_t>(l)] =
        ((*prev * W.transpose()).rowwise() + b.transpose()).array().tanh().matrix();
    prev = &c.acts[static_cast<std::size_t>(l)];
  }
  const MatX<S>& E = *prev;

  const int fw = spec.feature_width();
  c.F.resize(m, fw);
  if (spec.use_attention) {
    auto Wq = p.mat("attn.q");
    auto Wk = p.mat("attn.k");
    auto Wv = p.mat("attn.v");
    c.K = E * Wk.transpose();
    c.V = E * Wv.transpose();
    c.q.resize(m, spec.attention_dim);
    c.alpha.assign(static_cast<std::size_t>(m), {});
    const S inv_sqrt_d = S(1) / std::sqrt(static_cast<S>(spec.attention_dim));
    for (int i = 0; i < m; ++i) {
      int off = wb.offset[i], len = wb.length[i];
      c.q.row(i) = E.row(off + len - 1) * Wq.transpose();
      VecX<S> scores = c.K.middleRows(off, len) * c.q.row(i).transpose() * inv_sqrt_d;
      S mx = scores.maxCoeff();
      VecX<S> ex = (scores.array() - mx).exp();
      VecX<S> a = ex / ex.sum();
      c.F.row(i) = a.transpose() * c.V.middleRows(off, len);
      c.alpha[static_cast<std::size_t>(i)] = std::move(a);
    }
  } else {
    for (int i = 0; i < m; ++i) {
      c.F.row(i) = E.row(wb.offset[i] + wb.length[i] - 1);
    }
  }

  c.move_mean = (c.F * p.mat("move.W").transpose()).rowwise() + p.vec("move.b").transpose();
  auto raw_logstd = p.vec("move.logstd");
  c.logstd[0] = std::clamp(raw_logstd[0], S(kLogStdMin), S(kLogStdMax));
  c.logstd[1] = std::clamp(raw_logstd[1], S(kLogStdMin), S(kLogStdMax));
  if (spec.shoot_head) {
    c.shoot_logit = c.F * p.mat("shoot.W").transpose().col(0);
    c.shoot_logit.array() += p.vec("shoot.b")[0];
  } else {
    c.shoot_logit = VecX<S>::Zero(m);
  }
  c.value = c.F * p.mat("value.W").transpose().col(0);
  c.value.array() += p.vec("value.b")[0];
}

template <typename S>
PolicyOutput<S> output_of(const PolicyParams<S>& p, const BatchCache<S>& c, int i) {
  PolicyOutput<S> out;
  out.move_mean = c.move_mean.row(i).transpose();
  out.move_logstd = c.logstd;
  out.has_shoot = p.spec.shoot_head;
  out.shoot_logit = c.shoot_logit[i];
  out.value = c.value[i];
  return out;
}

// Single-history forward: rows ordered oldest to newest.
template <typename S>
PolicyOutput<S> forward(const PolicyParams<S>& p, const MatX<S>& history) {
  if (history.rows() == 0) throw PolicyError("empty observation history");
  WindowBatch<S> wb;
  wb.X = history;
  wb.offset = {0};
  wb.length = {static_cast<int>(history.rows())};
  BatchCache<S> cache;
  batch_forward(p, wb, cache);
  return output_of(p, cache, 0);
}

// ---------------------------------------------------------------------------
// Backward
//
// Inputs are the per-sample gradients of the scalar loss with respect to the
// head outputs; d_logstd is the gradient with respect to the clamped logstd
// summed over samples. Parameter gradients accumulate into `grad` (same
// layout as params.flat), which the caller must size and zero.

template <typename S>
void batch_backward(const PolicyParams<S>& p, const WindowBatch<S>& wb, const BatchCache<S>& c,
                    const MatX<S>& d_mean, const VecX<S>& d_shoot, const VecX<S>& d_value,
                    const Vec2S<S>& d_logstd, VecX<S>& grad) {
  const NetworkSpec& spec = p.spec;
  const int m = wb.samples();
  const int rows = static_cast<int>(wb.X.rows());
  if (grad.size() != p.flat.size()) throw PolicyError("gradient vector size mismatch");

  auto gmat = [&](const std::string& name) {
    const auto& e = p.layout.find(name);
    return Eigen::Map<MatX<S>>(grad.data() + e.offset, e.rows, e.cols);
  };
  auto gvec = [&](const std::string& name) {
    const auto& e = p.layout.find(name);
    return Eigen::Map<VecX<S>>(grad.data() + e.offset,
                               static_cast<Eigen::Index>(e.rows) * e.cols);
  };

  // Heads.
  gmat("move.W") += d_mean.transpose() * c.F;
  gvec("move.b") += d_mean.colwise().sum().transpose();
  {
    auto raw = p.vec("move.logstd");
    auto g = gvec("move.logstd");
    for (int j = 0; j < 2; ++j) {
      if (raw[j] > S(kLogStdMin) && raw[j] < S(kLogStdMax)) g[j] += d_logstd[j];
    }
  }
  MatX<S> dF = d_mean * p.mat("move.W");
  if (spec.shoot_head) {
    gmat("shoot.W") += (d_shoot.transpose() * c.F);
    gvec("shoot.b")[0] += d_shoot.sum();
    dF.noalias() += d_shoot * p.mat("shoot.W");
  }
  gmat("value.W") += (d_value.transpose() * c.F);
  gvec("value.b")[0] += d_value.sum();
  dF.noalias() += d_value * p.mat("value.W");

  // Feature block.
  const MatX<S>& E = c.acts.back();
  MatX<S> dE = MatX<S>::Zero(rows, spec.mlp_width);
  if (spec.use_attention) {
    auto Wq = p.mat("attn.q");
    auto Wk = p.mat("attn.k");
    auto Wv = p.mat("attn.v");
    MatX<S> dK = MatX<S>::Zero(rows, spec.attention_dim);
    MatX<S> dV = MatX<S>::Zero(rows, spec.attention_dim);
    MatX<S> dq = MatX<S>::Zero(m, spec.attention_dim);
    const S inv_sqrt_d = S(1) / std::sqrt(static_cast<S>(spec.attention_dim));
    for (int i = 0; i < m; ++i) {
      int off = wb.offset[i], len = wb.length[i];
      const VecX<S>& a = c.alpha[static_cast<std::size_t>(i)];
      VecX<S> df = dF.row(i).transpose();
      dV.middleRows(off, len).noalias() += a * df.transpose();
      VecX<S> da = c.V.middleRows(off, len) * df;
      S dot = a.dot(da);
      VecX<S> ds = a.array() * (da.array() - dot);
      dq.row(i).noalias() = (c.K.middleRows(off, len).transpose() * ds).transpose() * inv_sqrt_d;
      dK.middleRows(off, len).noalias() += ds * c.q.row(i) * inv_sqrt_d;
    }
    // Query rows gather the newest encoding of each sample.
    MatX<S> E_last(m, spec.mlp_width);
    for (int i = 0; i < m; ++i) E_last.row(i) = E.row(wb.offset[i] + wb.length[i] - 1);
    gmat("attn.q") += dq.transpose() * E_last;
    gmat("attn.k") += dK.transpose() * E;
    gmat("attn.v") += dV.transpose() * E;
    MatX<S> dE_last = dq * Wq;
    for (int i = 0; i < m; ++i) {
      dE.row(wb.offset[i] + wb.length[i] - 1) += dE_last.row(i);
    }
    dE.noalias() += dK * Wk;
    dE.noalias() += dV * Wv;
  } else {
    for (int i = 0; i < m; ++i) {
      dE.row(wb.offset[i] + wb.length[i] - 1) += dF.row(i);
    }
  }

  // MLP, newest layer first.
  MatX<S> dA = std::move(dE);
  for (int l = spec.mlp_depth - 1; l >= 0; --l) {
    const MatX<S>& A = c.acts[static_cast<std::size_t>(l)];
    const MatX<S>& input = l == 0 ? wb.X : c.acts[static_cast<std::size_t>(l - 1)];
    MatX<S> dZ = (dA.array() * (S(1) - A.array().square())).matrix();
    gmat("mlp" + std::to_string(l) + ".W") += dZ.transpose() * input;
    gvec("mlp" + std::to_string(l) + ".b") += dZ.colwise().sum().transpose();
    if (l > 0) dA = dZ * p.mat("mlp" + std::to_string(l) + ".W");
  }
}

// ---------------------------------------------------------------------------
// Distributions

template <typename S>
S gaussian_log_prob(const Vec2S<S>& mean, const Vec2S<S>& logstd, const Vec2S<S>& raw) {
  constexpr double kLog2Pi = 1.8378770664093454836;
  S lp = S(0);
  for (int j = 0; j < 2; ++j) {
    S z = (raw[j] - mean[j]) / std::exp(logstd[j]);
    lp += S(-0.5) * z * z - logstd[j] - S(0.5) * S(kLog2Pi);
  }
  return lp;
}

template <typename S>
S bernoulli_log_prob(S logit, bool bit) {
  return bit ? -detail::softplus(-logit) : -detail::softplus(logit);
}

template <typename S>
S action_log_prob(const PolicyOutput<S>& out, const Vec2S<S>& raw_move, bool shoot) {
  S lp = gaussian_log_prob(out.move_mean, out.move_logstd, raw_move);
  if (out.has_shoot) lp += bernoulli_log_prob(out.shoot_logit, shoot);
  return lp;
}

// KL(old || new) between diagonal Gaussians, summed over dimensions.
template <typename S>
S gaussian_kl(const Vec2S<S>& mean_old, const Vec2S<S>& logstd_old, const Vec2S<S>& mean_new,
              const Vec2S<S>& logstd_new) {
  S kl = S(0);
  for (int j = 0; j < 2; ++j) {
    S var_old = std::exp(S(2) * logstd_old[j]);
    S var_new = std::exp(S(2) * logstd_new[j]);
    S dm = mean_new[j] - mean_old[j];
    kl += logstd_new[j] - logstd_old[j] + (var_old + dm * dm) / (S(2) * var_new) - S(0.5);
  }
  return kl;
}

template <typename S>
S bernoulli_kl(S logit_old, S logit_new) {
  S p = detail::sigmoid(logit_old);
  // p*(log p - log p') + (1-p)*(log q - log q') in softplus form.
  return p * (detail::softplus(-logit_new) - detail::softplus(-logit_old)) +
         (S(1) - p) * (detail::softplus(logit_new) - detail::softplus(logit_old));
}

template <typename S>
S gaussian_entropy(const Vec2S<S>& logstd) {
  constexpr double kHalfLog2PiE = 1.4189385332046727418;
  return logstd.sum() + S(2) * S(kHalfLog2PiE);
}

template <typename S>
S bernoulli_entropy(S logit) {
  S p = detail::sigmoid(logit);
  return p * detail::softplus(-logit) + (S(1) - p) * detail::softplus(logit);
}

template <typename S>
struct SampledAction {
  Vec2S<S> raw_move;  // pre-clamp sample; log_prob is evaluated here
  bool shoot = false;
  S log_prob = S(0);
  ActionCommand command;
};

template <typename S>
SampledAction<S> sample_action(const PolicyOutput<S>& out, Rng& rng) {
  SampledAction<S> s;
  for (int j = 0; j < 2; ++j) {
    S z = static_cast<S>(rng.normal());
    s.raw_move[j] = out.move_mean[j] + std::exp(out.move_logstd[j]) * z;
  }
  s.log_prob = gaussian_log_prob(out.move_mean, out.move_logstd, s.raw_move);
  if (out.has_shoot) {
    s.shoot = rng.uniform() < static_cast<double>(out.shoot_prob());
    s.log_prob += bernoulli_log_prob(out.shoot_logit, s.shoot);
  }
  s.command.lateral = std::clamp(static_cast<double>(s.raw_move[0]), -1.0, 1.0);
  s.command.forward = std::clamp(static_cast<double>(s.raw_move[1]), -1.0, 1.0);
  s.command.shoot = s.shoot;
  return s;
}

template <typename S>
ActionCommand deterministic_action(const PolicyOutput<S>& out) {
  ActionCommand cmd;
  cmd.lateral = std::clamp(static_cast<double>(out.move_mean[0]), -1.0, 1.0);
  cmd.forward = std::clamp(static_cast<double>(out.move_mean[1]), -1.0, 1.0);
  cmd.shoot = out.has_shoot && out.shoot_prob() > S(0.5);
  return cmd;
}

// ---------------------------------------------------------------------------
// Serialization (float32 little-endian payload)

namespace detail {

inline void write_bytes(std::ostream& os, const void* p, std::size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <typename T>
void write_pod(std::ostream& os, T v) {
  write_bytes(os, &v, sizeof v);
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw PolicyError("weight file truncated");
  return v;
}

}  // namespace detail

constexpr std::uint32_t kWeightFileVersion = 1;

template <typename S>
void save_params(const PolicyParams<S>& p, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw PolicyError("cannot open '" + path + "' for writing");
  os.write("SBRL", 4);
  detail::write_pod<std::uint32_t>(os, kWeightFileVersion);
  detail::write_pod<std::uint64_t>(os, p.spec.hash());
  std::string canon = p.spec.canonical();
  detail::write_pod<std::uint16_t>(os, static_cast<std::uint16_t>(canon.size()));
  detail::write_bytes(os, canon.data(), canon.size());
  detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(p.layout.entries.size()));
  for (const auto& e : p.layout.entries) {
    detail::write_pod<std::uint16_t>(os, static_cast<std::uint16_t>(e.name.size()));
    detail::write_bytes(os, e.name.data(), e.name.size());
    detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(e.rows));
    detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(e.cols));
    detail::write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(e.offset));
  }
  detail::write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(p.layout.total));
  for (int i = 0; i < p.layout.total; ++i) {
    detail::write_pod<float>(os, static_cast<float>(p.flat[i]));
  }
  if (!os) throw PolicyError("failed writing '" + path + "'");
}

template <typename S>
PolicyParams<S> load_params(const std::string& path, const NetworkSpec& expected) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PolicyError("cannot open weight file '" + path + "'");
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "SBRL", 4) != 0) {
    throw PolicyError("'" + path + "' is not a weight file (bad magic)");
  }
  auto version = detail::read_pod<std::uint32_t>(is);
  if (version != kWeightFileVersion) {
    throw PolicyError("unsupported weight file version " + std::to_string(version));
  }
  auto spec_hash = detail::read_pod<std::uint64_t>(is);
  auto canon_len = detail::read_pod<std::uint16_t>(is);
  std::string canon(canon_len, '\0');
  is.read(canon.data(), canon_len);
  if (!is) throw PolicyError("weight file truncated");
  if (spec_hash != expected.hash() || canon != expected.canonical()) {
    throw PolicyError("weight file spec mismatch: file has [" + canon + "], expected [" +
                      expected.canonical() + "]");
  }
  PolicyParams<S> p;
  p.spec = expected;
  p.layout = ParamLayout::from_spec(expected);
  auto n_entries = detail::read_pod<std::uint32_t>(is);
  if (n_entries != p.layout.entries.size()) throw PolicyError("weight file layout mismatch");
  for (const auto& e : p.layout.entries) {
    auto name_len = detail::read_pod<std::uint16_t>(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    auto rows = detail::read_pod<std::uint32_t>(is);
    auto cols = detail::read_pod<std::uint32_t>(is);
    auto offset = detail::read_pod<std::uint64_t>(is);
    if (!is || name != e.name || rows != static_cast<std::uint32_t>(e.rows) ||
        cols != static_cast<std::uint32_t>(e.cols) ||
        offset != static_cast<std::uint64_t>(e.offset)) {
      throw PolicyError("weight file layout mismatch at tensor '" + name + "'");
    }
  }
  auto total = detail::read_pod<std::uint64_t>(is);
  if (total != static_cast<std::uint64_t>(p.layout.total)) {
    throw PolicyError("weight file parameter count mismatch");
  }
  p.flat.resize(p.layout.total);
  for (int i = 0; i < p.layout.total; ++i) {
    p.flat[i] = static_cast<S>(detail::read_pod<float>(is));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Incremental inference over a rolling window. Per-step MLP encodings and
// their key/value projections depend only on that step's observation, so
// they are cached; each step costs one encoding plus one attention pass.

template <typename S>
class PolicyRuntime {
 public:
  explicit PolicyRuntime(const PolicyParams<S>* params) : params_(params) {}

  void reset() { window_.clear(); }

  int window_size() const { return static_cast<int>(window_.size()); }

  PolicyOutput<S> observe(const VecX<S>& obs) {
    const PolicyParams<S>& p = *params_;
    if (obs.size() != p.spec.input_width) throw PolicyError("observation width mismatch");
    Entry e;
    e.enc = obs;
    for (int l = 0; l < p.spec.mlp_depth; ++l) {
      e.enc = ((p.mat("mlp" + std::to_string(l) + ".W") * e.enc +
                p.vec("mlp" + std::to_string(l) + ".b"))
                   .array()
                   .tanh())
                  .matrix();
    }
    if (p.spec.use_attention) {
      e.key = p.mat("attn.k") * e.enc;
      e.val = p.mat("attn.v") * e.enc;
    }
    window_.push_back(std::move(e));
    while (static_cast<int>(window_.size()) > p.spec.max_seq) window_.pop_front();

    PolicyOutput<S> out;
    VecX<S> f;
    if (p.spec.use_attention) {
      VecX<S> q = p.mat("attn.q") * window_.back().enc;
      const S inv_sqrt_d = S(1) / std::sqrt(static_cast<S>(p.spec.attention_dim));
      const int n = static_cast<int>(window_.size());
      VecX<S> scores(n);
      for (int i = 0; i < n; ++i) {
        scores[i] = window_[static_cast<std::size_t>(i)].key.dot(q) * inv_sqrt_d;
      }
      S mx = scores.maxCoeff();
      VecX<S> ex = (scores.array() - mx).exp();
      ex /= ex.sum();
      f = VecX<S>::Zero(p.spec.attention_dim);
      for (int i = 0; i < n; ++i) f += ex[i] * window_[static_cast<std::size_t>(i)].val;
    } else {
      f = window_.back().enc;
    }
    out.move_mean = p.mat("move.W") * f + p.vec("move.b");
    auto raw_logstd = p.vec("move.logstd");
    out.move_logstd[0] = std::clamp(raw_logstd[0], S(kLogStdMin), S(kLogStdMax));
    out.move_logstd[1] = std::clamp(raw_logstd[1], S(kLogStdMin), S(kLogStdMax));
    out.has_shoot = p.spec.shoot_head;
    if (p.spec.shoot_head) {
      out.shoot_logit = (p.mat("shoot.W") * f)(0, 0) + p.vec("shoot.b")[0];
    }
    out.value = (p.mat("value.W") * f)(0, 0) + p.vec("value.b")[0];
    return out;
  }

 private:
  struct Entry {
    VecX<S> enc, key, val;
  };
  const PolicyParams<S>* params_;
  std::deque<Entry> window_;
};

}  // namespace skirmish
