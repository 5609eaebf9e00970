#pragma once

// Proximal policy optimization over the policy module's networks.
//
// One training iteration: collect a fixed-size batch from N parallel
// environments, compute GAE advantages, then run several epochs of shuffled
// minibatch updates of the clipped-surrogate loss
//
//   loss = -mean(min(ratio*A, clip(ratio, 1-eps, 1+eps)*A))
//          + vf_coeff * mean(min((V - R)^2, vf_clip))
//          + kl_coeff * mean(KL(old || new)) - entropy_coeff * mean(H)
//
// with an Adam step under a global gradient-norm clip. The KL coefficient
// doubles when the measured KL exceeds twice the target and halves when it
// falls below half the target.
//
// Minibatch forward passes recompute the "old" log-probabilities and
// distribution parameters once per update with the pre-update parameters and
// the same batched code path, so the first minibatch of the first epoch has
// ratio == 1 bit-for-bit.
//
// Attention-bearing policies train on stored observation windows: each
// record references the rows of its (episode-bounded) trailing window inside
// the per-environment observation stream, including rows carried over from
// the previous batch when an episode straddles the boundary.
//
// Environment duck-type contract:
//   Eigen::VectorXd reset(uint64_t seed);
//   EnvStepResult step(const ActionCommand&);   // {obs, reward, done}
//   int obs_width() const;
//   void save_state(std::ostream&) / load_state(std::istream&);

#include <deque>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <vector>

#include "skirmish/policy.hpp"
#include "skirmish/trace.hpp"

namespace skirmish {

class PpoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnvStepResult {
  Eigen::VectorXd obs;
  double reward = 0.0;
  bool done = false;
};

struct PpoConfig {
  double learning_rate = 3e-4;
  double gamma = 0.99;
  double gae_lambda = 1.0;
  double clip = 0.3;
  double vf_coeff = 1.0;
  double vf_clip = 10.0;
  double entropy_coeff = 0.0;
  double kl_coeff = 0.2;
  double kl_target = 0.01;
  int train_batch = 4000;
  int minibatch = 128;
  int epochs = 30;
  int max_episode_steps = 2000;
  long total_steps = 0;
  int num_envs = 8;
  int checkpoint_every = 50;  // train batches; 0 disables periodic checkpoints
  double grad_clip = 40.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
};

template <typename S>
struct AdamState {
  VecX<S> m, v;
  long t = 0;

  void init(Eigen::Index n) {
    m = VecX<S>::Zero(n);
    v = VecX<S>::Zero(n);
    t = 0;
  }

  void step(VecX<S>& params, const VecX<S>& grad, const PpoConfig& cfg) {
    const S b1 = static_cast<S>(cfg.adam_beta1);
    const S b2 = static_cast<S>(cfg.adam_beta2);
    ++t;
    m = b1 * m + (S(1) - b1) * grad;
    v = (b2 * v).array() + (S(1) - b2) * grad.array().square();
    S bc1 = S(1) - std::pow(b1, static_cast<S>(t));
    S bc2 = S(1) - std::pow(b2, static_cast<S>(t));
    S lr = static_cast<S>(cfg.learning_rate);
    params.array() -=
        lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + static_cast<S>(cfg.adam_eps));
  }
};

// ---------------------------------------------------------------------------
// Rollout storage

struct RolloutRecord {
  int env = 0;
  int row = 0;        // row of the acted-on observation in the env stream
  int win_start = 0;  // first row of its attention window
  Eigen::Vector2d raw_move = Eigen::Vector2d::Zero();
  bool shoot = false;
  double logp = 0.0;  // sampling-time log-prob (diagnostic)
  double reward = 0.0;
  double value = 0.0;
  bool done = false;
  long episode_id = 0;
};

template <typename S>
struct RolloutBatch {
  std::vector<MatX<S>> streams;  // per env: (carried prefix + steps) x width
  std::vector<RolloutRecord> records;  // env-major, time-ordered within env
  std::vector<double> bootstrap_value;  // per env, value of the next pending obs
  int num_envs = 0;
  int steps_per_env = 0;

  std::vector<double> advantages;  // filled by compute_gae
  std::vector<double> returns;

  std::vector<double> completed_returns;  // episodes finished during collection
  std::vector<long> completed_lengths;
};

// GAE: delta_t = r_t + gamma*V_{t+1}*(1-done_t) - V_t, accumulated backward
// with factor gamma*lambda*(1-done_t). Episodes truncated at the step cap
// carry done = true and do not bootstrap. Values stay raw here; the trainer
// normalizes advantages separately.
template <typename S>
void compute_gae(RolloutBatch<S>& batch, double gamma, double lambda) {
  const std::size_t n = batch.records.size();
  batch.advantages.assign(n, 0.0);
  batch.returns.assign(n, 0.0);
  for (int e = 0; e < batch.num_envs; ++e) {
    const std::size_t base = static_cast<std::size_t>(e) * batch.steps_per_env;
    double acc = 0.0;
    for (int t = batch.steps_per_env - 1; t >= 0; --t) {
      const RolloutRecord& rec = batch.records[base + t];
      double not_done = rec.done ? 0.0 : 1.0;
      double v_next = t == batch.steps_per_env - 1
                          ? batch.bootstrap_value[static_cast<std::size_t>(e)]
                          : batch.records[base + t + 1].value;
      double delta = rec.reward + gamma * v_next * not_done - rec.value;
      acc = delta + gamma * lambda * not_done * acc;
      batch.advantages[base + t] = acc;
      batch.returns[base + t] = acc + rec.value;
    }
  }
}

// Per-train-batch advantage normalization (mean 0, std 1, eps 1e-8).
template <typename S>
void normalize_advantages(RolloutBatch<S>& batch) {
  const std::size_t n = batch.advantages.size();
  if (n == 0) return;
  double mean = 0.0;
  for (double a : batch.advantages) mean += a;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double a : batch.advantages) var += (a - mean) * (a - mean);
  var /= static_cast<double>(n);
  double inv = 1.0 / (std::sqrt(var) + 1e-8);
  for (double& a : batch.advantages) a = (a - mean) * inv;
}

// ---------------------------------------------------------------------------
// Rollout collection

template <typename Env, typename S = float>
class RolloutCollector {
 public:
  RolloutCollector(std::vector<Env> envs, std::uint64_t seed, const NetworkSpec& spec)
      : envs_(std::move(envs)), spec_(spec), seed_(seed) {
    state_.resize(envs_.size());
    for (std::size_t e = 0; e < envs_.size(); ++e) {
      state_[e].action_rng = Rng(mix_seed(seed, 0x70000000ull + e));
    }
  }

  int num_envs() const { return static_cast<int>(envs_.size()); }
  Env& env(int i) { return envs_[static_cast<std::size_t>(i)]; }

  // Collects exactly n_steps transitions from every environment, stepping
  // them in fixed order under the given parameters.
  RolloutBatch<S> collect(const PolicyParams<S>& params, int n_steps) {
    RolloutBatch<S> batch;
    batch.num_envs = num_envs();
    batch.steps_per_env = n_steps;
    batch.streams.resize(envs_.size());
    batch.bootstrap_value.assign(envs_.size(), 0.0);
    batch.records.reserve(envs_.size() * static_cast<std::size_t>(n_steps));

    for (std::size_t e = 0; e < envs_.size(); ++e) {
      EnvState& st = state_[e];
      if (!st.initialized) reset_env(e);

      // Carried window becomes the stream prefix; the pending observation is
      // its last row. The policy runtime is rebuilt so cached encodings (and
      // the pending value) reflect the current parameters.
      PolicyRuntime<S> runtime(&params);
      PolicyOutput<S> pending_out;
      for (const auto& obs : st.window) pending_out = runtime.observe(obs);

      const int prefix = static_cast<int>(st.window.size());
      MatX<S>& stream = batch.streams[e];
      stream.resize(prefix + n_steps, spec_.input_width);
      for (int i = 0; i < prefix; ++i) {
        stream.row(i) = st.window[static_cast<std::size_t>(i)].transpose();
      }
      int next_row = prefix;     // where the next observation lands
      int pending_row = prefix - 1;
      for (int t = 0; t < n_steps; ++t) {
        RolloutRecord rec;
        rec.env = static_cast<int>(e);
        rec.row = pending_row;
        rec.win_start = pending_row - (static_cast<int>(st.window.size()) - 1);
        SampledAction<S> act = sample_action(pending_out, st.action_rng);
        rec.raw_move = {static_cast<double>(act.raw_move[0]),
                        static_cast<double>(act.raw_move[1])};
        rec.shoot = act.shoot;
        rec.logp = static_cast<double>(act.log_prob);
        rec.value = static_cast<double>(pending_out.value);
        rec.episode_id = st.episode_id;

        EnvStepResult out = envs_[e].step(act.command);
        st.episode_steps += 1;
        st.episode_return += out.reward;
        rec.reward = out.reward;
        rec.done = out.done;

        if (out.done) {
          batch.completed_returns.push_back(st.episode_return);
          batch.completed_lengths.push_back(st.episode_steps);
          reset_env(e);
          runtime.reset();
          pending_out = runtime.observe(st.window.back());
        } else {
          push_window(st, out.obs.cast<S>());
          pending_out = runtime.observe(st.window.back());
        }
        stream.row(next_row) = st.window.back().transpose();
        pending_row = next_row;
        ++next_row;
        batch.records.push_back(rec);
      }
      batch.bootstrap_value[e] = static_cast<double>(pending_out.value);
      // Rebase the carried window rows for the next batch.
      (void)pending_row;
    }
    return batch;
  }

  void save_state(std::ostream& os) const {
    os << "collector " << envs_.size() << ' ' << seed_ << '\n';
    for (std::size_t e = 0; e < envs_.size(); ++e) {
      const EnvState& st = state_[e];
      os << "envstate " << (st.initialized ? 1 : 0) << ' ' << st.episode_id << ' '
         << st.episode_steps << ' ';
      os.precision(17);
      os << st.episode_return << ' ' << st.action_rng << '\n';
      os << "window " << st.window.size() << ' ' << spec_.input_width << '\n';
      for (const auto& obs : st.window) {
        for (Eigen::Index i = 0; i < obs.size(); ++i) {
          if (i) os << ' ';
          os << float_bits(static_cast<float>(obs[i]));
        }
        os << '\n';
      }
      envs_[e].save_state(os);
    }
  }

  void load_state(std::istream& is) {
    std::string tag;
    std::size_t n_envs = 0;
    is >> tag >> n_envs >> seed_;
    if (tag != "collector" || n_envs != envs_.size()) {
      throw PpoError("collector state mismatch");
    }
    for (std::size_t e = 0; e < envs_.size(); ++e) {
      EnvState& st = state_[e];
      int init = 0;
      is >> tag >> init >> st.episode_id >> st.episode_steps >> st.episode_return >>
          st.action_rng;
      if (tag != "envstate") throw PpoError("bad collector state");
      st.initialized = init != 0;
      std::size_t win_size = 0;
      int width = 0;
      is >> tag >> win_size >> width;
      if (tag != "window" || width != spec_.input_width) throw PpoError("bad window state");
      st.window.clear();
      for (std::size_t i = 0; i < win_size; ++i) {
        VecX<S> obs(width);
        for (int j = 0; j < width; ++j) {
          std::string bits;
          is >> bits;
          obs[j] = static_cast<S>(bits_float(bits));
        }
        st.window.push_back(std::move(obs));
      }
      envs_[e].load_state(is);
    }
  }

 private:
  struct EnvState {
    bool initialized = false;
    std::deque<VecX<S>> window;  // last <= max_seq observations, newest last
    long episode_id = -1;
    long episode_steps = 0;
    double episode_return = 0.0;
    Rng action_rng;
  };

  static std::string float_bits(float v) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", std::bit_cast<std::uint32_t>(v));
    return buf;
  }
  static float bits_float(const std::string& s) {
    return std::bit_cast<float>(static_cast<std::uint32_t>(std::stoul(s, nullptr, 16)));
  }

  void reset_env(std::size_t e) {
    EnvState& st = state_[e];
    st.episode_id += 1;
    std::uint64_t ep_seed = mix_seed(seed_, e * 0x10000000ull + static_cast<std::uint64_t>(st.episode_id));
    Eigen::VectorXd obs = envs_[e].reset(ep_seed);
    if (obs.size() != spec_.input_width) {
      throw PpoError("environment observation width does not match the network spec");
    }
    st.window.clear();
    st.window.push_back(obs.cast<S>());
    st.episode_steps = 0;
    st.episode_return = 0.0;
    st.initialized = true;
  }

  void push_window(EnvState& st, VecX<S> obs) {
    st.window.push_back(std::move(obs));
    while (static_cast<int>(st.window.size()) > spec_.max_seq) st.window.pop_front();
  }

  std::vector<Env> envs_;
  NetworkSpec spec_;
  std::uint64_t seed_;
  std::vector<EnvState> state_;
};

// ---------------------------------------------------------------------------
// Update

struct MinibatchStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double kl = 0.0;
  double clip_fraction = 0.0;
};

struct UpdateStats {
  double policy_loss = 0.0;  // means over minibatches
  double value_loss = 0.0;
  double kl = 0.0;
  double clip_fraction = 0.0;
  double first_minibatch_clip_fraction = 0.0;
  double grad_norm_mean = 0.0;
  double kl_coeff_used = 0.0;
  std::vector<MinibatchStats> minibatches;
};

namespace detail {

template <typename S>
WindowBatch<S> gather_windows(const RolloutBatch<S>& batch, const std::vector<int>& indices) {
  WindowBatch<S> wb;
  int rows = 0;
  for (int idx : indices) {
    const RolloutRecord& r = batch.records[static_cast<std::size_t>(idx)];
    rows += r.row - r.win_start + 1;
  }
  wb.X.resize(rows, batch.streams[0].cols());
  wb.offset.reserve(indices.size());
  wb.length.reserve(indices.size());
  int at = 0;
  for (int idx : indices) {
    const RolloutRecord& r = batch.records[static_cast<std::size_t>(idx)];
    int len = r.row - r.win_start + 1;
    wb.X.middleRows(at, len) =
        batch.streams[static_cast<std::size_t>(r.env)].middleRows(r.win_start, len);
    wb.offset.push_back(at);
    wb.length.push_back(len);
    at += len;
  }
  return wb;
}

}  // namespace detail

// One PPO update over a collected batch. `kl_coeff` is read for the loss and
// adapted in place afterwards. Advantages must be computed (and normalized)
// beforehand. Throws PpoError on non-finite losses.
template <typename S>
UpdateStats ppo_update(PolicyParams<S>& params, AdamState<S>& adam, const RolloutBatch<S>& batch,
                       const PpoConfig& cfg, double& kl_coeff, Rng& rng) {
  const int m = static_cast<int>(batch.records.size());
  if (m == 0) throw PpoError("empty rollout batch");
  if (batch.advantages.size() != static_cast<std::size_t>(m)) {
    throw PpoError("advantages not computed");
  }
  UpdateStats stats;
  stats.kl_coeff_used = kl_coeff;

  // Reference pass: old log-probs and distribution parameters under the
  // pre-update parameters, via the same batched path the epochs use.
  std::vector<double> old_logp(static_cast<std::size_t>(m));
  MatX<S> old_mean(m, 2);
  VecX<S> old_logit(m);
  Vec2S<S> old_logstd;
  {
    std::vector<int> all(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) all[static_cast<std::size_t>(i)] = i;
    for (int start = 0; start < m; start += cfg.minibatch) {
      int count = std::min(cfg.minibatch, m - start);
      std::vector<int> chunk(all.begin() + start, all.begin() + start + count);
      WindowBatch<S> wb = detail::gather_windows(batch, chunk);
      BatchCache<S> cache;
      batch_forward(params, wb, cache);
      for (int i = 0; i < count; ++i) {
        int idx = chunk[static_cast<std::size_t>(i)];
        const RolloutRecord& rec = batch.records[static_cast<std::size_t>(idx)];
        PolicyOutput<S> out = output_of(params, cache, i);
        Vec2S<S> raw{static_cast<S>(rec.raw_move[0]), static_cast<S>(rec.raw_move[1])};
        old_logp[static_cast<std::size_t>(idx)] =
            static_cast<double>(action_log_prob(out, raw, rec.shoot));
        old_mean.row(idx) = out.move_mean.transpose();
        old_logit[idx] = out.shoot_logit;
        old_logstd = out.move_logstd;
      }
    }
  }

  std::vector<int> order(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;

  VecX<S> grad(params.flat.size());
  const S clip = static_cast<S>(cfg.clip);
  double grad_norm_sum = 0.0;
  long grad_steps = 0;
  int epoch_first_mb = 1;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    std::vector<MinibatchStats> epoch_stats;
    for (int start = 0; start < m; start += cfg.minibatch) {
      int count = std::min(cfg.minibatch, m - start);
      std::vector<int> chunk(order.begin() + start, order.begin() + start + count);
      WindowBatch<S> wb = detail::gather_windows(batch, chunk);
      BatchCache<S> cache;
      batch_forward(params, wb, cache);

      MatX<S> d_mean = MatX<S>::Zero(count, 2);
      VecX<S> d_shoot = VecX<S>::Zero(count);
      VecX<S> d_value = VecX<S>::Zero(count);
      Vec2S<S> d_logstd = Vec2S<S>::Zero();
      MinibatchStats mb;
      const S inv_count = S(1) / static_cast<S>(count);
      const S kl_c = static_cast<S>(kl_coeff);
      const S ent_c = static_cast<S>(cfg.entropy_coeff);

      for (int i = 0; i < count; ++i) {
        int idx = chunk[static_cast<std::size_t>(i)];
        const RolloutRecord& rec = batch.records[static_cast<std::size_t>(idx)];
        PolicyOutput<S> out = output_of(params, cache, i);
        Vec2S<S> raw{static_cast<S>(rec.raw_move[0]), static_cast<S>(rec.raw_move[1])};
        S logp = action_log_prob(out, raw, rec.shoot);
        S ratio = std::exp(logp - static_cast<S>(old_logp[static_cast<std::size_t>(idx)]));
        S adv = static_cast<S>(batch.advantages[static_cast<std::size_t>(idx)]);
        S surr1 = ratio * adv;
        S clipped_ratio = std::clamp(ratio, S(1) - clip, S(1) + clip);
        S surr2 = clipped_ratio * adv;
        bool use_unclipped = surr1 <= surr2;
        mb.policy_loss += static_cast<double>(-std::min(surr1, surr2));
        if (std::abs(ratio - S(1)) > clip) mb.clip_fraction += 1.0;
        S dlogp = use_unclipped ? -adv * ratio : S(0);

        // Movement Gaussian.
        Vec2S<S> dmean_i = Vec2S<S>::Zero();
        Vec2S<S> dlogstd_i = Vec2S<S>::Zero();
        for (int j = 0; j < 2; ++j) {
          S sigma = std::exp(out.move_logstd[j]);
          S z = (raw[j] - out.move_mean[j]) / sigma;
          dmean_i[j] += dlogp * (z / sigma);  // dlogp/dmean = z/sigma
          dlogstd_i[j] += dlogp * (z * z - S(1));
        }
        // KL(old||new), movement part.
        S kl = gaussian_kl(Vec2S<S>(old_mean.row(idx).transpose()), old_logstd, out.move_mean,
                           out.move_logstd);
        for (int j = 0; j < 2; ++j) {
          S var_new = std::exp(S(2) * out.move_logstd[j]);
          S var_old = std::exp(S(2) * old_logstd[j]);
          S dm = out.move_mean[j] - old_mean(idx, j);
          dmean_i[j] += kl_c * dm / var_new;
          dlogstd_i[j] += kl_c * (S(1) - (var_old + dm * dm) / var_new);
        }
        // Entropy bonus (zero coefficient under the mirrored defaults).
        S ent = gaussian_entropy(out.move_logstd);
        dlogstd_i.array() += -ent_c;

        S dlogit_i = S(0);
        if (params.spec.shoot_head) {
          S p_new = out.shoot_prob();
          S p_old = detail::sigmoid(old_logit[idx]);
          dlogit_i += dlogp * ((rec.shoot ? S(1) : S(0)) - p_new);
          kl += bernoulli_kl(old_logit[idx], out.shoot_logit);
          dlogit_i += kl_c * (p_new - p_old);
          ent += bernoulli_entropy(out.shoot_logit);
          dlogit_i += ent_c * out.shoot_logit * p_new * (S(1) - p_new);
        }
        mb.kl += static_cast<double>(kl);

        // Clamped value error.
        S verr = out.value - static_cast<S>(batch.returns[static_cast<std::size_t>(idx)]);
        S sq = verr * verr;
        mb.value_loss += static_cast<double>(std::min(sq, static_cast<S>(cfg.vf_clip)));
        S dv = sq < static_cast<S>(cfg.vf_clip) ? static_cast<S>(cfg.vf_coeff) * S(2) * verr
                                                : S(0);

        d_mean.row(i) = (dmean_i * inv_count).transpose();
        d_logstd += dlogstd_i * inv_count;
        d_shoot[i] = dlogit_i * inv_count;
        d_value[i] = dv * inv_count;
      }
      mb.policy_loss /= count;
      mb.value_loss /= count;
      mb.kl /= count;
      mb.clip_fraction /= count;
      if (!std::isfinite(mb.policy_loss) || !std::isfinite(mb.value_loss) ||
          !std::isfinite(mb.kl)) {
        std::ostringstream diag;
        diag << "non-finite loss in epoch " << epoch << ": policy " << mb.policy_loss
             << " value " << mb.value_loss << " kl " << mb.kl;
        throw PpoError(diag.str());
      }
      epoch_stats.push_back(mb);
      if (epoch_first_mb) {
        stats.first_minibatch_clip_fraction = mb.clip_fraction;
        epoch_first_mb = 0;
      }

      grad.setZero();
      batch_backward(params, wb, cache, d_mean, d_shoot, d_value, d_logstd, grad);
      S norm = grad.norm();
      grad_norm_sum += static_cast<double>(norm);
      ++grad_steps;
      if (static_cast<double>(norm) > cfg.grad_clip && norm > S(0)) {
        grad *= static_cast<S>(cfg.grad_clip) / norm;
      }
      adam.step(params.flat, grad, cfg);
    }
    for (const auto& mbs : epoch_stats) stats.minibatches.push_back(mbs);
    if (epoch == cfg.epochs - 1) {
      double kl_mean = 0.0;
      for (const auto& mbs : epoch_stats) kl_mean += mbs.kl;
      kl_mean /= static_cast<double>(epoch_stats.size());
      if (kl_mean > 2.0 * cfg.kl_target) {
        kl_coeff *= 2.0;
      } else if (kl_mean < 0.5 * cfg.kl_target) {
        kl_coeff *= 0.5;
      }
    }
  }

  for (const auto& mbs : stats.minibatches) {
    stats.policy_loss += mbs.policy_loss;
    stats.value_loss += mbs.value_loss;
    stats.kl += mbs.kl;
    stats.clip_fraction += mbs.clip_fraction;
  }
  double nm = static_cast<double>(stats.minibatches.size());
  stats.policy_loss /= nm;
  stats.value_loss /= nm;
  stats.kl /= nm;
  stats.clip_fraction /= nm;
  stats.grad_norm_mean = grad_norm_sum / static_cast<double>(grad_steps);
  return stats;
}

// ---------------------------------------------------------------------------
// Training loop

// Collect / GAE / update driver with periodic full-state checkpoints and a
// line-delimited metrics stream. Episode statistics follow the usual
// convention: means over the most recent (up to) 100 completed episodes.
template <typename Env, typename S = float>
class Trainer {
 public:
  Trainer(std::vector<Env> envs, const NetworkSpec& spec, const PpoConfig& cfg,
          std::uint64_t seed)
      : cfg_(cfg),
        spec_(spec),
        params_(init_params<S>(spec, mix_seed(seed, 0x5eed0001ull))),
        collector_(std::move(envs), seed, spec),
        update_rng_(mix_seed(seed, 0x5eed0002ull)) {
    if (collector_.num_envs() != cfg.num_envs) {
      throw PpoError("env count does not match config num_envs");
    }
    if (cfg.train_batch % cfg.num_envs != 0) {
      throw PpoError("train_batch must be divisible by num_envs");
    }
    adam_.init(params_.flat.size());
    kl_coeff_ = cfg.kl_coeff;
  }

  struct BatchResult {
    int batch_index = 0;
    long global_steps = 0;
    double episode_reward_mean = 0.0;
    double episode_len_mean = 0.0;
    long episodes_completed = 0;
    UpdateStats update;
  };

  BatchResult run_batch() {
    RolloutBatch<S> batch = collector_.collect(params_, cfg_.train_batch / cfg_.num_envs);
    compute_gae(batch, cfg_.gamma, cfg_.gae_lambda);
    normalize_advantages(batch);
    UpdateStats st = ppo_update(params_, adam_, batch, cfg_, kl_coeff_, update_rng_);

    for (std::size_t i = 0; i < batch.completed_returns.size(); ++i) {
      recent_returns_.push_back(batch.completed_returns[i]);
      recent_lengths_.push_back(static_cast<double>(batch.completed_lengths[i]));
      episodes_completed_ += 1;
      while (recent_returns_.size() > 100) {
        recent_returns_.pop_front();
        recent_lengths_.pop_front();
      }
    }
    batch_index_ += 1;
    global_steps_ += cfg_.train_batch;

    BatchResult r;
    r.batch_index = batch_index_;
    r.global_steps = global_steps_;
    r.episodes_completed = episodes_completed_;
    r.episode_reward_mean = mean_of(recent_returns_);
    r.episode_len_mean = mean_of(recent_lengths_);
    r.update = std::move(st);
    return r;
  }

  bool done() const { return global_steps_ >= cfg_.total_steps; }
  int batch_index() const { return batch_index_; }
  long global_steps() const { return global_steps_; }
  double kl_coeff() const { return kl_coeff_; }
  const PolicyParams<S>& params() const { return params_; }
  const PpoConfig& config() const { return cfg_; }
  RolloutCollector<Env, S>& collector() { return collector_; }

  // Curriculum phases carry parameters across phase boundaries.
  void set_params(PolicyParams<S> p) {
    if (!(p.spec == spec_)) throw PpoError("parameter spec mismatch");
    params_ = std::move(p);
  }

  static std::string metrics_header() {
    return "batch,global_steps,episodes,episode_reward_mean,episode_len_mean,"
           "policy_loss,value_loss,kl,clip_fraction,kl_coeff\n";
  }

  std::string metrics_line(const BatchResult& r) const {
    std::ostringstream os;
    os.precision(10);
    os << r.batch_index << ',' << r.global_steps << ',' << r.episodes_completed << ','
       << r.episode_reward_mean << ',' << r.episode_len_mean << ',' << r.update.policy_loss
       << ',' << r.update.value_loss << ',' << r.update.kl << ',' << r.update.clip_fraction
       << ',' << kl_coeff_ << '\n';
    return os.str();
  }

  // Full training state minus the parameters (those go in a weight file).
  void save_state(std::ostream& os) const {
    os << "skirmish-ckpt v1\n";
    os << "batch " << batch_index_ << " steps " << global_steps_ << " episodes "
       << episodes_completed_ << '\n';
    os << "kl_coeff " << double_bits(kl_coeff_) << '\n';
    os << "adam " << adam_.t << ' ' << adam_.m.size() << '\n';
    write_scalar_row(os, adam_.m);
    write_scalar_row(os, adam_.v);
    os << "update_rng " << update_rng_ << '\n';
    os << "recent " << recent_returns_.size() << '\n';
    for (std::size_t i = 0; i < recent_returns_.size(); ++i) {
      os << double_bits(recent_returns_[i]) << ' ' << double_bits(recent_lengths_[i]) << '\n';
    }
    collector_.save_state(os);
  }

  void load_state(std::istream& is) {
    std::string tag, version;
    is >> tag >> version;
    if (tag != "skirmish-ckpt" || version != "v1") throw PpoError("bad checkpoint header");
    is >> tag >> batch_index_;
    is >> tag >> global_steps_;
    is >> tag >> episodes_completed_;
    std::string bits;
    is >> tag >> bits;
    kl_coeff_ = bits_double(bits);
    Eigen::Index n = 0;
    is >> tag >> adam_.t >> n;
    if (tag != "adam" || n != params_.flat.size()) throw PpoError("checkpoint layout mismatch");
    adam_.m.resize(n);
    adam_.v.resize(n);
    read_scalar_row(is, adam_.m);
    read_scalar_row(is, adam_.v);
    is >> tag >> update_rng_;
    std::size_t n_recent = 0;
    is >> tag >> n_recent;
    recent_returns_.clear();
    recent_lengths_.clear();
    for (std::size_t i = 0; i < n_recent; ++i) {
      std::string a, b;
      is >> a >> b;
      recent_returns_.push_back(bits_double(a));
      recent_lengths_.push_back(bits_double(b));
    }
    collector_.load_state(is);
  }

 private:
  static double mean_of(const std::deque<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  }

  static void write_scalar_row(std::ostream& os, const VecX<S>& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (i) os << ' ';
      os << double_bits(static_cast<double>(v[i]));
    }
    os << '\n';
  }
  static void read_scalar_row(std::istream& is, VecX<S>& v) {
    std::string bits;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      is >> bits;
      v[i] = static_cast<S>(bits_double(bits));
    }
  }

  PpoConfig cfg_;
  NetworkSpec spec_;
  PolicyParams<S> params_;
  AdamState<S> adam_;
  double kl_coeff_ = 0.2;
  RolloutCollector<Env, S> collector_;
  Rng update_rng_;
  int batch_index_ = 0;
  long global_steps_ = 0;
  long episodes_completed_ = 0;
  std::deque<double> recent_returns_;
  std::deque<double> recent_lengths_;
};

// Loss-only evaluation of the same objective for one index set, used by the
// finite-difference oracle tests. Must stay in lockstep with ppo_update.
template <typename S>
S ppo_loss(const PolicyParams<S>& params, const RolloutBatch<S>& batch,
           const std::vector<int>& indices, const PpoConfig& cfg, double kl_coeff,
           const std::vector<double>& old_logp, const MatX<S>& old_mean,
           const VecX<S>& old_logit, const Vec2S<S>& old_logstd) {
  WindowBatch<S> wb = detail::gather_windows(batch, indices);
  BatchCache<S> cache;
  batch_forward(params, wb, cache);
  S total = S(0);
  const S clip = static_cast<S>(cfg.clip);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    int idx = indices[i];
    const RolloutRecord& rec = batch.records[static_cast<std::size_t>(idx)];
    PolicyOutput<S> out = output_of(params, cache, static_cast<int>(i));
    Vec2S<S> raw{static_cast<S>(rec.raw_move[0]), static_cast<S>(rec.raw_move[1])};
    S logp = action_log_prob(out, raw, rec.shoot);
    S ratio = std::exp(logp - static_cast<S>(old_logp[static_cast<std::size_t>(idx)]));
    S adv = static_cast<S>(batch.advantages[static_cast<std::size_t>(idx)]);
    S surr = std::min(ratio * adv, std::clamp(ratio, S(1) - clip, S(1) + clip) * adv);
    total += -surr;
    S kl = gaussian_kl(Vec2S<S>(old_mean.row(idx).transpose()), old_logstd, out.move_mean,
                       out.move_logstd);
    S ent = gaussian_entropy(out.move_logstd);
    if (params.spec.shoot_head) {
      kl += bernoulli_kl(old_logit[idx], out.shoot_logit);
      ent += bernoulli_entropy(out.shoot_logit);
    }
    total += static_cast<S>(kl_coeff) * kl - static_cast<S>(cfg.entropy_coeff) * ent;
    S verr = out.value - static_cast<S>(batch.returns[static_cast<std::size_t>(idx)]);
    total += static_cast<S>(cfg.vf_coeff) * std::min(verr * verr, static_cast<S>(cfg.vf_clip));
  }
  return total / static_cast<S>(indices.size());
}

}  // namespace skirmish
