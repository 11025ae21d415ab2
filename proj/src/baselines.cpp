#include "minisocial/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "minisocial/config_json.hpp"

namespace minisocial {

std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::OnlyLocal: return "only_local";
    case PolicyKind::Scripted: return "scripted";
    case PolicyKind::Learned: return "learned";
    case PolicyKind::External: return "external";
  }
  return "";
}

Action only_local(const ObservationFrame&) { return Action::Go; }

RewarderConfig cadrl_reward_config() {
  RewarderConfig cfg;
  cfg.terms = {
      {RewardKind::Success, 100.0},
      {RewardKind::Existence, -1.0},
      {RewardKind::Collision, -10.0},
      {RewardKind::Proximity, -0.1},
  };
  cfg.terms.back().threshold = 0.2;
  return cfg;
}

void apply_run_type(const std::string& run_type, EnvConfig& cfg) {
  std::string t = run_type;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  RewardTermConfig sub{RewardKind::SubGoal, kSubGoalReward};
  if (t == "ao" || t == "any_order") {
    cfg.rewarder = default_rewarder_config();
    cfg.rewarder.terms.push_back(sub);
    cfg.order_mode = OrderMode::AnyOrder;
  } else if (t == "eo" || t == "enforced_order") {
    cfg.rewarder = default_rewarder_config();
    cfg.rewarder.terms.push_back(sub);
    cfg.order_mode = OrderMode::EnforcedOrder;
  } else if (t == "cadrl") {
    cfg.rewarder = cadrl_reward_config();
    cfg.order_mode = OrderMode::None;
  } else if (t == "ol" || t == "only_local" || t == "default") {
    cfg.rewarder = default_rewarder_config();
    cfg.order_mode = OrderMode::None;
  } else {
    throw ConfigError("run_type: unknown value '" + run_type + "'");
  }
}

// ---------------------------------------------------------------------------
// Mlp

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] <= 0 || sizes_[l + 1] <= 0) throw std::invalid_argument("Mlp: layer sizes must be positive");
    n += static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
  }
  params_.assign(n, 0.0);
}

void Mlp::init(CounterRng& rng, double out_gain) {
  std::size_t off = 0;
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double gain = l + 1 == layers ? out_gain : std::sqrt(2.0);
    const double sd = gain / std::sqrt(static_cast<double>(in));
    for (int i = 0; i < in * out; ++i) params_[off++] = sd * rng.normal();
    for (int i = 0; i < out; ++i) params_[off++] = 0.0;
  }
}

std::vector<double> Mlp::forward(std::span<const double> x, Cache* cache) const {
  if (static_cast<int>(x.size()) != sizes_.front()) throw std::invalid_argument("Mlp: input size mismatch");
  std::vector<double> a(x.begin(), x.end());
  if (cache) {
    cache->clear();
    cache->push_back(a);
  }
  std::size_t off = 0;
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double* w = params_.data() + off;
    const double* b = w + static_cast<std::size_t>(in) * out;
    std::vector<double> z(out);
    for (int o = 0; o < out; ++o) {
      double s = b[o];
      const double* row = w + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) s += row[i] * a[i];
      z[o] = l + 1 == layers ? s : std::tanh(s);
    }
    off += static_cast<std::size_t>(in) * out + out;
    a = std::move(z);
    if (cache) cache->push_back(a);
  }
  return a;
}

void Mlp::backward(const Cache& cache, std::span<const double> grad_out, std::span<double> grad) const {
  const std::size_t layers = sizes_.size() - 1;
  // layer offsets
  std::vector<std::size_t> offs(layers);
  std::size_t off = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    offs[l] = off;
    off += static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
  }
  std::vector<double> delta(grad_out.begin(), grad_out.end());
  for (std::size_t l = layers; l-- > 0;) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const auto& a = cache[l];
    const double* w = params_.data() + offs[l];
    double* gw = grad.data() + offs[l];
    double* gb = gw + static_cast<std::size_t>(in) * out;
    for (int o = 0; o < out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      double* row = gw + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) row[i] += d * a[i];
      gb[o] += d;
    }
    if (l == 0) break;
    std::vector<double> prev(in, 0.0);
    for (int o = 0; o < out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* row = w + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) prev[i] += row[i] * d;
    }
    for (int i = 0; i < in; ++i) prev[i] *= 1.0 - a[i] * a[i];
    delta = std::move(prev);
  }
}

// ---------------------------------------------------------------------------
// Losses

void LearnerConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string("learner.") + name + ": must be positive");
  };
  positive(learning_rate, "learning_rate");
  positive(gamma, "gamma");
  positive(gae_lambda, "gae_lambda");
  positive(clip, "clip");
  positive(max_grad_norm, "max_grad_norm");
  positive(batch_episodes, "batch_episodes");
  positive(epochs, "epochs");
  positive(minibatch, "minibatch");
  if (gamma > 1.0 || gae_lambda > 1.0) throw ConfigError("learner: gamma and gae_lambda must be <= 1");
  if (entropy_coef < 0.0 || value_coef < 0.0) throw ConfigError("learner: coefficients must be >= 0");
  if (hidden.empty()) throw ConfigError("learner.hidden: need at least one layer");
  for (int h : hidden) positive(h, "hidden");
  if (checkpoint_every < 0) throw ConfigError("learner.checkpoint_every: must be >= 0");
  if (divergence_patience < 0) throw ConfigError("learner.divergence_patience: must be >= 0");
  positive(divergence_factor, "divergence_factor");
}

json to_json(const LearnerConfig& c) {
  return json{{"learning_rate", c.learning_rate},
              {"gamma", c.gamma},
              {"gae_lambda", c.gae_lambda},
              {"clip", c.clip},
              {"entropy_coef", c.entropy_coef},
              {"value_coef", c.value_coef},
              {"max_grad_norm", c.max_grad_norm},
              {"batch_episodes", c.batch_episodes},
              {"epochs", c.epochs},
              {"minibatch", c.minibatch},
              {"hidden", c.hidden},
              {"go_bias", c.go_bias},
              {"checkpoint_every", c.checkpoint_every},
              {"divergence_factor", c.divergence_factor},
              {"divergence_patience", c.divergence_patience}};
}

LearnerConfig learner_config_from_json(const json& j) {
  LearnerConfig c;
  ObjectReader r(j, "learner");
  r.read("learning_rate", c.learning_rate);
  r.read("gamma", c.gamma);
  r.read("gae_lambda", c.gae_lambda);
  r.read("clip", c.clip);
  r.read("entropy_coef", c.entropy_coef);
  r.read("value_coef", c.value_coef);
  r.read("max_grad_norm", c.max_grad_norm);
  r.read("batch_episodes", c.batch_episodes);
  r.read("epochs", c.epochs);
  r.read("minibatch", c.minibatch);
  r.read("hidden", c.hidden);
  r.read("go_bias", c.go_bias);
  r.read("checkpoint_every", c.checkpoint_every);
  r.read("divergence_factor", c.divergence_factor);
  r.read("divergence_patience", c.divergence_patience);
  r.finish();
  c.validate();
  return c;
}

namespace {

std::array<double, 2> log_softmax2(const std::vector<double>& z) {
  const double m = std::max(z[0], z[1]);
  const double lse = m + std::log(std::exp(z[0] - m) + std::exp(z[1] - m));
  return {z[0] - lse, z[1] - lse};
}

std::vector<double> normalized_advantages(std::span<const Sample> batch) {
  std::vector<double> adv(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) adv[i] = batch[i].advantage;
  if (adv.size() < 2) return adv;
  const double n = static_cast<double>(adv.size());
  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  // sample std, as torch.std
  const double sd = std::sqrt(var / (n - 1.0));
  for (double& a : adv) a = (a - mean) / (sd + 1e-8);
  return adv;
}

}  // namespace

double policy_loss(const Mlp& pi, std::span<const Sample> batch, const LearnerConfig& cfg,
                   std::vector<double>* grad) {
  if (batch.empty()) return 0.0;
  const auto adv = normalized_advantages(batch);
  const double n = static_cast<double>(batch.size());
  double loss = 0.0;
  Mlp::Cache cache;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Sample& s = batch[i];
    const auto z = pi.forward(s.obs, grad ? &cache : nullptr);
    const auto lp = log_softmax2(z);
    const double p[2] = {std::exp(lp[0]), std::exp(lp[1])};
    const double ratio = std::exp(lp[s.action] - s.logp);
    const double surr1 = ratio * adv[i];
    const double surr2 = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip) * adv[i];
    const double entropy = -(p[0] * lp[0] + p[1] * lp[1]);
    loss += (-std::min(surr1, surr2) - cfg.entropy_coef * entropy) / n;
    if (grad) {
      const double dlogp = surr1 <= surr2 ? -adv[i] * ratio : 0.0;
      double dz[2];
      for (int j = 0; j < 2; ++j) {
        dz[j] = dlogp * ((j == s.action ? 1.0 : 0.0) - p[j]);
        dz[j] += cfg.entropy_coef * p[j] * (lp[j] + entropy);
        dz[j] /= n;
      }
      pi.backward(cache, dz, *grad);
    }
  }
  return loss;
}

double value_loss(const Mlp& vf, std::span<const Sample> batch, const LearnerConfig& cfg, std::vector<double>* grad) {
  if (batch.empty()) return 0.0;
  const double n = static_cast<double>(batch.size());
  double loss = 0.0;
  Mlp::Cache cache;
  for (const auto& s : batch) {
    const double v = vf.forward(s.obs, grad ? &cache : nullptr)[0];
    const double e = v - s.ret;
    loss += cfg.value_coef * e * e / n;
    if (grad) {
      const double dv = cfg.value_coef * 2.0 * e / n;
      vf.backward(cache, std::span<const double>(&dv, 1), *grad);
    }
  }
  return loss;
}

GradCheckResult gradient_check(const Mlp& pi, std::span<const Sample> batch, const LearnerConfig& cfg, double eps,
                               double tolerance) {
  std::vector<double> analytic(pi.param_count(), 0.0);
  policy_loss(pi, batch, cfg, &analytic);
  Mlp probe = pi;
  GradCheckResult out;
  out.params = pi.param_count();
  for (std::size_t i = 0; i < pi.param_count(); ++i) {
    const double orig = probe.params()[i];
    probe.params()[i] = orig + eps;
    const double up = policy_loss(probe, batch, cfg, nullptr);
    probe.params()[i] = orig - eps;
    const double down = policy_loss(probe, batch, cfg, nullptr);
    probe.params()[i] = orig;
    const double numeric = (up - down) / (2.0 * eps);
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-7});
    const double rel = std::abs(analytic[i] - numeric) / scale;
    out.worst_relative_error = std::max(out.worst_relative_error, rel);
    if (rel <= tolerance) ++out.within_tolerance;
  }
  return out;
}

// ---------------------------------------------------------------------------
// ActorCritic

namespace {

std::vector<int> layer_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> s{in};
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(out);
  return s;
}

json stats_json(const RunningMeanVar& s) {
  return json{{"count", s.count()}, {"mean", s.mean()}, {"m2", s.m2()}};
}

void restore_stats(const json& j, RunningMeanVar& s) {
  s.restore(j.at("count").get<std::uint64_t>(), j.at("mean").get<std::vector<double>>(),
            j.at("m2").get<std::vector<double>>());
}

}  // namespace

ActorCritic::ActorCritic(int obs_dim, LearnerConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)), obs_dim_(obs_dim), pi_(layer_sizes(obs_dim, cfg_.hidden, 2)),
      vf_(layer_sizes(obs_dim, cfg_.hidden, 1)), norm_(static_cast<std::size_t>(obs_dim), Normalizer::Params{
                                                                                            10.0, 10.0, cfg_.gamma, 1e-8}) {
  cfg_.validate();
  CounterRng rng = CounterRng(seed).split("init");
  CounterRng pr = rng.split("pi");
  CounterRng vr = rng.split("vf");
  pi_.init(pr, 0.01);
  // output biases are the last two parameters
  pi_.params()[pi_.param_count() - 2] = cfg_.go_bias;
  vf_.init(vr, 1.0);
}

std::array<double, 2> ActorCritic::logits(std::span<const double> norm_obs) const {
  const auto z = pi_.forward(norm_obs);
  return {z[0], z[1]};
}

double ActorCritic::value(std::span<const double> norm_obs) const { return vf_.forward(norm_obs)[0]; }

Action ActorCritic::greedy(std::span<const double> norm_obs) const {
  const auto z = logits(norm_obs);
  return z[1] > z[0] ? Action::Stop : Action::Go;
}

std::string ActorCritic::checkpoint(const std::string& config_hash, std::int64_t steps) const {
  json j;
  j["format_version"] = 1;
  j["config_hash"] = config_hash;
  j["steps"] = steps;
  j["obs_dim"] = obs_dim_;
  j["learner"] = to_json(cfg_);
  j["pi"] = pi_.params();
  j["vf"] = vf_.params();
  j["normalizer"] = json{{"obs", stats_json(norm_.obs_stats())}, {"ret", stats_json(norm_.return_stats())}};
  return j.dump() + "\n";
}

ActorCritic ActorCritic::from_checkpoint(const std::string& text, std::string* config_hash) {
  try {
    const json j = json::parse(text);
    if (j.at("format_version").get<int>() != 1) throw std::runtime_error("unsupported checkpoint version");
    ActorCritic ac(j.at("obs_dim").get<int>(), learner_config_from_json(j.at("learner")), 0);
    auto pi = j.at("pi").get<std::vector<double>>();
    auto vf = j.at("vf").get<std::vector<double>>();
    if (pi.size() != ac.pi_.param_count() || vf.size() != ac.vf_.param_count()) {
      throw std::runtime_error("parameter count does not match the layer sizes");
    }
    ac.pi_.params() = std::move(pi);
    ac.vf_.params() = std::move(vf);
    restore_stats(j.at("normalizer").at("obs"), ac.norm_.obs_stats());
    restore_stats(j.at("normalizer").at("ret"), ac.norm_.return_stats());
    if (ac.norm_.obs_stats().dim() != static_cast<std::size_t>(ac.obs_dim_)) {
      throw std::runtime_error("normalizer width does not match obs_dim");
    }
    ac.norm_.set_training(false);
    if (config_hash) *config_hash = j.at("config_hash").get<std::string>();
    return ac;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw std::runtime_error(std::string("checkpoint: ") + e.what());
  }
}

void LearnedPolicy::begin_episode(std::int64_t episode) {
  rng_ = CounterRng(seed_).split("policy").split(static_cast<std::uint64_t>(episode));
}

Action LearnedPolicy::act(int, const ObservationFrame& obs, int) {
  const auto x = model_->normalizer().observation_frozen(obs.vector);
  if (selection_ == ActionSelection::Greedy) return model_->greedy(x);
  const auto z = model_->logits(x);
  const double p_stop = 1.0 / (1.0 + std::exp(z[0] - z[1]));
  return rng_.uniform() < p_stop ? Action::Stop : Action::Go;
}

// ---------------------------------------------------------------------------
// Training

namespace {

struct Adam {
  std::vector<double> m, v;
  std::int64_t t = 0;
  explicit Adam(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
  void step(std::vector<double>& p, const std::vector<double>& g, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-5;
    ++t;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  }
};

struct Transition {
  Sample sample;
  double reward = 0.0;
};

void finish_trajectory(std::vector<Transition>& traj, const LearnerConfig& cfg, std::vector<Sample>& out) {
  double next_value = 0.0;
  double gae = 0.0;
  for (std::size_t i = traj.size(); i-- > 0;) {
    auto& tr = traj[i];
    const double delta = tr.reward + cfg.gamma * next_value - tr.sample.value;
    gae = delta + cfg.gamma * cfg.gae_lambda * gae;
    tr.sample.advantage = gae;
    tr.sample.ret = gae + tr.sample.value;
    next_value = tr.sample.value;
  }
  for (auto& tr : traj) out.push_back(std::move(tr.sample));
  traj.clear();
}

}  // namespace

double only_local_return(const EnvConfig& env_cfg, int episodes) {
  Environment env(env_cfg);
  OnlyLocalPolicy policy;
  double total = 0.0;
  int count = 0;
  for (int e = 0; e < episodes; ++e) {
    const auto log = run_episode(env, policy, e);
    std::map<int, double> ret;
    for (const auto& a : log.init) ret[a.id] = 0.0;
    for (const auto& step : log.steps) {
      for (const auto& a : step.agents) ret[a.id] += a.reward;
    }
    for (const auto& [id, r] : ret) {
      total += r;
      ++count;
    }
  }
  return count ? total / count : 0.0;
}

TrainResult train(const EnvConfig& env_cfg, const LearnerConfig& cfg, const TrainOptions& opts) {
  cfg.validate();
  Environment env(env_cfg);
  env.set_policy_name("learned");
  auto model = std::make_shared<ActorCritic>(env.observation_size(), cfg, opts.seed);
  Normalizer& norm = model->normalizer();
  norm.set_training(true);
  const bool normalize_reward = env_cfg.rewarder.normalize;

  const CounterRng root = CounterRng(opts.seed).split("learner");
  CounterRng action_rng = root.split("actions");
  CounterRng shuffle_rng = root.split("shuffle");
  Adam adam_pi(model->pi().param_count());
  Adam adam_vf(model->vf().param_count());

  TrainResult result;
  result.model = model;
  const bool watch = cfg.divergence_patience > 0 && opts.total_steps > 0;
  if (watch) result.baseline_return = only_local_return(env_cfg, cfg.batch_episodes);
  const double threshold = result.baseline_return - (cfg.divergence_factor - 1.0) * std::abs(result.baseline_return);
  int below = 0;
  std::int64_t next_checkpoint = cfg.checkpoint_every > 0 ? cfg.checkpoint_every : -1;
  const std::string hash = env_cfg.hash();

  while (result.steps < opts.total_steps) {
    std::vector<Sample> batch;
    double return_sum = 0.0;
    int return_count = 0;
    for (int e = 0; e < cfg.batch_episodes && result.steps < opts.total_steps; ++e) {
      const auto frames = env.reset(result.episodes++);
      norm.reset_streams();
      std::map<int, std::vector<double>> obs;
      for (int id : env.live_agents()) obs[id] = norm.observation(frames[id].vector);
      std::map<int, std::vector<Transition>> traj;
      std::map<int, double> ret;
      while (!env.done()) {
        std::vector<std::pair<int, Action>> actions;
        for (int id : env.live_agents()) {
          const auto& o = obs.at(id);
          const auto z = model->logits(o);
          const auto lp = log_softmax2({z[0], z[1]});
          const int a = action_rng.uniform() < std::exp(lp[1]) ? 1 : 0;
          Transition tr;
          tr.sample.obs = o;
          tr.sample.action = a;
          tr.sample.logp = lp[a];
          tr.sample.value = model->value(o);
          traj[id].push_back(std::move(tr));
          actions.emplace_back(id, a == 1 ? Action::Stop : Action::Go);
        }
        const auto res = env.step(actions);
        result.steps += static_cast<std::int64_t>(actions.size());
        for (const auto& r : res.agents) {
          const double raw = r.reward.total;
          ret[r.id] += raw;
          traj[r.id].back().reward = normalize_reward ? norm.reward(r.id, raw) : raw;
          if (r.terminated || res.done) {
            finish_trajectory(traj[r.id], cfg, batch);
            norm.end_stream(r.id);
          } else {
            obs[r.id] = norm.observation(r.observation.vector);
          }
        }
      }
      for (const auto& [id, r] : ret) {
        return_sum += r;
        ++return_count;
      }
    }
    const double mean_return = return_count ? return_sum / return_count : 0.0;
    result.batch_returns.push_back(mean_return);

    if (watch) {
      below = mean_return < threshold ? below + 1 : 0;
      if (below >= cfg.divergence_patience) {
        throw DivergenceError("training diverged: mean return " + std::to_string(mean_return) + " stayed below " +
                              std::to_string(threshold) + " (Only Local baseline " +
                              std::to_string(result.baseline_return) + ") for " + std::to_string(below) +
                              " batches, at step " + std::to_string(result.steps));
      }
    }

    std::vector<std::size_t> idx(batch.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<Sample> mb;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      shuffle_rng.shuffle(std::span<std::size_t>(idx));
      for (std::size_t start = 0; start < idx.size(); start += static_cast<std::size_t>(cfg.minibatch)) {
        const std::size_t end = std::min(idx.size(), start + static_cast<std::size_t>(cfg.minibatch));
        mb.clear();
        for (std::size_t i = start; i < end; ++i) mb.push_back(batch[idx[i]]);
        std::vector<double> gpi(model->pi().param_count(), 0.0);
        std::vector<double> gvf(model->vf().param_count(), 0.0);
        policy_loss(model->pi(), mb, cfg, &gpi);
        value_loss(model->vf(), mb, cfg, &gvf);
        double sq = 0.0;
        for (double g : gpi) sq += g * g;
        for (double g : gvf) sq += g * g;
        const double norm2 = std::sqrt(sq);
        if (norm2 > cfg.max_grad_norm) {
          const double s = cfg.max_grad_norm / (norm2 + 1e-6);
          for (double& g : gpi) g *= s;
          for (double& g : gvf) g *= s;
        }
        adam_pi.step(model->pi().params(), gpi, cfg.learning_rate);
        adam_vf.step(model->vf().params(), gvf, cfg.learning_rate);
      }
    }

    if (opts.on_batch) opts.on_batch(*model, result.steps, mean_return);
    if (next_checkpoint > 0 && result.steps >= next_checkpoint && opts.on_checkpoint) {
      opts.on_checkpoint(model->checkpoint(hash, result.steps), result.steps);
      while (next_checkpoint <= result.steps) next_checkpoint += cfg.checkpoint_every;
    }
  }
  norm.set_training(false);
  if (opts.on_checkpoint) opts.on_checkpoint(model->checkpoint(hash, result.steps), result.steps);
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation

EpisodeLog run_episode(Environment& env, Policy& policy, std::int64_t episode) {
  env.set_policy_name(policy.name());
  policy.begin_episode(episode);
  auto frames = env.reset(episode);
  std::map<int, ObservationFrame> obs;
  for (std::size_t i = 0; i < frames.size(); ++i) obs[static_cast<int>(i)] = std::move(frames[i]);
  while (!env.done()) {
    std::vector<std::pair<int, Action>> actions;
    for (int id : env.live_agents()) actions.emplace_back(id, policy.act(id, obs.at(id), env.step_count()));
    auto res = env.step(actions);
    for (auto& r : res.agents) obs[r.id] = std::move(r.observation);
  }
  return env.log();
}

EvalResult evaluate(Policy& policy, const EnvConfig& env_cfg, int trials, std::span<const int> k_list) {
  EvalResult out;
  if (trials <= 0) return out;
  for (int k : k_list) {
    EnvConfig cfg = env_cfg;
    cfg.num_agents = {{0, k}};
    Environment env(cfg);
    std::vector<EpisodeLog> logs;
    for (int e = 0; e < trials; ++e) logs.push_back(run_episode(env, policy, e));
    out.rows.push_back(compute_metrics(logs));
    out.logs.insert(out.logs.end(), std::make_move_iterator(logs.begin()), std::make_move_iterator(logs.end()));
  }
  return out;
}

}  // namespace minisocial
