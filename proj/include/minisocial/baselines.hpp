#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "minisocial/environment.hpp"
#include "minisocial/rng.hpp"
#include "minisocial/metrics.hpp"
#include "minisocial/normalizer.hpp"

namespace minisocial {

enum class PolicyKind { OnlyLocal, Scripted, Learned, External };

std::string_view to_string(PolicyKind k);

/// GO/STOP decisions for the live agents of one environment.
class Policy {
 public:
  virtual ~Policy() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual PolicyKind kind() const = 0;
  virtual void begin_episode(std::int64_t /*episode*/) {}
  /// `t` is the number of steps already taken in the episode.
  virtual Action act(int agent_id, const ObservationFrame& obs, int t) = 0;
};

Action only_local(const ObservationFrame& obs);

class OnlyLocalPolicy final : public Policy {
 public:
  [[nodiscard]] std::string name() const override { return "only_local"; }
  [[nodiscard]] PolicyKind kind() const override { return PolicyKind::OnlyLocal; }
  Action act(int, const ObservationFrame& obs, int) override { return only_local(obs); }
};

class ScriptedPolicy final : public Policy {
 public:
  using Script = std::function<Action(int agent_id, int t)>;
  ScriptedPolicy(std::string name, Script script) : name_(std::move(name)), script_(std::move(script)) {}
  [[nodiscard]] std::string name() const override { return name_; }
  [[nodiscard]] PolicyKind kind() const override { return PolicyKind::Scripted; }
  Action act(int agent_id, const ObservationFrame&, int t) override { return script_(agent_id, t); }

 private:
  std::string name_;
  Script script_;
};

/// Success, existence, collision and a proximity penalty of
/// -0.1 * (0.2 - d) below 0.2 m surface distance.
RewarderConfig cadrl_reward_config();

/// Reward terms and zone ordering for a run type: "AO"/"any_order",
/// "EO"/"enforced_order", "CADRL"/"cadrl", or "OL"/"only_local"/"default"
/// for the stock terms. Throws ConfigError for anything else.
void apply_run_type(const std::string& run_type, EnvConfig& cfg);

inline constexpr double kSubGoalReward = 25.0;

// ---------------------------------------------------------------------------
// Learner

/// Fully connected network, tanh hidden layers, linear output. Parameters are
/// one flat vector: per layer, row-major weights (out x in) then biases.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<int> sizes);

  /// Gaussian weights with std gain/sqrt(fan_in); the last layer uses out_gain.
  void init(CounterRng& rng, double out_gain);

  [[nodiscard]] std::size_t param_count() const { return params_.size(); }
  [[nodiscard]] const std::vector<double>& params() const { return params_; }
  std::vector<double>& params() { return params_; }
  [[nodiscard]] const std::vector<int>& sizes() const { return sizes_; }
  [[nodiscard]] int input_size() const { return sizes_.front(); }
  [[nodiscard]] int output_size() const { return sizes_.back(); }

  /// activations[0] is the input, activations[l] the output of layer l.
  using Cache = std::vector<std::vector<double>>;
  std::vector<double> forward(std::span<const double> x, Cache* cache = nullptr) const;
  /// Adds dLoss/dparams into grad, given dLoss/doutput.
  void backward(const Cache& cache, std::span<const double> grad_out, std::span<double> grad) const;

 private:
  std::vector<int> sizes_;
  std::vector<double> params_;
};

struct LearnerConfig {
  double learning_rate = 1e-3;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip = 0.2;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double max_grad_norm = 0.5;
  int batch_episodes = 8;
  int epochs = 10;
  int minibatch = 32;
  std::vector<int> hidden{64, 64};
  /// Initial logit margin of GO over STOP, so an untrained policy starts out
  /// close to Only Local.
  double go_bias = 2.0;
  /// Write a checkpoint every this many agent steps (0 = only at the end).
  std::int64_t checkpoint_every = 0;
  /// Abort when the batch mean return stays below the Only Local baseline by
  /// this factor for `divergence_patience` batches in a row (0 = off).
  double divergence_factor = 10.0;
  int divergence_patience = 20;

  bool operator==(const LearnerConfig&) const = default;
  /// Throws ConfigError.
  void validate() const;
};

json to_json(const LearnerConfig& c);
/// Throws ConfigError on unknown keys or bad values.
LearnerConfig learner_config_from_json(const json& j);

/// One agent step collected for an update.
struct Sample {
  std::vector<double> obs;  // normalised
  int action = 0;           // 0 = GO, 1 = STOP
  double logp = 0.0;
  double value = 0.0;
  double advantage = 0.0;
  double ret = 0.0;
};

/// Clipped surrogate plus entropy bonus, as a loss to minimise, over
/// `batch` with advantages normalised inside the batch. Adds the gradient
/// w.r.t. the policy parameters into `grad` when given.
double policy_loss(const Mlp& pi, std::span<const Sample> batch, const LearnerConfig& cfg,
                   std::vector<double>* grad);
/// value_coef * mean squared error to the returns.
double value_loss(const Mlp& vf, std::span<const Sample> batch, const LearnerConfig& cfg, std::vector<double>* grad);

struct GradCheckResult {
  std::size_t params = 0;
  std::size_t within_tolerance = 0;
  double worst_relative_error = 0.0;
  [[nodiscard]] double fraction() const { return params ? static_cast<double>(within_tolerance) / params : 1.0; }
};

/// Compare the analytic policy_loss gradient with central differences.
GradCheckResult gradient_check(const Mlp& pi, std::span<const Sample> batch, const LearnerConfig& cfg,
                               double eps = 1e-6, double tolerance = 1e-3);

/// Shared policy/value networks plus observation and reward normalisation.
class ActorCritic {
 public:
  ActorCritic() = default;
  ActorCritic(int obs_dim, LearnerConfig cfg, std::uint64_t seed);

  [[nodiscard]] std::array<double, 2> logits(std::span<const double> norm_obs) const;
  [[nodiscard]] double value(std::span<const double> norm_obs) const;
  [[nodiscard]] Action greedy(std::span<const double> norm_obs) const;

  [[nodiscard]] const LearnerConfig& config() const { return cfg_; }
  [[nodiscard]] int obs_dim() const { return obs_dim_; }
  Mlp& pi() { return pi_; }
  Mlp& vf() { return vf_; }
  [[nodiscard]] const Mlp& pi() const { return pi_; }
  [[nodiscard]] const Mlp& vf() const { return vf_; }
  Normalizer& normalizer() { return norm_; }
  [[nodiscard]] const Normalizer& normalizer() const { return norm_; }

  /// Checkpoint text: parameters, normaliser state and the env config hash.
  [[nodiscard]] std::string checkpoint(const std::string& config_hash, std::int64_t steps) const;
  /// Throws std::runtime_error on a malformed checkpoint.
  static ActorCritic from_checkpoint(const std::string& text, std::string* config_hash = nullptr);

 private:
  LearnerConfig cfg_;
  int obs_dim_ = 0;
  Mlp pi_;
  Mlp vf_;
  Normalizer norm_;
};

enum class ActionSelection { Greedy, Sample };

/// Acts on the policy logits with the normaliser frozen. Greedy takes the
/// argmax; Sample draws from the softmax with a stream seeded per episode,
/// so runs still repeat exactly.
class LearnedPolicy final : public Policy {
 public:
  LearnedPolicy(std::shared_ptr<const ActorCritic> model, std::string name = "learned",
                ActionSelection selection = ActionSelection::Greedy, std::uint64_t seed = 0)
      : model_(std::move(model)), name_(std::move(name)), selection_(selection), seed_(seed), rng_(seed) {}
  [[nodiscard]] std::string name() const override { return name_; }
  [[nodiscard]] PolicyKind kind() const override { return PolicyKind::Learned; }
  void begin_episode(std::int64_t episode) override;
  Action act(int agent_id, const ObservationFrame& obs, int t) override;

 private:
  std::shared_ptr<const ActorCritic> model_;
  std::string name_;
  ActionSelection selection_;
  std::uint64_t seed_;
  CounterRng rng_;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainOptions {
  std::int64_t total_steps = 200000;  // agent steps
  std::uint64_t seed = 0;
  /// Called with checkpoint text and the step count at each checkpoint.
  std::function<void(const std::string&, std::int64_t)> on_checkpoint;
  /// Called after each update with the model, agent steps so far and the
  /// batch mean return.
  std::function<void(const ActorCritic&, std::int64_t, double)> on_batch;
};

struct TrainResult {
  std::shared_ptr<ActorCritic> model;
  std::int64_t steps = 0;
  std::int64_t episodes = 0;
  std::vector<double> batch_returns;
  double baseline_return = 0.0;
};

/// Parameter-shared PPO over every agent of `env_cfg`. Deterministic given
/// the seed. Throws DivergenceError when the divergence detector fires.
TrainResult train(const EnvConfig& env_cfg, const LearnerConfig& cfg, const TrainOptions& opts);

/// Mean undiscounted per-agent return of Only Local over episodes [0, n).
double only_local_return(const EnvConfig& env_cfg, int episodes);

// ---------------------------------------------------------------------------
// Evaluation

/// Run one episode to completion; returns its log.
EpisodeLog run_episode(Environment& env, Policy& policy, std::int64_t episode);

struct EvalResult {
  std::vector<MetricsRow> rows;  // one per k with trials > 0
  std::vector<EpisodeLog> logs;  // in (k, episode) order
};

/// For each k, `trials` episodes 0..trials-1 under env_cfg with k agents.
EvalResult evaluate(Policy& policy, const EnvConfig& env_cfg, int trials, std::span<const int> k_list);

}  // namespace minisocial
