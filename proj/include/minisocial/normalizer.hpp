#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace minisocial {

/// Welford running mean / population variance over fixed-width samples.
class RunningMeanVar {
 public:
  RunningMeanVar() = default;
  explicit RunningMeanVar(std::size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0) {}

  void update(std::span<const double> x);
  [[nodiscard]] std::size_t dim() const { return mean_.size(); }
  [[nodiscard]] std::uint64_t count() const { return count_; }
  [[nodiscard]] const std::vector<double>& mean() const { return mean_; }
  /// Population variance; zero before any sample.
  [[nodiscard]] std::vector<double> variance() const;

  void restore(std::uint64_t count, std::vector<double> mean, std::vector<double> m2);
  [[nodiscard]] const std::vector<double>& m2() const { return m2_; }

 private:
  std::uint64_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

/// Observation and reward normalisation in the style of VecNormalize:
/// observations are standardised per dimension, rewards are scaled by the
/// running std of the discounted return. Statistics only move in training mode.
class Normalizer {
 public:
  struct Params {
    double clip_obs = 10.0;
    double clip_reward = 10.0;
    double gamma = 0.99;
    double epsilon = 1e-8;
  };

  Normalizer() = default;
  Normalizer(std::size_t obs_dim, Params params) : obs_(obs_dim), ret_(1), params_(params) {}
  explicit Normalizer(std::size_t obs_dim) : Normalizer(obs_dim, Params{}) {}

  void set_training(bool training) { training_ = training; }
  [[nodiscard]] bool training() const { return training_; }

  /// Updates statistics first when training, then standardises and clips.
  std::vector<double> observation(std::span<const double> obs);
  /// Standardise without touching statistics.
  [[nodiscard]] std::vector<double> observation_frozen(std::span<const double> obs) const;

  /// Scale one reward for the return stream `stream` (one stream per agent).
  double reward(int stream, double r);
  /// Forget the running return of a finished stream.
  void end_stream(int stream);
  void reset_streams() { returns_.clear(); }

  [[nodiscard]] const RunningMeanVar& obs_stats() const { return obs_; }
  [[nodiscard]] const RunningMeanVar& return_stats() const { return ret_; }
  RunningMeanVar& obs_stats() { return obs_; }
  RunningMeanVar& return_stats() { return ret_; }
  [[nodiscard]] const Params& params() const { return params_; }

 private:
  RunningMeanVar obs_;
  RunningMeanVar ret_{1};
  Params params_;
  bool training_ = true;
  std::map<int, double> returns_;
};

}  // namespace minisocial
