#include "minisocial/normalizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace minisocial {

void RunningMeanVar::update(std::span<const double> x) {
  if (x.size() != mean_.size()) throw std::invalid_argument("RunningMeanVar: dimension mismatch");
  ++count_;
  const double n = static_cast<double>(count_);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double delta = x[i] - mean_[i];
    mean_[i] += delta / n;
    m2_[i] += delta * (x[i] - mean_[i]);
  }
}

std::vector<double> RunningMeanVar::variance() const {
  std::vector<double> v(mean_.size(), 0.0);
  if (count_ == 0) return v;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = m2_[i] / static_cast<double>(count_);
  return v;
}

void RunningMeanVar::restore(std::uint64_t count, std::vector<double> mean, std::vector<double> m2) {
  if (mean.size() != m2.size()) throw std::invalid_argument("RunningMeanVar: restore size mismatch");
  count_ = count;
  mean_ = std::move(mean);
  m2_ = std::move(m2);
}

std::vector<double> Normalizer::observation(std::span<const double> obs) {
  if (training_) obs_.update(obs);
  return observation_frozen(obs);
}

std::vector<double> Normalizer::observation_frozen(std::span<const double> obs) const {
  if (obs.size() != obs_.dim()) throw std::invalid_argument("Normalizer: observation size mismatch");
  const auto var = obs_.variance();
  std::vector<double> out(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double z = (obs[i] - obs_.mean()[i]) / std::sqrt(var[i] + params_.epsilon);
    out[i] = std::clamp(z, -params_.clip_obs, params_.clip_obs);
  }
  return out;
}

double Normalizer::reward(int stream, double r) {
  if (training_) {
    double& ret = returns_[stream];
    ret = ret * params_.gamma + r;
    const double sample[1] = {ret};
    ret_.update(sample);
  }
  const double var = ret_.variance()[0];
  return std::clamp(r / std::sqrt(var + params_.epsilon), -params_.clip_reward, params_.clip_reward);
}

void Normalizer::end_stream(int stream) { returns_.erase(stream); }

}  // namespace minisocial
