#include "minisocial/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace minisocial {

int collision_events(const EpisodeLog& log) {
  // pair -> contact on the previous step
  std::map<std::pair<int, int>, bool> active;
  int events = 0;
  for (const auto& step : log.steps) {
    std::map<std::pair<int, int>, bool> now;
    for (const auto& a : step.agents) {
      for (int other : a.coll) {
        // wall contacts are per agent; agent and human pairs are unordered
        const auto key = other < 0 ? std::pair{a.id, other} : std::pair{std::min(a.id, other), std::max(a.id, other)};
        now[key] = true;
      }
    }
    for (const auto& [key, on] : now) {
      if (!active.contains(key)) ++events;
    }
    active = std::move(now);
  }
  return events;
}

namespace {

struct EpisodeStats {
  bool all_success = false;
  double partial = 0.0;
  double stop_time = 0.0;
  double max_dv = 0.0;
};

EpisodeStats episode_stats(const EpisodeLog& log) {
  EpisodeStats s;
  const int k = log.k;
  if (k <= 0) return s;
  std::map<int, int> stopped;
  std::map<int, double> prev_v;
  std::map<int, bool> succeeded;
  for (const auto& step : log.steps) {
    for (const auto& a : step.agents) {
      if (!a.succ) {
        if (a.v < kStopSpeed) ++stopped[a.id];
        if (auto it = prev_v.find(a.id); it != prev_v.end()) {
          s.max_dv = std::max(s.max_dv, std::abs(a.v - it->second) * 100.0);
        }
        prev_v[a.id] = a.v;
      }
      succeeded[a.id] = a.succ;
    }
  }
  int n_succ = 0;
  for (const auto& [id, ok] : succeeded) n_succ += ok ? 1 : 0;
  s.all_success = n_succ == k;
  s.partial = 100.0 * n_succ / k;
  double stop_sum = 0.0;
  for (const auto& [id, n] : stopped) stop_sum += n;
  s.stop_time = stop_sum / k;
  return s;
}

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(const std::string& field, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw std::runtime_error("metrics csv line " + std::to_string(line) + ": bad number '" + field + "'");
  }
  return v;
}

}  // namespace

MetricsRow compute_metrics(std::span<const EpisodeLog> logs) {
  if (logs.empty()) throw std::invalid_argument("compute_metrics: no episode logs");
  MetricsRow row;
  row.scenario = logs.front().scenario;
  row.policy = logs.front().policy;
  row.k = logs.front().k;
  row.trials = static_cast<int>(logs.size());
  // sums are taken in a fixed order of per-episode values sorted, so the
  // result does not depend on the order of the logs
  std::vector<double> succ, partial, length, coll, stop, dv;
  for (const auto& log : logs) {
    const auto s = episode_stats(log);
    succ.push_back(s.all_success ? 100.0 : 0.0);
    partial.push_back(s.partial);
    length.push_back(static_cast<double>(log.steps.size()));
    coll.push_back(collision_events(log));
    stop.push_back(s.stop_time);
    dv.push_back(s.max_dv);
  }
  auto mean = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    double t = 0.0;
    for (double x : v) t += x;
    return t / static_cast<double>(v.size());
  };
  row.success = mean(succ);
  row.partial_success = mean(partial);
  row.avg_length = mean(length);
  row.coll_rate = mean(coll);
  row.stop_time = mean(stop);
  row.max_dv = mean(dv);
  return row;
}

std::string metrics_csv(std::span<const MetricsRow> rows) {
  std::string out = std::string(kMetricsCsvHeader) + "\n";
  for (const auto& r : rows) {
    out += r.scenario + "," + r.policy + "," + std::to_string(r.k) + "," + std::to_string(r.trials) + "," +
           fmt(r.success) + "," + fmt(r.partial_success) + "," + fmt(r.avg_length) + "," + fmt(r.coll_rate) + "," +
           fmt(r.stop_time) + "," + fmt(r.max_dv) + "\n";
  }
  return out;
}

std::vector<MetricsRow> parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != kMetricsCsvHeader) throw std::runtime_error("metrics csv: unexpected header '" + line + "'");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 10) {
      throw std::runtime_error("metrics csv line " + std::to_string(lineno) + ": expected 10 fields, got " +
                               std::to_string(f.size()));
    }
    MetricsRow r;
    r.scenario = f[0];
    r.policy = f[1];
    r.k = static_cast<int>(parse_double(f[2], lineno));
    r.trials = static_cast<int>(parse_double(f[3], lineno));
    r.success = parse_double(f[4], lineno);
    r.partial_success = parse_double(f[5], lineno);
    r.avg_length = parse_double(f[6], lineno);
    r.coll_rate = parse_double(f[7], lineno);
    r.stop_time = parse_double(f[8], lineno);
    r.max_dv = parse_double(f[9], lineno);
    rows.push_back(std::move(r));
  }
  if (lineno == 0) throw std::runtime_error("metrics csv: empty input");
  return rows;
}

std::string metrics_table(std::span<const MetricsRow> rows) {
  const std::vector<std::string> head{"scenario", "policy",     "k",         "trials",    "success",
                                      "partial",  "avg_length", "coll_rate", "stop_time", "max_dv"};
  std::vector<std::vector<std::string>> cells{head};
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    cells.push_back({r.scenario, r.policy, std::to_string(r.k), std::to_string(r.trials), num(r.success),
                     num(r.partial_success), num(r.avg_length), num(r.coll_rate), num(r.stop_time), num(r.max_dv)});
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      const bool left = c < 2;
      const std::string pad(width[c] - row[c].size(), ' ');
      out += left ? row[c] + pad : pad + row[c];
      if (c + 1 < row.size()) out += "  ";
    }
    out += "\n";
  }
  return out;
}

}  // namespace minisocial
