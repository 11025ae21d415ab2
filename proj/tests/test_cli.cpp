#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "minisocial/geometry_io.hpp"
#include "minisocial/metrics.hpp"

using namespace minisocial;
namespace fs = std::filesystem;

namespace {

const std::string kCli = MINISOCIAL_CLI;
const std::string kSource = MINISOCIAL_SOURCE_DIR;

int run(const std::string& args, const fs::path& log_dir) {
  const std::string cmd =
      "MINISOCIAL_LOG_DIR='" + log_dir.string() + "' '" + kCli + "' " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("minisocial_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("validate accepts the shipped doorway files") {
  const auto d = fresh_dir("validate");
  const std::string files = kSource + "/data/doorway.map.json " + kSource + "/data/doorway.graph.json " + kSource +
                            "/data/doorway.scenario.json";
  CHECK(run("validate " + files, d) == 0);
  write_text_file(d / "broken.graph.json", "{\"type\": \"graph\"");
  CHECK(run("validate " + (d / "broken.graph.json").string(), d) != 0);
}

TEST_CASE("bench grid has one row per cell") {
  const auto d = fresh_dir("bench");
  CHECK(run("bench --policies only_local stop --scenarios envs_door envs_hallway --k 2 3 --trials 1", d) == 0);
  const auto rows = parse_metrics_csv(read_text_file(d / "door/ao/metrics.csv"));
  CHECK(rows.size() == 8);
}

TEST_CASE("eval twice gives identical bytes") {
  const auto a = fresh_dir("eval_a");
  const auto b = fresh_dir("eval_b");
  CHECK(run("eval --seed 3 --trials 2 --k 2 3", a) == 0);
  CHECK(run("eval --seed 3 --trials 2 --k 2 3", b) == 0);
  CHECK(read_text_file(a / "door/ao/eval_only_local.jsonl") == read_text_file(b / "door/ao/eval_only_local.jsonl"));
  CHECK(read_text_file(a / "door/ao/metrics.csv") == read_text_file(b / "door/ao/metrics.csv"));
}

TEST_CASE("config errors exit with 2") {
  const auto d = fresh_dir("cfg");
  write_text_file(d / "bad.json", "{\"num_agentz\": 1}");
  CHECK(run("eval --config " + (d / "bad.json").string(), d) == 2);
  CHECK(run("eval --policy nothing_here", d) == 2);
}

TEST_CASE("gen-scenario output validates") {
  const auto d = fresh_dir("gen");
  CHECK(run("gen-scenario --kind roundabout -k 4 -o " + d.string(), d) == 0);
  CHECK(run("validate " + (d / "roundabout.map.json").string() + " " + (d / "roundabout.graph.json").string() + " " +
                (d / "roundabout.scenario.json").string(),
            d) == 0);
}

TEST_CASE("train then eval a checkpoint, then replay") {
  const auto d = fresh_dir("train");
  const auto ckpt = d / "model.json";
  CHECK(run("train --steps 600 --no-eval -o " + ckpt.string(), d) == 0);
  REQUIRE(fs::exists(ckpt));
  CHECK(run("eval --policy " + ckpt.string() + " --trials 1 --k 2", d) == 0);
  CHECK(run("eval --sample --policy " + ckpt.string() + " --trials 1 --k 2", d) == 0);
  CHECK(run("replay " + (d / "door/ao/eval_model.jsonl").string() + " -o " + (d / "frames.json").string(), d) == 0);
  CHECK(fs::file_size(d / "frames.json") > 0);
}
