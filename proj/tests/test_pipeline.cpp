#include "sizenet/pipeline.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "sizenet/csv.hpp"

using namespace sizenet;
namespace fs = std::filesystem;

namespace {

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = fs::temp_directory_path() / ("sizenet_test_" + name);
  std::ofstream out(path);
  out << content;
  return path.string();
}

std::string fresh_dir(const std::string& name) {
  const auto path = fs::temp_directory_path() / ("sizenet_test_" + name);
  fs::remove_all(path);
  fs::create_directories(path);
  return path.string();
}

}  // namespace

TEST_CASE("load_config without a file gives the defaults") {
  const auto cfg = load_config(std::nullopt);
  CHECK(cfg.seed == 1);
  CHECK(cfg.feature_dim == 128);
  CHECK(cfg.sim.n_categories == 3);
  CHECK(cfg.train.curriculum_fractions.size() == 3);
  CHECK(cfg.split.train_fraction == 0.6);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("load_config parses sections, lists and bools") {
  const auto path = temp_file("cfg_ok.ini",
                              "# run settings\n"
                              "[pipeline]\n"
                              "seed = 42\n"
                              "out_dir = somewhere\n"
                              "\n"
                              "[simulator]\n"
                              "n_categories = 2\n"
                              "articles_per_category = 10\n"
                              "category_base_rates = 0.2, 0.3\n"
                              "[featurizer]\n"
                              "dim = 16\n"
                              "standardize = true\n"
                              "[train]\n"
                              "use_weights = false\n"
                              "curriculum_fractions = 0.5, 1.0\n"
                              "[split]\n"
                              "seed = 9\n"
                              "[metrics]\n"
                              "w_split = 1.25\n"
                              "[saliency]\n"
                              "fill = background\n");
  const auto cfg = load_config(path);
  CHECK(cfg.seed == 42);
  CHECK(cfg.out_dir == "somewhere");
  CHECK(cfg.sim.n_categories == 2);
  REQUIRE(cfg.sim.category_base_rates.size() == 2);
  CHECK(cfg.sim.category_base_rates[1] == 0.3);
  CHECK(cfg.feature_dim == 16);
  CHECK(cfg.standardize);
  CHECK_FALSE(cfg.train.use_weights);
  CHECK(cfg.train.curriculum_fractions == std::vector<double>{0.5, 1.0});
  REQUIRE(cfg.split.seed.has_value());
  CHECK(*cfg.split.seed == 9);
  REQUIRE(cfg.metrics.w_split.has_value());
  CHECK(*cfg.metrics.w_split == 1.25);
  CHECK(cfg.saliency.fill == "background");
}

TEST_CASE("load_config fails closed") {
  const auto unknown_key =
      temp_file("cfg_bad_key.ini", "[simulator]\nn_categorys = 2\n");
  CHECK_THROWS_WITH_AS(load_config(unknown_key),
                       doctest::Contains("unknown key 'n_categorys'"),
                       std::runtime_error);

  const auto unknown_section = temp_file("cfg_bad_sec.ini", "[simulation]\n");
  CHECK_THROWS_WITH_AS(load_config(unknown_section),
                       doctest::Contains("unknown section"),
                       std::runtime_error);

  const auto stray = temp_file("cfg_stray.ini", "seed = 4\n");
  CHECK_THROWS_WITH_AS(load_config(stray),
                       doctest::Contains("outside any [section]"),
                       std::runtime_error);

  const auto no_equals = temp_file("cfg_noeq.ini", "[pipeline]\nseed 4\n");
  CHECK_THROWS_AS(load_config(no_equals), std::runtime_error);

  const auto bad_value =
      temp_file("cfg_badval.ini", "[train]\nepochs = soon\n");
  CHECK_THROWS_WITH_AS(load_config(bad_value), doctest::Contains(":2"),
                       std::runtime_error);

  const auto bad_bool =
      temp_file("cfg_badbool.ini", "[train]\nuse_weights = yes\n");
  CHECK_THROWS_WITH_AS(load_config(bad_bool), doctest::Contains("true/false"),
                       std::runtime_error);

  const auto bad_seed = temp_file("cfg_badseed.ini", "[pipeline]\nseed = -3\n");
  CHECK_THROWS_AS(load_config(bad_seed), std::runtime_error);

  CHECK_THROWS_AS(load_config(std::string("definitely_missing.ini")),
                  std::runtime_error);
}

TEST_CASE("pipeline window defaults to the simulation horizon") {
  PipelineConfig cfg;
  cfg.sim.horizon_days = 90;
  CHECK(cfg.window().start == 0);
  CHECK(cfg.window().end == 89);
  cfg.window_start = 10;
  cfg.window_end = 30;
  CHECK(cfg.window().end == 30);
}

TEST_CASE("pipeline validation catches bad sections") {
  PipelineConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.saliency.fill = "mean";
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = PipelineConfig{};
  cfg.metrics.tau_quantiles = {0.2, 0.1};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = PipelineConfig{};
  cfg.feature_dim = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = PipelineConfig{};
  cfg.window_end = 5;
  cfg.window_start = 9;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  SplitSpec split;
  split.val_fraction = 0.3;
  CHECK_THROWS_AS(split.validate(), std::invalid_argument);
  split = SplitSpec{};
  split.train_fraction = 0.0;
  split.val_fraction = 0.8;
  CHECK_THROWS_AS(split.validate(), std::invalid_argument);
}

TEST_CASE("make_split partitions the universe by rounded fractions") {
  std::vector<ArticleId> ids;
  for (int i = 0; i < 1000; ++i) ids.push_back("a" + std::to_string(i));
  const auto split = make_split(ids, SplitSpec{}, 21);

  CHECK(split.train.size() == 600);
  CHECK(split.val.size() == 200);
  CHECK(split.test.size() == 200);
  CHECK(std::is_sorted(split.train.begin(), split.train.end()));
  CHECK(std::is_sorted(split.test.begin(), split.test.end()));

  std::set<ArticleId> seen;
  for (const auto& part : {split.train, split.val, split.test}) {
    for (const auto& id : part) CHECK(seen.insert(id).second);
  }
  CHECK(seen.size() == ids.size());

  const auto again = make_split(ids, SplitSpec{}, 21);
  CHECK(again.train == split.train);
  const auto moved = make_split(ids, SplitSpec{}, 22);
  CHECK(moved.train != split.train);

  // duplicates collapse before splitting
  auto dups = ids;
  dups.insert(dups.end(), ids.begin(), ids.end());
  const auto dedup = make_split(dups, SplitSpec{}, 21);
  CHECK(dedup.train == split.train);
}

TEST_CASE("make_split keeps every article even on tiny universes") {
  const auto split = make_split({"a", "b", "c"}, SplitSpec{}, 3);
  CHECK(split.train.size() + split.val.size() + split.test.size() == 3);
  CHECK(split.train.size() == 2);
}

TEST_CASE("the full pipeline writes its artifacts deterministically") {
  PipelineConfig cfg = load_config(std::nullopt);
  cfg.sim.n_categories = 2;
  cfg.sim.articles_per_category = 30;
  cfg.sim.mean_sales_per_article = 25.0;
  cfg.sim.image_side = 16;
  cfg.sim.seed = 5;
  cfg.seed = 5;
  cfg.feature_dim = 24;
  cfg.train.epochs = 6;
  cfg.train.batch_size = 16;
  cfg.saliency.n_masks = 40;
  cfg.saliency.grid_h = 4;
  cfg.saliency.grid_w = 4;
  cfg.saliency.top_tp = 2;

  cfg.out_dir = fresh_dir("pipe_a");
  const auto summary = cmd_pipeline(cfg);
  CHECK(summary.test_size > 0);
  CHECK(summary.auc >= 0.0);
  CHECK(summary.auc <= 1.0);

  for (const char* name :
       {"sales.csv", "returns.csv", "truth.csv", "regions.csv", "labels.csv",
        "model.bin", "history.csv", "predictions.csv", "roc.csv", "roc.svg",
        "pr.csv", "pr.svg", "tau.csv", "tau.svg", "scatter.csv", "report.txt",
        "explain.csv"}) {
    CHECK_MESSAGE(fs::exists(fs::path(cfg.out_dir) / name), name);
  }
  CHECK(fs::is_directory(fs::path(cfg.out_dir) / "images"));
  CHECK(fs::is_directory(fs::path(cfg.out_dir) / "saliency"));

  long images = 0;
  for (const auto& e : fs::directory_iterator(fs::path(cfg.out_dir) / "images")) {
    images += e.path().extension() == ".pgm";
  }
  CHECK(images == 60);

  auto second = cfg;
  second.out_dir = fresh_dir("pipe_b");
  cmd_pipeline(second);

  for (const char* name : {"sales.csv", "labels.csv", "model.bin",
                           "predictions.csv", "report.txt", "explain.csv"}) {
    const auto a = read_text_file((fs::path(cfg.out_dir) / name).string());
    const auto b = read_text_file((fs::path(second.out_dir) / name).string());
    CHECK_MESSAGE(a == b, name);
  }
}

TEST_CASE("cmd_explain rejects unknown article ids") {
  PipelineConfig cfg = load_config(std::nullopt);
  cfg.sim.n_categories = 1;
  cfg.sim.articles_per_category = 12;
  cfg.sim.mean_sales_per_article = 15.0;
  cfg.sim.image_side = 12;
  cfg.feature_dim = 12;
  cfg.train.epochs = 3;
  cfg.train.batch_size = 8;
  cfg.saliency.n_masks = 20;
  cfg.saliency.grid_h = 3;
  cfg.saliency.grid_w = 3;
  cfg.out_dir = fresh_dir("pipe_explain");

  cmd_simulate(cfg);
  cmd_label(cfg);
  cmd_train(cfg);
  CHECK_THROWS_WITH_AS(cmd_explain(cfg, {"cat99-a9999"}),
                       doctest::Contains("cat99-a9999"), std::runtime_error);
}
