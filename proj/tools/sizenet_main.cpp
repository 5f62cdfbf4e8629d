#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sizenet/csv.hpp"
#include "sizenet/pipeline.hpp"

namespace {

struct CommonArgs {
  std::optional<std::string> config;
  std::optional<long> seed;
  std::optional<std::string> out;
  bool no_weights = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "configuration file");
  cmd->add_option("--seed", args.seed, "override the run seed");
  cmd->add_option("--out", args.out, "override the output directory");
  cmd->add_flag("--no-weights", args.no_weights,
                "train with every sample weight forced to 1");
}

sizenet::PipelineConfig resolve(const CommonArgs& args) {
  sizenet::PipelineConfig cfg = sizenet::load_config(args.config);
  if (args.seed) {
    if (*args.seed < 0) throw std::runtime_error("--seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(*args.seed);
  }
  if (args.out) cfg.out_dir = *args.out;
  if (args.no_weights) cfg.train.use_weights = false;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weak-supervision lab for size-issue prediction"};
  app.require_subcommand(1);

  CommonArgs sim_args, label_args, train_args, eval_args, explain_args,
      pipe_args;
  std::string explain_ids;
  int explain_top_tp = 0;

  add_common(app.add_subcommand("simulate", "generate a synthetic catalog"),
             sim_args);
  add_common(app.add_subcommand("label", "aggregate events into weak labels"),
             label_args);
  add_common(app.add_subcommand("train", "fit the student model"), train_args);
  add_common(app.add_subcommand("evaluate", "score the student on the test split"),
             eval_args);
  CLI::App* explain =
      app.add_subcommand("explain", "saliency maps for selected articles");
  add_common(explain, explain_args);
  explain->add_option("--ids", explain_ids,
                      "comma-separated article ids to explain");
  explain->add_option("--top-tp", explain_top_tp,
                      "explain the top-K correct positives instead");
  add_common(app.add_subcommand("pipeline", "run all stages in order"),
             pipe_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("simulate")) {
      sizenet::cmd_simulate(resolve(sim_args));
    } else if (app.got_subcommand("label")) {
      sizenet::cmd_label(resolve(label_args));
    } else if (app.got_subcommand("train")) {
      sizenet::cmd_train(resolve(train_args));
    } else if (app.got_subcommand("evaluate")) {
      sizenet::cmd_evaluate(resolve(eval_args));
    } else if (app.got_subcommand("explain")) {
      sizenet::PipelineConfig cfg = resolve(explain_args);
      if (explain_top_tp > 0) cfg.saliency.top_tp = explain_top_tp;
      std::vector<sizenet::ArticleId> ids;
      if (!explain_ids.empty()) {
        for (const auto& field : sizenet::split_fields(explain_ids)) {
          if (!field.empty()) ids.push_back(field);
        }
      }
      sizenet::cmd_explain(cfg, ids);
    } else if (app.got_subcommand("pipeline")) {
      sizenet::cmd_pipeline(resolve(pipe_args));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
