// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// defr: command-line front end. Reports go to stdout, logs to stderr.
// Exit codes: 0 success, 1 configuration error, 2 numeric failure.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "defr/dataio.hpp"
#include "defr/harness.hpp"
#include "defr/labelspace.hpp"
#include "defr/losses.hpp"
#include "defr/metrics.hpp"
#include "defr/synth.hpp"
#include "json.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kNumericError = 2;

struct TrainFlags {
  defr::TrainConfig config;
  std::string init = "random";
  std::string loss = "lse-sign";
  std::string record_path;

  void add_to(CLI::App* app) {
    app->add_option("--features", config.features_path, "Feature container (N x D)")->required();
    app->add_option("--labels", config.labels_path, "Label container (N x C)")->required();
    app->add_option("--classes", config.classes_path, "Class list, one 'verb object' per line")
        ->required();
    app->add_option("--init", init, "random | embeddings")->capture_default_str();
    app->add_option("--embeddings", config.embeddings_path, "Embedding container (C x D)");
    app->add_option("--loss", loss, "lse-sign | bce | wbce | focal")->capture_default_str();
    app->add_option("--gamma", config.gamma, "Logit scale")->capture_default_str();
    app->add_option("--base-lr", config.base_lr, "Peak learning rate")->capture_default_str();
    app->add_option("--epochs", config.epochs)->capture_default_str();
    app->add_option("--batch-size", config.batch_size)->capture_default_str();
    app->add_option("--min-per-class", config.min_per_class,
                    "Per-epoch floor of positive examples per class")
        ->capture_default_str();
    app->add_option("--val-fraction", config.val_fraction)->capture_default_str();
    app->add_option("--restart-period", config.restart_period, "Warm restart period in epochs")
        ->capture_default_str();
    app->add_option("--seed", config.seed)->capture_default_str();
    app->add_option("--test-features", config.test_features_path);
    app->add_option("--test-labels", config.test_labels_path);
  }

  defr::TrainConfig resolve() {
    config.init = defr::init_kind_from_string(init);
    config.loss = defr::loss_kind_from_string(loss);
    config.validate();
    return config;
  }
};

void write_text(const std::string& path, const std::string& text) {
  defr::write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::vector<double> parse_gammas(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      double g = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(g);
    } catch (const std::logic_error&) {
      throw defr::ConfigError("bad gamma value '" + item + "'");
    }
  }
  return out;
}

int run_prompt(const std::string& classes_path, const std::string& exceptions_path,
               const std::string& out_path) {
  auto classes = defr::read_class_list(classes_path);
  defr::GerundTable table = defr::builtin_gerund_table();
  if (!exceptions_path.empty()) {
    auto bytes = defr::read_file(exceptions_path);
    for (auto& [verb, gerund] :
         defr::parse_gerund_table(std::string(bytes.begin(), bytes.end()))) {
      table.insert_or_assign(verb, gerund);
    }
  }
  std::string text;
  for (const auto& p : defr::make_prompts(classes, table)) text += p.text + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text(out_path, text);
  }
  return 0;
}

int run_gradcheck(const std::string& loss, const defr::GradcheckOptions& options) {
  std::vector<defr::LossKind> kinds;
  if (loss == "all") {
    kinds = {defr::LossKind::kLseSign, defr::LossKind::kBce, defr::LossKind::kWeightedBce,
             defr::LossKind::kFocal};
  } else {
    kinds = {defr::loss_kind_from_string(loss)};
  }
  std::cout << "gradcheck trials=" << options.trials << " c_max=" << options.max_classes
            << " epsilon=" << options.epsilon << " seed=" << options.seed << "\n";
  std::cout << std::left << std::setw(10) << "loss" << std::right << std::setw(16)
            << "max_rel_error" << "\n";
  for (auto kind : kinds) {
    auto report = defr::gradcheck(kind, options);
    std::cout << std::left << std::setw(10) << defr::to_string(kind) << std::right
              << std::setw(16) << std::scientific << std::setprecision(3)
              << report.max_rel_error << std::defaultfloat << "\n";
  }
  return 0;
}

int run_analyze(const std::string& init_path, const std::string& final_path, std::size_t k) {
  auto w0 = defr::read_matrix(init_path).values;
  auto w1 = defr::read_matrix(final_path).values;
  auto drift = defr::structure_drift(w0, w1, k);
  nlohmann::ordered_json j;
  j["frobenius_drift"] = drift.frobenius_drift;
  j["nn_overlap"] = drift.nn_overlap;
  j["k"] = drift.k;
  std::cout << j.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cosine-classifier training and evaluation for multi-label HOI recognition"};
  app.require_subcommand(1);

  // prompt
  std::string classes_path, exceptions_path, prompt_out;
  auto* prompt = app.add_subcommand("prompt", "Compile a class list into prompt sentences");
  prompt->add_option("--classes", classes_path)->required();
  prompt->add_option("--exceptions", exceptions_path, "Extra 'verb gerund' table");
  prompt->add_option("--out", prompt_out, "Output file (default stdout)");

  // train
  TrainFlags train_flags;
  auto* train = app.add_subcommand("train", "Train a classifier and write a checkpoint");
  train_flags.add_to(train);
  train->add_option("--checkpoint", train_flags.config.checkpoint_path,
                    "Where to write the best-validation weights");
  train->add_option("--record", train_flags.record_path, "Also write the run record here");

  // eval
  defr::EvalConfig eval_config;
  double eval_gamma = 0.0;
  auto* eval = app.add_subcommand("eval", "Compute per-class AP and mAP");
  eval->add_option("--weights", eval_config.weights_path)->required();
  eval->add_option("--features", eval_config.features_path)->required();
  eval->add_option("--labels", eval_config.labels_path)->required();
  auto* eval_gamma_opt = eval->add_option("--gamma", eval_gamma, "Override checkpoint gamma");

  // gradcheck
  defr::GradcheckOptions gc;
  std::string gc_loss = "all";
  auto* gradcheck = app.add_subcommand("gradcheck", "Compare analytic and numeric loss gradients");
  gradcheck->add_option("--loss", gc_loss, "all | lse-sign | bce | wbce | focal")
      ->capture_default_str();
  gradcheck->add_option("--trials", gc.trials)->capture_default_str();
  gradcheck->add_option("--c-max", gc.max_classes)->capture_default_str();
  gradcheck->add_option("--epsilon", gc.epsilon)->capture_default_str();
  gradcheck->add_option("--seed", gc.seed)->capture_default_str();

  // analyze
  std::string analyze_init, analyze_final;
  std::size_t analyze_k = 5;
  auto* analyze = app.add_subcommand("analyze", "Structure drift between two weight matrices");
  analyze->add_option("--init", analyze_init)->required();
  analyze->add_option("--final", analyze_final)->required();
  analyze->add_option("--k", analyze_k)->capture_default_str();

  // sweep-gamma
  TrainFlags sweep_flags;
  std::string gammas = "50,100,150,300,500";
  auto* sweep = app.add_subcommand("sweep-gamma", "Train once per logit scale");
  sweep_flags.add_to(sweep);
  sweep->add_option("--gammas", gammas, "Comma-separated list")->capture_default_str();

  // ablate
  TrainFlags ablate_flags;
  auto* ablation = app.add_subcommand("ablate", "init {random, embeddings} x loss {bce, lse-sign}");
  ablate_flags.add_to(ablation);

  // synth
  defr::SynthConfig synth_config;
  std::string synth_dir;
  bool separable = false;
  auto* synth = app.add_subcommand("synth", "Write the synthetic benchmark");
  synth->add_option("--out-dir", synth_dir)->required();
  synth->add_option("--seed", synth_config.seed)->capture_default_str();
  synth->add_option("--num-train", synth_config.num_train)->capture_default_str();
  synth->add_option("--num-test", synth_config.num_test)->capture_default_str();
  synth->add_option("--dim", synth_config.dim)->capture_default_str();
  synth->add_option("--num-verbs", synth_config.num_verbs)->capture_default_str();
  synth->add_option("--num-objects", synth_config.num_objects)->capture_default_str();
  synth->add_option("--zipf", synth_config.zipf_exponent)->capture_default_str();
  synth->add_option("--extra-label-prob", synth_config.extra_label_prob)->capture_default_str();
  synth->add_option("--shared-offset", synth_config.shared_offset)->capture_default_str();
  synth->add_option("--feature-noise", synth_config.feature_noise)->capture_default_str();
  synth->add_option("--text-noise", synth_config.text_noise)->capture_default_str();
  synth->add_option("--unique-weight", synth_config.unique_weight)->capture_default_str();
  synth->add_flag("--separable", separable, "Linearly separable single-label set (N=512, D=16, C=8)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*prompt) return run_prompt(classes_path, exceptions_path, prompt_out);

    if (*train) {
      auto config = train_flags.resolve();
      auto result = defr::train(config, &std::cerr);
      auto json = result.record.to_json(false);
      std::cout << json << "\n";
      if (!train_flags.record_path.empty()) write_text(train_flags.record_path, json + "\n");
      std::cerr << "wall time " << result.record.wall_time_s << " s\n";
      return 0;
    }

    if (*eval) {
      if (*eval_gamma_opt) eval_config.gamma = eval_gamma;
      auto report = defr::evaluate(eval_config, &std::cerr);
      std::cout << report.to_json() << "\n";
      return 0;
    }

    if (*gradcheck) return run_gradcheck(gc_loss, gc);
    if (*analyze) return run_analyze(analyze_init, analyze_final, analyze_k);

    if (*sweep) {
      auto gamma_list = parse_gammas(gammas);
      auto config = sweep_flags.resolve();
      auto inputs = defr::load_inputs(config);
      auto rows = defr::sweep_gamma(inputs, config, gamma_list, &std::cerr);
      std::cout << defr::format_gamma_table(rows);
      return 0;
    }

    if (*ablation) {
      auto config = ablate_flags.resolve();
      if (config.embeddings_path.empty()) throw defr::ConfigError("ablate requires --embeddings");
      config.init = defr::InitKind::kEmbeddings;
      auto inputs = defr::load_inputs(config);
      auto cells = defr::ablate(inputs, config, &std::cerr);
      std::cout << defr::format_ablation_table(cells);
      return 0;
    }

    if (*synth) {
      auto data = separable ? defr::make_separable(synth_config.seed)
                            : defr::make_synth(synth_config);
      defr::write_synth(data, synth_dir);
      std::cerr << "wrote " << data.features.rows() << "x" << data.features.cols()
                << " features, " << data.classes.size() << " classes to " << synth_dir << "\n";
      return 0;
    }
  } catch (const defr::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericError;
  } catch (const defr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return 0;
}
