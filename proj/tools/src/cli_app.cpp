// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "cli_app.hpp"

#include <functional>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace zeroswot::cli {
namespace {

struct CliState {
  GlobalOptions global;
  std::uint64_t seed = 0;
  std::string config;
  std::string run_dir = "run";
  AverageOptions average;
  std::vector<std::string> average_inputs;
  std::string average_output;
  GradCheckOptions grad;
  std::function<int(std::ostream&)> action;
};

std::unique_ptr<CLI::App> MakeApp(CliState& s) {
  auto app = std::make_unique<CLI::App>(
      "Zero-shot speech translation at desk scale: a speech encoder trained to\n"
      "imitate the embedding layer of a frozen toy MT model.",
      "zeroswot");
  app->require_subcommand(1);
  app->fallthrough();
  app->add_option("--config", s.config, "Run config JSON; defaults to RUN_DIR/config.json or built-ins")
      ->check(CLI::ExistingFile);
  app->add_option("--seed", s.seed, "Override the run seed");
  app->add_option("--run-dir", s.run_dir, "Run directory holding every output")->capture_default_str();
  app->add_option("--ablation", s.global.ablations,
                  "KEY=VALUE override, repeatable. Keys: adapter_mode (none|stride4|char_only|subword), "
                  "label_mode (word|subword|subword_unk), no_speech_embedder, no_aux_wass, "
                  "include_separator, debiased")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app->footer("Environment: ZEROSWOT_THREADS caps worker threads.\n"
              "Exit codes: 0 success, 1 validation failure, 2 runtime error.");

  auto simple = [&](const char* name, const char* help, void (*fn)(const GlobalOptions&, std::ostream&)) {
    app->add_subcommand(name, help)->callback([&s, fn] {
      s.action = [&s, fn](std::ostream& out) {
        fn(s.global, out);
        return 0;
      };
    });
  };
  simple("gen-data", "Generate the synthetic corpus and vocabularies into RUN_DIR/data", GenData);
  simple("train-mt", "Train the toy MT model; writes RUN_DIR/mt", TrainMt);
  simple("train-speech", "Train the speech encoder against the frozen text branch; writes RUN_DIR/speech",
         TrainSpeech);
  simple("eval-st", "Zero-shot speech translation of the test split; writes RUN_DIR/eval/hyps.txt", EvalSt);
  simple("eval-retrieval", "Speech-to-text retrieval on the test split; writes RUN_DIR/eval/retrieval.json",
         EvalRetrieval);
  simple("eval-lengths", "Speech vs text length gaps; writes RUN_DIR/eval/lengths.json", EvalLengths);
  simple("report", "Loss curves, validation and length-ratio CSVs and PPM plots in RUN_DIR/report", Report);

  CLI::App* gc = app->add_subcommand("grad-check", "Finite-difference gradient checks; nonzero exit on failure");
  gc->add_option("--seeds", s.grad.seeds, "Random draws per check")->capture_default_str();
  gc->callback([&s] {
    s.action = [&s](std::ostream& out) { return GradCheckCommand(s.global, s.grad, out) ? 0 : 1; };
  });

  CLI::App* avg = app->add_subcommand("average-ckpt", "Average checkpoints parameter-wise");
  avg->add_option("-k", s.average.k, "Number of checkpoints to average; 0 uses train.avg_best_k");
  avg->add_option("--output", s.average_output, "Output path; defaults to RUN_DIR/speech/averaged.ckpt");
  avg->add_option("inputs", s.average_inputs, "Checkpoints; defaults to RUN_DIR/speech/best_*.ckpt");
  avg->callback([&s] {
    s.action = [&s](std::ostream& out) {
      s.average.output = s.average_output;
      s.average.inputs.assign(s.average_inputs.begin(), s.average_inputs.end());
      AverageCkpt(s.global, s.average, out);
      return 0;
    };
  });
  return app;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CliState s;
  auto app = MakeApp(s);
  try {
    app->parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app->help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app->help();
      return 0;
    }
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 1;
  }
  if (!s.config.empty()) s.global.config = s.config;
  if (app->count("--seed") > 0) s.global.seed = s.seed;
  s.global.run_dir = s.run_dir;
  try {
    return s.action(out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return ExitCodeFor(e);
  }
}

std::string HelpText() {
  CliState s;
  auto app = MakeApp(s);
  std::ostringstream os;
  os << app->help();
  for (const CLI::App* sub : app->get_subcommands({})) os << '\n' << sub->help(app->get_name());
  return os.str();
}

}  // namespace zeroswot::cli
