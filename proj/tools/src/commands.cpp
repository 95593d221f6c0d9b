// Copyright 2026 The ZeroSwot-Desk Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "grad_suite.hpp"
#include "plot.hpp"
#include "run_config.hpp"
#include "zeroswot/checkpoint.hpp"
#include "zeroswot/error.hpp"
#include "zeroswot/inference.hpp"

namespace zeroswot::cli {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

class RunLock {
 public:
  explicit RunLock(const fs::path& dir) {
    const fs::path path = dir / ".lock";
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::kIo, "cannot open " + path.string() + ": " + std::strerror(errno));
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw Error(ErrorCode::kIo, "run directory " + dir.string() + " is locked by another process");
    }
  }
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;
  ~RunLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }

 private:
  int fd_ = -1;
};

struct Run {
  RunConfig cfg;
  ToyTask task;
  fs::path dir;
  std::unique_ptr<RunLock> lock;

  fs::path DataDir() const { return cfg.paths.data_dir.empty() ? dir / "data" : fs::path(cfg.paths.data_dir); }
  fs::path MtCheckpoint() const {
    return cfg.paths.mt_checkpoint.empty() ? dir / "mt" / "model.ckpt" : fs::path(cfg.paths.mt_checkpoint);
  }
  fs::path SpeechDir() const { return dir / "speech"; }
  fs::path EvalDir() const { return dir / "eval"; }
};

Run OpenRun(const GlobalOptions& opts) {
  Run run;
  run.dir = opts.run_dir;
  fs::create_directories(run.dir);
  run.lock = std::make_unique<RunLock>(run.dir);
  const fs::path echo = run.dir / "config.json";
  if (opts.config) {
    run.cfg = LoadRunConfig(*opts.config);
  } else if (fs::exists(echo)) {
    run.cfg = LoadRunConfig(echo);
  }
  if (opts.seed) run.cfg.seed = *opts.seed;
  for (const std::string& a : opts.ablations) ApplyAblation(run.cfg, a);
  run.task = BuildToyTask(run.cfg.generator);
  FinalizeConfig(run.cfg, run.task.letters.size(), run.task.subwords.size());
  run.cfg.train.threads = ThreadsFromEnv(1);
  std::ofstream os(echo, std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + echo.string());
  os << ToJson(run.cfg).dump(2) << '\n';
  return run;
}

[[noreturn]] void Missing(const fs::path& path, std::string_view command) {
  throw Error(ErrorCode::kMissingArtifact,
              path.string() + " not found; run `zeroswot " + std::string(command) + "` first");
}

std::ofstream OpenOut(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return os;
}

void WriteJson(const fs::path& path, const json& j) { OpenOut(path) << j.dump(2) << '\n'; }

std::string Hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::vector<SyntheticExample> LoadSplit(const Run& run, std::string_view name) {
  const fs::path dir = run.DataDir();
  const fs::path path = dir / (std::string(name) + ".jsonl");
  if (!fs::exists(path)) Missing(path, "gen-data");
  for (const char* f : {"letters.vocab", "subwords.vocab"}) {
    if (!fs::exists(dir / f)) Missing(dir / f, "gen-data");
  }
  if (LetterVocab::Load(dir / "letters.vocab").symbols() != run.task.letters.symbols() ||
      SubwordVocab::Load(dir / "subwords.vocab").subwords() != run.task.subwords.subwords()) {
    throw Error(ErrorCode::kManifestMismatch,
                "vocabularies in " + dir.string() + " do not match the configured generator");
  }
  return ReadCorpus(path);
}

MtModel LoadMt(const Run& run) {
  const fs::path path = run.MtCheckpoint();
  if (!fs::exists(path)) Missing(path, "train-mt");
  MtModel mt = InitMtModel(run.cfg.model, run.cfg.mt.seed);
  AssignCheckpoint(Parameters(mt), ReadCheckpoint(path));
  return mt;
}

SpeechEncoder LoadSpeech(const Run& run, const MtModel& mt) {
  const fs::path path = run.SpeechDir() / "model.ckpt";
  if (!fs::exists(path)) Missing(path, "train-speech");
  SpeechEncoder enc = InitSpeechEncoder(run.cfg.model, mt.text, run.cfg.train.seed);
  AssignCheckpoint(Parameters(enc), ReadCheckpoint(path));
  return enc;
}

std::uint64_t HashOf(std::vector<Parameter*> params) { return HashParameters(params); }

std::uint64_t EmbedderHash(SpeechEncoder& enc) {
  return HashOf({&enc.embedder.eps_lang, &enc.embedder.eps_eos});
}

// Final shared-encoder states; falls back to the uncompressed path when the
// adapter finds no chunks.
Tensor EvalEncode(const MtModel& mt, const SpeechEncoder& enc, const SpeechContext& ctx,
                  const Tensor& frames, bool* fallback) {
  *fallback = false;
  try {
    return ZeroShotEncode(ZeroShotModel{&mt, &enc}, ctx, frames);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoChunks && e.code() != ErrorCode::kNoCharacters) throw;
  }
  Graph g(false);
  const int last = ctx.model_cfg.shared_layers;
  EncoderOutput out = SpeechForward(g, enc, mt.text, ctx, frames, std::span(&last, 1), fallback);
  return out.final.value();
}

std::string JoinPieces(const std::vector<int>& ids, const SubwordVocab& vocab) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ' ';
    s += vocab.piece(ids[i]);
  }
  return s;
}

json LengthJson(const LengthSummary& s) {
  json rows = json::array();
  for (const LengthRow& r : s.rows) {
    rows.push_back(json{{"id", r.id},
                        {"speech_len", r.speech_len},
                        {"text_len", r.text_len},
                        {"abs_diff", r.abs_diff},
                        {"ratio", r.ratio}});
  }
  return json{{"mean_abs_diff", s.mean_abs_diff},
              {"mean_ratio", s.mean_ratio},
              {"no_chunks", s.no_chunks},
              {"rows", rows}};
}

std::vector<json> ReadJsonLines(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<json> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
    }
  }
  return out;
}

double NumberOr(const json& j, const char* key) {
  const auto it = j.find(key);
  return it != j.end() && it->is_number() ? it->get<double>() : std::nan("");
}

}  // namespace

void GenData(const GlobalOptions& opts, std::ostream& log) {
  Run run = OpenRun(opts);
  const CorpusSizes& n = run.cfg.corpus;
  const std::size_t total = n.train + n.valid + n.test;
  const double d = static_cast<double>(total);
  const double fractions[] = {static_cast<double>(n.train) / d, static_cast<double>(n.valid) / d,
                              static_cast<double>(n.test) / d};
  auto corpus = GenerateCorpus(run.cfg.generator, run.task, total, MixSeed(run.cfg.seed, 0xDA7A));
  CorpusSplit split = SplitCorpus(std::move(corpus), fractions, MixSeed(run.cfg.seed, 0x5B17));
  const fs::path dir = run.DataDir();
  fs::create_directories(dir);
  WriteCorpus(dir / "train.jsonl", split.train);
  WriteCorpus(dir / "valid.jsonl", split.valid);
  WriteCorpus(dir / "test.jsonl", split.test);
  run.task.letters.Save(dir / "letters.vocab");
  run.task.subwords.Save(dir / "subwords.vocab");
  log << "gen-data: " << split.train.size() << "/" << split.valid.size() << "/" << split.test.size()
      << " examples in " << dir.string() << "\n";
}

void TrainMt(const GlobalOptions& opts, std::ostream& log) {
  Run run = OpenRun(opts);
  const auto train = LoadSplit(run, "train");
  const auto valid = LoadSplit(run, "valid");
  const auto test = LoadSplit(run, "test");
  const fs::path dir = run.dir / "mt";
  std::ofstream metrics = OpenOut(dir / "metrics.jsonl");
  const auto tv = MtView(train);
  const auto vv = MtView(valid);
  MtTrainResult res = TrainToyMt(tv, vv, run.task.subwords, run.cfg.model, run.cfg.mt, &metrics);
  metrics.close();
  WriteCheckpoint(dir / "model.ckpt", Parameters(res.model));

  TokenAccuracy acc;
  for (const SyntheticExample& ex : test) {
    const Tensor enc = TextEncode(res.model, run.task.subwords, ex.transcription, run.cfg.model);
    const auto hyp = StripEos(GreedyTranslate(res.model, enc, run.task.subwords, run.cfg.model.heads,
                                              run.cfg.eval.max_len),
                              run.task.subwords);
    acc.Add(hyp, ex.translation);
  }
  WriteJson(dir / "report.json", json{{"steps", run.cfg.mt.steps},
                                      {"valid_teacher_forced_accuracy", res.valid_accuracy},
                                      {"test_examples", test.size()},
                                      {"test_greedy_token_accuracy", acc.value()}});
  log << "train-mt: greedy token accuracy " << acc.value() << " on " << test.size()
      << " test pairs\n";
}

void TrainSpeech(const GlobalOptions& opts, std::ostream& log) {
  Run run = OpenRun(opts);
  const auto train = LoadSplit(run, "train");
  auto valid = LoadSplit(run, "valid");
  if (valid.size() > static_cast<std::size_t>(run.cfg.valid_examples)) {
    valid.resize(static_cast<std::size_t>(run.cfg.valid_examples));
  }
  MtModel mt = LoadMt(run);
  const std::uint64_t text_before = HashOf(Parameters(mt.text));
  SpeechEncoder init = InitSpeechEncoder(run.cfg.model, mt.text, run.cfg.train.seed);
  const std::uint64_t eps_before = EmbedderHash(init);

  const fs::path dir = run.SpeechDir();
  fs::create_directories(dir);
  const auto tv = AsrView(train);
  const auto vv = AsrView(valid);
  std::unique_ptr<TextTargetStore> targets;
  if (run.cfg.offline_targets) {
    std::vector<AsrPair> all(tv);
    all.insert(all.end(), vv.begin(), vv.end());
    const std::size_t n = ExtractTextTargets(all, mt.text, run.task.subwords, run.cfg.model, dir / "targets");
    log << "train-speech: extracted text targets for " << n << " transcriptions\n";
    targets = std::make_unique<OfflineTargets>(dir / "targets");
  } else {
    targets = std::make_unique<OnlineTargets>(mt.text, run.task.subwords, run.cfg.model);
  }

  const SpeechContext ctx{run.cfg.model, run.cfg.train, run.task.letters, run.task.subwords};
  std::ofstream metrics = OpenOut(dir / "metrics.jsonl");
  std::ofstream validation = OpenOut(dir / "valid.jsonl");
  SpeechTrainResult res = TrainSpeechEncoder(tv, vv, mt.text, *targets, ctx, &metrics, &validation);
  metrics.close();
  validation.close();

  for (std::size_t i = 0; i < res.best_snapshots.size(); ++i) {
    WriteCheckpoint(dir / ("best_" + std::to_string(i) + ".ckpt"), std::span<const Parameter>(res.best_snapshots[i]));
  }
  WriteCheckpoint(dir / "model.ckpt", Parameters(res.model));

  int fallbacks = 0;
  const double final_wass = vv.empty() ? std::nan("")
                                       : ValidationWasserstein(res.model, mt.text, ctx, vv, *targets, &fallbacks);
  const double w0 = res.validation.empty() ? std::nan("") : res.validation.front().wass_final;
  const double drop = (w0 - final_wass) / std::abs(w0);
  const std::uint64_t text_after = HashOf(Parameters(mt.text));
  const std::uint64_t eps_after = EmbedderHash(res.model);
  WriteJson(dir / "report.json",
            json{{"steps_run", res.steps_run},
                 {"early_stopped", res.early_stopped},
                 {"skipped_infeasible", res.skipped_infeasible},
                 {"averaged_snapshots", res.best_snapshots.size()},
                 {"valid_wass_step0", w0},
                 {"valid_wass_final", final_wass},
                 {"valid_fallback_uncompressed", fallbacks},
                 {"valid_wass_drop_fraction", drop},
                 {"text_branch_hash_before", Hex(text_before)},
                 {"text_branch_hash_after", Hex(text_after)},
                 {"embedder_hash_before", Hex(eps_before)},
                 {"embedder_hash_after", Hex(eps_after)},
                 {"frozen_unchanged", text_before == text_after && eps_before == eps_after}});
  log << "train-speech: " << res.steps_run << " steps, validation Wasserstein " << w0 << " -> "
      << final_wass << "\n";
}

void EvalSt(const GlobalOptions& opts, std::ostream& log) {
  Run run = OpenRun(opts);
  const auto test = LoadSplit(run, "test");
  MtModel mt = LoadMt(run);
  SpeechEncoder enc = LoadSpeech(run, mt);
  const SpeechContext ctx{run.cfg.model, run.cfg.train, run.task.letters, run.task.subwords};
  std::ofstream hyps = OpenOut(run.EvalDir() / "hyps.txt");
  TokenAccuracy acc;
  int fallbacks = 0;
  for (const SyntheticExample& ex : test) {
    bool fallback = false;
    const Tensor h = EvalEncode(mt, enc, ctx, ex.frames, &fallback);
    fallbacks += fallback;
    const auto beams = BeamSearch(mt, h, run.task.subwords, run.cfg.model.heads, run.cfg.eval.beam,
                                  run.cfg.eval.max_len);
    const auto hyp = beams.empty() ? std::vector<int>{} : StripEos(beams.front().tokens, run.task.subwords);
    acc.Add(hyp, ex.translation);
    hyps << JoinPieces(hyp, run.task.subwords) << '\n';
  }
  hyps.close();
  WriteJson(run.EvalDir() / "st_report.json", json{{"examples", test.size()},
                                                   {"beam", run.cfg.eval.beam},
                                                   {"token_accuracy", acc.value()},
                                                   {"correct_tokens", acc.correct},
                                                   {"total_tokens", acc.total},
                                                   {"fallback_uncompressed", fallbacks}});
  log << "eval-st: token accuracy " << acc.value() << " on " << test.size() << " examples\n";
}

void EvalRetrieval(const GlobalOptions& opts, std::ostream& log) {
  Run run = OpenRun(opts);
  const auto test = LoadSplit(run, "test");
  MtModel mt = LoadMt(run);
  SpeechEncoder enc = LoadSpeech(run, mt);
  const SpeechContext ctx{run.cfg.model, run.cfg.train, run.task.letters, run.task.subwords};
  std::vector<Tensor> speech, text;
  std::vector<std::string> ids;
  int fallbacks = 0;
  for (const SyntheticExample& ex : test) {
    bool fallback = false;
    speech.push_back(EvalEncode(mt, enc, ctx, ex.frames, &fallback));
    fallbacks += fallback;
    text.push_back(TextEncode(mt, run.task.subwords, ex.transcription, run.cfg.model));
    ids.push_back(ex.id);
  }
  json metrics = json::array();
  for (RetrievalMetric m : {RetrievalMetric::kWasserstein, RetrievalMetric::kCosineMeanpool}) {
    const RetrievalReport r = Retrieve(speech, text, ids, m, run.cfg.train.ot, run.cfg.train.threads);
    metrics.push_back(json{{"metric", ToString(m)}, {"accuracy", r.accuracy}, {"mismatches", r.mismatches}});
    log << "eval-retrieval: " << ToString(m) << " accuracy " << r.accuracy << "\n";
  }
  WriteJson(run.EvalDir() / "retrieval.json", json{{"examples", test.size()},
                                                   {"fallback_uncompressed", fallbacks},
                                                   {"metrics", metrics}});
}

void EvalLengths(const GlobalOptions& opts, std::ostream& log) {
  Run run = OpenRun(opts);
  const auto test = LoadSplit(run, "test");
  MtModel mt = LoadMt(run);
  SpeechEncoder enc = LoadSpeech(run, mt);
  const SpeechContext ctx{run.cfg.model, run.cfg.train, run.task.letters, run.task.subwords};
  std::vector<const SyntheticExample*> ptrs;
  for (const SyntheticExample& ex : test) ptrs.push_back(&ex);
  const LengthSummary trained = LengthReport(ptrs, enc, ctx, false);
  const LengthSummary oracle = LengthReport(ptrs, enc, ctx, true);
  WriteJson(run.EvalDir() / "lengths.json",
            json{{"adapter_mode", ToString(run.cfg.train.adapter)},
                 {"no_speech_embedder", run.cfg.train.no_speech_embedder},
                 {"trained", LengthJson(trained)},
                 {"oracle", LengthJson(oracle)}});
  log << "eval-lengths: mean ratio " << trained.mean_ratio << " (oracle " << oracle.mean_ratio
      << "), mean |diff| " << trained.mean_abs_diff << "\n";
}

bool GradCheckCommand(const GlobalOptions& opts, const GradCheckOptions& gc, std::ostream& out) {
  Run run = OpenRun(opts);
  if (gc.seeds < 1) throw Error(ErrorCode::kConfigInvalid, "--seeds must be >= 1");
  const auto rows = RunGradCheckSuite(run.cfg.seed, gc.seeds);
  bool ok = true;
  json table = json::array();
  out << std::left << std::setw(24) << "op" << std::setw(16) << "max_rel_error" << std::setw(10)
      << "elements" << std::setw(7) << "seeds" << "status\n";
  for (const GradCheckRow& r : rows) {
    const bool pass = r.max_rel_error <= kGradCheckTolerance;
    ok = ok && pass;
    std::ostringstream err;
    err << std::scientific << std::setprecision(3) << r.max_rel_error;
    out << std::setw(24) << r.op << std::setw(16) << err.str() << std::setw(10) << r.elements
        << std::setw(7) << r.seeds << (pass ? "ok" : "FAIL") << '\n';
    table.push_back(json{{"op", r.op},
                         {"max_rel_error", r.max_rel_error},
                         {"elements", r.elements},
                         {"seeds", r.seeds},
                         {"pass", pass}});
  }
  WriteJson(run.dir / "grad_check.json",
            json{{"tolerance", kGradCheckTolerance}, {"pass", ok}, {"checks", table}});
  return ok;
}

void AverageCkpt(const GlobalOptions& opts, const AverageOptions& avg, std::ostream& log) {
  Run run = OpenRun(opts);
  std::vector<fs::path> inputs = avg.inputs;
  if (inputs.empty()) {
    const int k = avg.k > 0 ? avg.k : run.cfg.train.avg_best_k;
    for (int i = 0; i < k; ++i) {
      const fs::path p = run.SpeechDir() / ("best_" + std::to_string(i) + ".ckpt");
      if (!fs::exists(p)) break;
      inputs.push_back(p);
    }
    if (inputs.empty()) Missing(run.SpeechDir() / "best_0.ckpt", "train-speech");
  } else if (avg.k > 0 && static_cast<std::size_t>(avg.k) < inputs.size()) {
    inputs.resize(static_cast<std::size_t>(avg.k));
  }
  std::vector<std::vector<Parameter>> ckpts;
  for (const fs::path& p : inputs) {
    if (!fs::exists(p)) Missing(p, "train-speech");
    ckpts.push_back(ReadCheckpoint(p));
  }
  const fs::path output = avg.output.empty() ? run.SpeechDir() / "averaged.ckpt" : avg.output;
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  WriteCheckpoint(output, std::span<const Parameter>(AverageCheckpoints(ckpts)));
  log << "average-ckpt: averaged " << ckpts.size() << " checkpoints into " << output.string() << "\n";
}

void Report(const GlobalOptions& opts, std::ostream& log) {
  Run run = OpenRun(opts);
  const fs::path metrics_path = run.SpeechDir() / "metrics.jsonl";
  if (!fs::exists(metrics_path)) Missing(metrics_path, "train-speech");
  const fs::path out = run.dir / "report";
  fs::create_directories(out);

  const std::vector<int> taps = EffectiveWeights(run.cfg.train, run.cfg.model.shared_layers).taps;
  const auto rows = ReadJsonLines(metrics_path);
  std::vector<Series> curves(3 + taps.size());
  curves[0].name = "loss_total";
  curves[1].name = "loss_ctc";
  curves[2].name = "lr";
  for (std::size_t t = 0; t < taps.size(); ++t) curves[3 + t].name = "wass_" + std::to_string(taps[t]);
  {
    std::ofstream csv = OpenOut(out / "loss_curves.csv");
    csv << "step,lr,loss_total,loss_ctc";
    for (int l : taps) csv << ",wass_" << l;
    csv << ",skipped_infeasible\n";
    csv << std::setprecision(17);
    for (const json& r : rows) {
      const double step = NumberOr(r, "step");
      csv << r.value("step", 0) << ',' << NumberOr(r, "lr") << ',' << NumberOr(r, "loss_total") << ','
          << NumberOr(r, "loss_ctc");
      const std::pair<const char*, int> fixed[] = {{"loss_total", 0}, {"loss_ctc", 1}, {"lr", 2}};
      for (const auto& [key, idx] : fixed) {
        curves[static_cast<std::size_t>(idx)].x.push_back(step);
        curves[static_cast<std::size_t>(idx)].y.push_back(NumberOr(r, key));
      }
      const json wass = r.value("loss_wass_per_layer", json::object());
      for (std::size_t t = 0; t < taps.size(); ++t) {
        const double v = NumberOr(wass, std::to_string(taps[t]).c_str());
        csv << ',' << v;
        curves[3 + t].x.push_back(step);
        curves[3 + t].y.push_back(v);
      }
      csv << ',' << r.value("skipped_infeasible", 0) << '\n';
    }
  }
  // lr lives on a different scale; keep the loss plot to loss terms.
  std::vector<Series> loss_curves;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (i != 2) loss_curves.push_back(curves[i]);
  }
  WriteLinePlot(out / "loss_curves.ppm", loss_curves);

  {
    const fs::path vpath = run.SpeechDir() / "valid.jsonl";
    std::ofstream csv = OpenOut(out / "validation.csv");
    csv << "step,valid_wass_final,fallback_uncompressed\n" << std::setprecision(17);
    Series s{"valid_wass_final", {}, {}};
    if (fs::exists(vpath)) {
      for (const json& r : ReadJsonLines(vpath)) {
        csv << r.value("step", 0) << ',' << NumberOr(r, "valid_wass_final") << ','
            << r.value("fallback_uncompressed", 0) << '\n';
        s.x.push_back(NumberOr(r, "step"));
        s.y.push_back(NumberOr(r, "valid_wass_final"));
      }
    }
    WriteLinePlot(out / "validation.ppm", {s});
  }

  {
    const fs::path lpath = run.EvalDir() / "lengths.json";
    std::ofstream csv = OpenOut(out / "length_ratios.csv");
    csv << "id,speech_len,text_len,abs_diff,ratio\n" << std::setprecision(17);
    std::vector<double> ratios;
    if (fs::exists(lpath)) {
      std::ifstream is(lpath);
      const json doc = json::parse(is);
      for (const json& r : doc.at("trained").at("rows")) {
        csv << r.at("id").get<std::string>() << ',' << r.at("speech_len").get<std::size_t>() << ','
            << r.at("text_len").get<std::size_t>() << ',' << r.at("abs_diff").get<double>() << ','
            << r.at("ratio").get<double>() << '\n';
        ratios.push_back(r.at("ratio").get<double>());
      }
    }
    WriteHistogram(out / "length_ratios.ppm", ratios);
  }
  log << "report: wrote " << rows.size() << " logged steps to " << out.string() << "\n";
}

int ExitCodeFor(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->code()) {
      case ErrorCode::kConfigInvalid:
      case ErrorCode::kMissingArtifact:
      case ErrorCode::kManifestMismatch:
      case ErrorCode::kBadFractions:
        return 1;
      default:
        return 2;
    }
  }
  return 2;
}

}  // namespace zeroswot::cli
