#pragma once

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dovetail/bell.hpp"
#include "dovetail/corpus.hpp"
#include "dovetail/distinguisher.hpp"
#include "dovetail/harness.hpp"
#include "dovetail/io.hpp"
#include "dovetail/learner.hpp"
#include "dovetail/machine.hpp"
#include "dovetail/quantum.hpp"

namespace dovetail::cli {

using nlohmann::json;

namespace detail {

inline TimeBound parse_bound(const std::string& spec) {
  if (spec == "exp") return TimeBound::exponential();
  if (spec.rfind("poly:", 0) == 0) {
    const int degree = std::stoi(spec.substr(5));
    if (degree < 1 || degree > 16) throw std::invalid_argument("bound degree out of range: " + spec);
    return TimeBound::polynomial(static_cast<unsigned>(degree));
  }
  throw std::invalid_argument("unknown bound (want exp or poly:<d>): " + spec);
}

// "coin" or "program:<corpus-name-or-raw-bits>".
inline std::unique_ptr<SequenceSource> parse_source(const std::string& spec, uint64_t seed) {
  if (spec == "coin") return std::make_unique<CoinSource>(seed);
  if (spec.rfind("program:", 0) == 0) {
    const std::string which = spec.substr(8);
    const bool raw = !which.empty() && which.find_first_not_of("01") == std::string::npos;
    return std::make_unique<ProgramSource>(raw ? Program::from_string(which)
                                               : corpus_program(which));
  }
  throw std::invalid_argument("unknown source (want coin or program:<name|bits>): " + spec);
}

inline std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

// "4" or "2..8" inclusive.
inline std::pair<unsigned, unsigned> parse_k_range(const std::string& spec) {
  const std::size_t dots = spec.find("..");
  if (dots == std::string::npos) {
    const unsigned k = static_cast<unsigned>(std::stoul(spec));
    return {k, k};
  }
  const unsigned lo = static_cast<unsigned>(std::stoul(spec.substr(0, dots)));
  const unsigned hi = static_cast<unsigned>(std::stoul(spec.substr(dots + 2)));
  if (hi < lo) throw std::invalid_argument("empty k range: " + spec);
  return {lo, hi};
}

// Loads a JSON config file: a flat object whose keys are the long option
// names of the invoked subcommand. Flags given on the command line override
// these values.
inline json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  json j = json::parse(in);
  if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  return j;
}

class ConfigApplier {
 public:
  explicit ConfigApplier(const json& j) : j_(j) {}

  template <typename T>
  ConfigApplier& set(const char* key, T& field) {
    known_.emplace_back(key);
    if (j_.contains(key)) j_.at(key).get_to(field);
    return *this;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      (void)value;
      bool found = false;
      for (const auto& k : known_) found = found || (k == key);
      if (!found) throw std::invalid_argument("unknown config key: " + key);
    }
  }

 private:
  const json& j_;
  std::vector<std::string> known_;
};

inline std::string answer_cell(Answer a) { return answer_name(a); }

}  // namespace detail

// ---------------------------------------------------------------------------

struct DistinguishOpts {
  unsigned k = 4;
  double q = 0.0;
  double r = 0.0;
  uint64_t trials = 1;
  uint64_t seed = 1;
  std::string corpus = "builtin";
  uint64_t stage_cap = 1'000'000;
  std::size_t min_program_length = 1;
  std::string out;
};

inline json to_json(const DistinguishOpts& o) {
  return json{{"k", o.k},           {"q", o.q},
              {"r", o.r},           {"trials", o.trials},
              {"seed", o.seed},     {"corpus", o.corpus},
              {"stage-cap", o.stage_cap}, {"min-program-length", o.min_program_length}};
}

inline int cmd_distinguish(const DistinguishOpts& o) {
  DistinguishConfig cfg;
  cfg.k = o.k;
  cfg.q = o.q;
  cfg.stage_cap = o.stage_cap;
  cfg.min_program_length = o.min_program_length;
  cfg.validate();
  if (o.r > 0.0 && o.q == 0.0)
    std::cerr << "note: r > 0 with q = 0 runs the exact-match protocol on noisy input\n";

  const std::vector<Program> corpus = corpus_programs(detail::split_csv_list(o.corpus));
  DovetailSearch search(cfg.k, cfg.stage_cap, cfg.min_program_length);
  const auto trials = run_distinguish_trials(search, corpus, o.trials, o.seed, cfg.q, o.r);
  const TrialSummary summary = summarize(trials);
  const double bound = error_bound(o.k);

  if (!o.out.empty()) {
    CsvWriter csv(o.out);
    csv.comment("vm=" + std::string(kVmVersion) + " config=" + to_json(o).dump());
    csv.row({"seed", "k", "q", "answer", "correct", "stage", "program_length", "bits_consumed"});
    for (const auto& t : trials)
      csv.row({std::to_string(t.seed), std::to_string(o.k), fmt_double(o.q),
               detail::answer_cell(t.answer), t.correct ? "1" : "0", std::to_string(t.stage),
               std::to_string(t.program_length), std::to_string(t.bits_consumed)});
    csv.comment("summary trials=" + std::to_string(summary.trials) +
                " errors=" + std::to_string(summary.errors) +
                " cap_exhausted=" + std::to_string(summary.cap_exhausted) +
                " error_rate=" + fmt_double(summary.error_rate) + " bound=" + fmt_double(bound));
  }
  std::cout << "trials=" << summary.trials << " errors=" << summary.errors
            << " cap_exhausted=" << summary.cap_exhausted
            << " error_rate=" << fmt_double(summary.error_rate) << " bound=" << fmt_double(bound)
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct MixtureOpts {
  std::string basis = "random";  // Z, X, or random per trial
  std::string chooser = "builtin";
  unsigned k = 4;
  double q = 0.0;
  double r = 0.0;
  uint64_t trials = 1;
  uint64_t seed = 1;
  uint64_t stage_cap = 1'000'000;
  bool improper = false;
  std::string out;
};

inline json to_json(const MixtureOpts& o) {
  return json{{"basis", o.basis},   {"chooser", o.chooser}, {"k", o.k},
              {"q", o.q},           {"r", o.r},             {"trials", o.trials},
              {"seed", o.seed},     {"stage-cap", o.stage_cap}, {"improper", o.improper}};
}

inline int cmd_mixture(const MixtureOpts& o) {
  DistinguishConfig cfg;
  cfg.k = o.k;
  cfg.q = o.q;
  cfg.stage_cap = o.stage_cap;
  cfg.validate();
  if (o.basis != "Z" && o.basis != "X" && o.basis != "random")
    throw std::invalid_argument("basis must be Z, X, or random");

  const std::vector<Program> corpus = corpus_programs(detail::split_csv_list(o.chooser));
  std::optional<CsvWriter> csv;
  if (!o.out.empty()) {
    csv.emplace(o.out);
    csv->comment("vm=" + std::string(kVmVersion) + " config=" + to_json(o).dump());
    csv->row({"trial_seed", "basis_truth", "chooser_program", "r", "k", "q", "verdict", "correct",
              "stage", "qubits_consumed"});
  }

  uint64_t correct = 0, cap_exhausted = 0;
  for (uint64_t i = 0; i < o.trials; ++i) {
    const uint64_t trial_seed = derive_seed(o.seed, i);
    SplitMix64 rng(trial_seed);
    Basis basis;
    if (o.basis == "Z")
      basis = Basis::Z;
    else if (o.basis == "X")
      basis = Basis::X;
    else if (o.improper)
      basis = Basis::Z;
    else
      basis = rng.next_bit() ? Basis::X : Basis::Z;
    const Program& chooser = corpus[i % corpus.size()];

    std::string verdict_name;
    bool trial_correct = false;
    uint64_t stage = 0;
    std::size_t qubits = 0;
    if (o.improper) {
      MixingBox proper(basis, std::make_unique<ProgramSource>(chooser), o.r);
      auto res = improper_vs_proper_experiment(std::move(proper),
                                               std::make_unique<CoinSource>(rng.next_u64()), cfg,
                                               rng.split());
      verdict_name = detail::answer_cell(res.verdict.answer);
      trial_correct = res.correct;
      stage = res.verdict.stage;
      qubits = res.verdict.bits_consumed_x;  // one qubit per proper-record bit
      cap_exhausted += res.verdict.answer == Answer::CapExhausted;
    } else {
      MixtureTrial t = run_mixture_trial(chooser, basis, o.r, cfg, rng.next_u64());
      verdict_name = detail::answer_cell(t.answer);
      trial_correct = t.correct;
      stage = t.stage;
      qubits = t.qubits_consumed;
      cap_exhausted += t.answer == Answer::CapExhausted;
    }
    correct += trial_correct;
    if (csv)
      csv->row({std::to_string(trial_seed), basis_name(basis), chooser.raw().to_string(),
                fmt_double(o.r), std::to_string(o.k), fmt_double(o.q), verdict_name,
                trial_correct ? "1" : "0", std::to_string(stage), std::to_string(qubits)});
  }
  const double rate = o.trials ? static_cast<double>(correct) / static_cast<double>(o.trials) : 0.0;
  if (csv)
    csv->comment("summary trials=" + std::to_string(o.trials) + " correct=" +
                 std::to_string(correct) + " success_rate=" + fmt_double(rate) +
                 " cap_exhausted=" + std::to_string(cap_exhausted));
  std::cout << "trials=" << o.trials << " correct=" << correct
            << " success_rate=" << fmt_double(rate) << " cap_exhausted=" << cap_exhausted << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct BellOpts {
  std::string fa = "program:alt01";
  std::string fb = "coin";
  std::string target = "pr";
  std::string bound = "exp";
  uint64_t rounds = 10'000;
  uint64_t seed = 1;
  std::string predict = "x";
  uint64_t cap = 1'000'000'000;
  uint64_t trace_step_cap = 10'000'000;
  std::size_t window = 500;
  std::string out;
  std::string report;
};

inline json to_json(const BellOpts& o) {
  return json{{"fa", o.fa},         {"fb", o.fb},
              {"target", o.target}, {"bound", o.bound},
              {"rounds", o.rounds}, {"seed", o.seed},
              {"predict", o.predict}, {"cap", o.cap},
              {"trace-step-cap", o.trace_step_cap}, {"window", o.window}};
}

inline int cmd_bell(const BellOpts& o) {
  if (o.predict != "x" && o.predict != "y")
    throw std::invalid_argument("predict must be x or y");
  const Behavior target = named_behavior(o.target);
  const TimeBound bound = detail::parse_bound(o.bound);

  auto fa = detail::parse_source(o.fa, derive_seed(o.seed, 101));
  auto fb = detail::parse_source(o.fb, derive_seed(o.seed, 102));
  BellOptions opts;
  opts.predict = o.predict == "x" ? PredictTarget::AliceInput : PredictTarget::BobInput;
  opts.learner_code_cap = o.cap;
  opts.learner_trace_step_cap = o.trace_step_cap;
  opts.window = o.window;

  BellRun run = run_bell_attack(*fa, *fb, target, bound, o.rounds, o.seed, opts);
  if (!verify_round_records(run.records, target, o.seed, opts.predict))
    throw std::logic_error("round records fail the information-flow replay check");

  if (!o.out.empty()) {
    CsvWriter csv(o.out);
    csv.comment("vm=" + std::string(kVmVersion) + " config=" + to_json(o).dump());
    csv.row({"i", "x", "y", "a", "b", "x_hat", "guess_correct", "mind_change"});
    for (const auto& r : run.records)
      csv.row({std::to_string(r.i), std::to_string(r.x), std::to_string(r.y), std::to_string(r.a),
               std::to_string(r.b), std::to_string(r.x_hat), r.guess_correct ? "1" : "0",
               r.mind_change ? "1" : "0"});
  }
  if (!o.report.empty()) {
    json rep;
    rep["vm_version"] = kVmVersion;
    rep["config"] = to_json(o);
    rep["lock_round"] = run.report.lock_round;
    rep["locked"] = run.report.locked_all_suffix;
    rep["n_rounds"] = run.report.n_rounds;
    rep["window"] = run.report.window;
    rep["s_overall"] = run.report.s_overall ? json(*run.report.s_overall) : json();
    rep["s_post_lock"] = run.report.s_post_lock ? json(*run.report.s_post_lock) : json();
    rep["post_lock_rounds"] = run.report.post_lock_rounds;
    json windows = json::array();
    for (const auto& w : run.report.s_windows) windows.push_back(w ? json(*w) : json());
    rep["s_windows"] = windows;
    rep["learner"] = {{"mind_changes", run.report.mind_changes},
                      {"abstained_rounds", run.report.abstained_rounds}};
    if (run.report.final_candidate)
      rep["learner"]["final_candidate"] = {{"e", run.report.final_candidate->e},
                                           {"c", run.report.final_candidate->c},
                                           {"code", run.report.final_candidate->code}};
    std::ofstream out(o.report, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + o.report);
    out << rep.dump(2) << "\n";
  }
  std::cout << "lock_round=" << run.report.lock_round
            << " post_lock_rounds=" << run.report.post_lock_rounds << " s_post_lock="
            << (run.report.s_post_lock ? fmt_double(*run.report.s_post_lock) : "undefined")
            << " mind_changes=" << run.report.mind_changes << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct LearnOpts {
  std::string stream = "program:zeros";
  std::string bound = "exp";
  uint64_t rounds = 100;
  uint64_t cap = 100'000;
  uint64_t trace_step_cap = 10'000'000;
  uint64_t seed = 1;
  std::string out;
};

inline json to_json(const LearnOpts& o) {
  return json{{"stream", o.stream}, {"bound", o.bound},
              {"rounds", o.rounds}, {"cap", o.cap},
              {"trace-step-cap", o.trace_step_cap}, {"seed", o.seed}};
}

inline int cmd_learn(const LearnOpts& o) {
  LearnerConfig cfg;
  cfg.bound = detail::parse_bound(o.bound);
  cfg.code_cap = o.cap;
  cfg.trace_step_cap = o.trace_step_cap;
  auto stream = detail::parse_source(o.stream, derive_seed(o.seed, 103));
  PredictTrace trace = predict_stream(*stream, cfg, o.rounds);

  if (!o.out.empty()) {
    CsvWriter csv(o.out);
    csv.comment("vm=" + std::string(kVmVersion) + " config=" + to_json(o).dump());
    csv.row({"round", "prediction", "actual", "correct", "candidate_e", "candidate_c",
             "mind_change"});
    for (const auto& row : trace.rows)
      csv.row({std::to_string(row.round), std::to_string(row.played), std::to_string(row.actual),
               row.correct ? "1" : "0",
               row.candidate ? std::to_string(row.candidate->e) : "",
               row.candidate ? std::to_string(row.candidate->c) : "",
               row.mind_change ? "1" : "0"});
    csv.comment("summary rounds=" + std::to_string(o.rounds) +
                " correct=" + std::to_string(trace.correct_count) +
                " mind_changes=" + std::to_string(trace.mind_change_count) +
                " abstained=" + std::to_string(trace.abstain_count) + " last_incorrect=" +
                (trace.last_incorrect ? std::to_string(*trace.last_incorrect) : "none"));
  }
  std::cout << "rounds=" << o.rounds << " correct=" << trace.correct_count
            << " mind_changes=" << trace.mind_change_count
            << " abstained=" << trace.abstain_count << " last_incorrect="
            << (trace.last_incorrect ? std::to_string(*trace.last_incorrect) : "none")
            << " stabilized_at="
            << (trace.stabilized_at ? std::to_string(*trace.stabilized_at) : "none") << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct BoundsOpts {
  std::string k = "4";
  double q = 0.0;
  bool scan_q = false;
  double grid = 0.005;
  unsigned kmax = 200;
};

inline int cmd_bounds(const BoundsOpts& o) {
  if (o.scan_q) {
    std::cout << "q,decays\n";
    for (double q = o.grid; q < 0.5; q += o.grid)
      std::cout << fmt_double(q) << "," << (noisy_bound_decays(q) ? "1" : "0") << "\n";
    std::cout << "threshold=" << fmt_double(noisy_decay_threshold(o.grid)) << "\n";
    return 0;
  }
  const auto [lo, hi] = detail::parse_k_range(o.k);
  if (lo < 2) throw std::domain_error("k must be >= 2");
  if (o.q == 0.0) {
    std::cout << "k,bound\n";
    for (unsigned k = lo; k <= hi && k <= o.kmax; ++k)
      std::cout << k << "," << fmt_double(error_bound(k)) << "\n";
  } else {
    std::cout << "k,ratio,bound\n";
    for (unsigned k = lo; k <= hi && k <= o.kmax; ++k) {
      const NoisyBound b = noisy_error_bound(k, o.q);
      std::cout << k << "," << fmt_double(b.ratio) << ","
                << (b.divergent ? "divergent" : fmt_double(b.value)) << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args) {
  CLI::App app{"dovetail: computable-mixture distinguishing and the Bell computability loophole"};
  app.require_subcommand(1);
  app.fallthrough();  // lets --config appear after the subcommand name
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with option defaults (flags override)");

  DistinguishOpts d;
  MixtureOpts m;
  BellOpts b;
  LearnOpts l;
  BoundsOpts bo;

  // Phase one: locate --config and the subcommand, and fold the file's
  // values into the defaults before CLI11 sees the flags.
  try {
    std::string sub_name;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
      if (sub_name.empty() && !args[i].empty() && args[i][0] != '-') sub_name = args[i];
    }
    if (!config_path.empty()) {
      const json j = detail::load_config_file(config_path);
      detail::ConfigApplier apply(j);
      if (sub_name == "distinguish") {
        apply.set("k", d.k)
            .set("q", d.q)
            .set("r", d.r)
            .set("trials", d.trials)
            .set("seed", d.seed)
            .set("corpus", d.corpus)
            .set("stage-cap", d.stage_cap)
            .set("min-program-length", d.min_program_length)
            .set("out", d.out);
      } else if (sub_name == "mixture") {
        apply.set("basis", m.basis)
            .set("chooser", m.chooser)
            .set("k", m.k)
            .set("q", m.q)
            .set("r", m.r)
            .set("trials", m.trials)
            .set("seed", m.seed)
            .set("stage-cap", m.stage_cap)
            .set("improper", m.improper)
            .set("out", m.out);
      } else if (sub_name == "bell") {
        apply.set("fa", b.fa)
            .set("fb", b.fb)
            .set("target", b.target)
            .set("bound", b.bound)
            .set("rounds", b.rounds)
            .set("seed", b.seed)
            .set("predict", b.predict)
            .set("cap", b.cap)
            .set("trace-step-cap", b.trace_step_cap)
            .set("window", b.window)
            .set("out", b.out)
            .set("report", b.report);
      } else if (sub_name == "learn") {
        apply.set("stream", l.stream)
            .set("bound", l.bound)
            .set("rounds", l.rounds)
            .set("cap", l.cap)
            .set("trace-step-cap", l.trace_step_cap)
            .set("seed", l.seed)
            .set("out", l.out);
      } else if (sub_name == "bounds") {
        apply.set("k", bo.k)
            .set("q", bo.q)
            .set("scan-q", bo.scan_q)
            .set("grid", bo.grid)
            .set("kmax", bo.kmax);
      } else {
        throw std::invalid_argument("--config requires a known subcommand");
      }
      apply.finish();
    }
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  auto* sd = app.add_subcommand("distinguish", "dovetail search: computable stream vs fair coin");
  sd->add_option("--k", d.k, "prefix multiplier (>= 2)")->capture_default_str();
  sd->add_option("--q", d.q, "tolerated flip fraction in [0, 1/2)")->capture_default_str();
  sd->add_option("--r", d.r, "actual flip rate applied to the computable side")
      ->capture_default_str();
  sd->add_option("--trials", d.trials, "number of seeded trials")->capture_default_str();
  sd->add_option("--seed", d.seed, "master seed")->capture_default_str();
  sd->add_option("--corpus", d.corpus, "builtin or comma-separated program names")
      ->capture_default_str();
  sd->add_option("--stage-cap", d.stage_cap, "dovetail stage cap")->capture_default_str();
  sd->add_option("--min-program-length", d.min_program_length, "skip shorter programs")
      ->capture_default_str();
  sd->add_option("--out", d.out, "per-trial CSV path");

  auto* sm = app.add_subcommand("mixture", "preparation-basis experiment on the mixing box");
  sm->add_option("--basis", m.basis, "Z, X, or random")->capture_default_str();
  sm->add_option("--chooser", m.chooser, "builtin or comma-separated program names")
      ->capture_default_str();
  sm->add_option("--k", m.k)->capture_default_str();
  sm->add_option("--q", m.q)->capture_default_str();
  sm->add_option("--r", m.r, "flip noise on recorded bits")->capture_default_str();
  sm->add_option("--trials", m.trials)->capture_default_str();
  sm->add_option("--seed", m.seed)->capture_default_str();
  sm->add_option("--stage-cap", m.stage_cap)->capture_default_str();
  sm->add_flag("--improper", m.improper, "proper computable mixture vs improper (coin) mixture");
  sm->add_option("--out", m.out, "per-trial CSV path");

  auto* sb = app.add_subcommand("bell", "CHSH rounds against learner-driven deterministic boxes");
  sb->add_option("--fa", b.fa, "Alice input source (coin or program:<name|bits>)")
      ->capture_default_str();
  sb->add_option("--fb", b.fb, "Bob input source")->capture_default_str();
  sb->add_option("--target", b.target, "local, uniform, pr, or quantum")->capture_default_str();
  sb->add_option("--bound", b.bound, "Eve's time class bound: exp or poly:<d>")
      ->capture_default_str();
  sb->add_option("--rounds", b.rounds)->capture_default_str();
  sb->add_option("--seed", b.seed)->capture_default_str();
  sb->add_option("--predict", b.predict, "which input Eve predicts: x or y")
      ->capture_default_str();
  sb->add_option("--cap", b.cap, "learner code cap")->capture_default_str();
  sb->add_option("--trace-step-cap", b.trace_step_cap)->capture_default_str();
  sb->add_option("--window", b.window, "disjoint window size for the S trace")
      ->capture_default_str();
  sb->add_option("--out", b.out, "round CSV path");
  sb->add_option("--report", b.report, "report JSON path");

  auto* sl = app.add_subcommand("learn", "next-value prediction trace on a stream");
  sl->add_option("--stream", l.stream, "coin or program:<name|bits>")->capture_default_str();
  sl->add_option("--bound", l.bound, "exp or poly:<d>")->capture_default_str();
  sl->add_option("--rounds", l.rounds)->capture_default_str();
  sl->add_option("--cap", l.cap, "code enumeration cap")->capture_default_str();
  sl->add_option("--trace-step-cap", l.trace_step_cap)->capture_default_str();
  sl->add_option("--seed", l.seed)->capture_default_str();
  sl->add_option("--out", l.out, "trace CSV path");

  auto* sbo = app.add_subcommand("bounds", "closed-form error bounds");
  sbo->add_option("--k", bo.k, "single value or lo..hi range")->capture_default_str();
  sbo->add_option("--q", bo.q, "noise tolerance (0 = noiseless bound)")->capture_default_str();
  sbo->add_flag("--scan-q", bo.scan_q, "scan the decay threshold over a q grid");
  sbo->add_option("--grid", bo.grid, "q grid step")->capture_default_str();
  sbo->add_option("--kmax", bo.kmax)->capture_default_str();

  std::vector<const char*> argv;
  argv.push_back("dovetail");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (sd->parsed()) return cmd_distinguish(d);
    if (sm->parsed()) return cmd_mixture(m);
    if (sb->parsed()) return cmd_bell(b);
    if (sl->parsed()) return cmd_learn(l);
    if (sbo->parsed()) return cmd_bounds(bo);
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::logic_error& e) {
    std::cerr << "internal invariant failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace dovetail::cli
