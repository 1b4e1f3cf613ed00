/*
 * Copyright 2026 The dlt-recovery Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "dltr/errors.hpp"
#include "dltr/gossip.hpp"
#include "dltr/report.hpp"
#include "dltr/scenario.hpp"
#include "dltr/stake.hpp"
#include "dltr/training.hpp"
#include "dltr/utfm_io.hpp"

namespace fs = std::filesystem;
using namespace dltr;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kRuntimeError = 2;
constexpr int kUsage = 64;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("dlt-recovery");
  logger->set_pattern("%^%l%$: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("DLT_RECOVERY_LOG")) {
    const std::string v = env;
    if (v == "error") {
      spdlog::set_level(spdlog::level::err);
    } else if (v == "debug") {
      spdlog::set_level(spdlog::level::debug);
    } else if (v != "info") {
      spdlog::warn("ignoring DLT_RECOVERY_LOG={}; expected error, info or debug", v);
    }
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Outputs are staged next to their destination and renamed into place only
// once every output of the command has been produced.
class OutputSet {
 public:
  void add(const std::string& path, std::string content) {
    if (!path.empty()) files_.emplace_back(path, std::move(content));
  }

  void commit() {
    std::vector<std::pair<fs::path, fs::path>> staged;
    for (const auto& [path, content] : files_) {
      fs::path tmp = path + ".tmp";
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << content;
      out.close();
      if (!out) {
        for (auto& [t, p] : staged) fs::remove(t);
        fs::remove(tmp);
        throw std::runtime_error("cannot write '" + path + "'");
      }
      staged.emplace_back(tmp, path);
    }
    for (auto& [tmp, path] : staged) fs::rename(tmp, path);
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

Scenario load_input_scenario(const std::string& path) {
  try {
    return load_scenario(path);
  } catch (const std::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

struct RunArgs {
  std::string scenario, report, graph, transcript, summary;
  std::optional<std::uint64_t> seed;
};

int cmd_run(const RunArgs& args) {
  Scenario sc = load_input_scenario(args.scenario);
  if (args.seed) sc.sim.seed = *args.seed;

  const SimResult result = run_simulation(sc.sim);
  std::size_t view = 0;
  while (view < result.honest.size() && !result.honest[view]) ++view;
  const Hashgraph& g = result.replicas.at(view);

  OutputSet outputs;
  outputs.add(args.report, report_csv(report_rows(g)));
  outputs.add(args.graph, graph_export(g));
  outputs.add(args.summary, format_report(result.report));
  if (!args.transcript.empty()) {
    std::string lines;
    for (const auto& s : result.syncs) lines += transcript_line(s) + "\n";
    outputs.add(args.transcript, std::move(lines));
  }
  outputs.commit();

  const auto& r = result.report;
  spdlog::info("{} events, {}/{} transactions ordered, first consensus at {}", r.events_created,
               r.transactions_ordered, r.transactions_queued,
               r.time_to_first_consensus_ms ? std::to_string(*r.time_to_first_consensus_ms) + " ms" : "never");
  return kOk;
}

struct ScalingArgs {
  std::string scenario, out;
  std::size_t min_roles = 4;
  std::size_t max_roles = 11;
  std::optional<std::uint64_t> seed;
};

int cmd_scaling(const ScalingArgs& args) {
  if (args.min_roles < 2 || args.min_roles > args.max_roles || args.max_roles > kRoles.size()) {
    spdlog::error("role range must satisfy 2 <= --min-roles <= --max-roles <= {}", kRoles.size());
    return kUsage;
  }
  Scenario sc = load_input_scenario(args.scenario);
  if (args.seed) sc.sim.seed = *args.seed;

  std::ostringstream table;
  table << "n_roles,time_to_first_consensus_ms\n";
  for (const auto& row : scaling_experiment(sc.sim, args.min_roles, args.max_roles)) {
    table << row.n_roles << ","
          << (row.time_to_first_consensus_ms ? std::to_string(*row.time_to_first_consensus_ms) : "-") << "\n";
    spdlog::info("{} roles: {}", row.n_roles,
                 row.time_to_first_consensus_ms ? std::to_string(*row.time_to_first_consensus_ms) + " ms"
                                                : "no consensus");
  }
  OutputSet outputs;
  outputs.add(args.out, table.str());
  outputs.commit();
  return kOk;
}

struct TrainArgs {
  std::string corpus, priors, out, model, alphabet;
  double tol = 1e-6;
  int max_iter = 100;
  std::uint64_t seed = 1;
};

TrainingCorpus parse_corpus(const std::string& text) {
  TrainingCorpus corpus;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream words(line);
    std::vector<std::string> seq;
    for (std::string w; words >> w;) seq.push_back(w);
    if (!seq.empty()) corpus.sequences.push_back(std::move(seq));
  }
  if (corpus.sequences.empty()) throw InputError("corpus has no sequences");
  return corpus;
}

PseudocountConfig parse_priors(const std::string& text) {
  PseudocountConfig priors;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "", "expected key=value");
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::uint64_t count = 0;
    try {
      std::size_t used = 0;
      if (value.empty() || value[0] == '-') throw std::invalid_argument("negative");
      count = std::stoull(value, &used);
      if (used != value.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(line_no, key, key + ": expected a non-negative integer");
    }
    if (auto phase = parse_phase(key); phase) {
      priors.per_phase[static_cast<std::size_t>(*phase)] = count;
    } else if (key == "tactical" || key == "operational" || key == "strategic") {
      priors.per_phase[key == "tactical" ? 0 : key == "operational" ? 1 : 2] = count;
    } else if (key.rfind("symbol.", 0) == 0 && key.size() > 7) {
      priors.per_feature[key.substr(7)] = count;
    } else {
      throw ParseError(line_no, key, "unknown prior '" + key + "'");
    }
  }
  return priors;
}

int cmd_train(const TrainArgs& args) {
  if (!(args.tol > 0.0) || args.max_iter < 1) {
    spdlog::error("--tol must be positive and --max-iter at least 1");
    return kUsage;
  }
  TrainingCorpus corpus;
  PseudocountConfig priors;
  Utfm start;
  try {
    corpus = parse_corpus(read_file(args.corpus));
    if (!args.priors.empty()) priors = parse_priors(read_file(args.priors));

    if (!args.model.empty()) {
      start = load_utfm(args.model);
    } else {
      std::vector<std::string> alphabet;
      std::set<std::string> seen;
      if (!args.alphabet.empty()) {
        std::istringstream in(args.alphabet);
        for (std::string sym; std::getline(in, sym, ',');) {
          if (sym.empty() || !seen.insert(sym).second) throw InputError("bad --alphabet entry '" + sym + "'");
          alphabet.push_back(sym);
        }
      } else {
        for (const auto& seq : corpus.sequences) {
          for (const auto& sym : seq) {
            if (seen.insert(sym).second) alphabet.push_back(sym);
          }
        }
      }
      start = perturbed_uniform(make_default_utfm(alphabet), args.seed);
    }
    for (const auto& seq : corpus.sequences) start.encode(seq);
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }

  std::set<std::string> used;
  for (const auto& seq : corpus.sequences) used.insert(seq.begin(), seq.end());
  for (const auto& sym : start.alphabet()) {
    if (used.count(sym)) continue;
    bool zero = false;
    for (Phase p : {Phase::Tactical, Phase::Operational, Phase::Strategic}) zero = zero || priors.emission_count(p, sym) == 0;
    if (zero) {
      spdlog::warn("symbol '{}' never occurs in the corpus and has a zero pseudocount: training will assign it "
                   "probability 0 (zero-probability problem); set a positive prior to smooth it",
                   sym);
    }
  }

  const TrainingResult result = baum_welch_train(start, corpus, priors, args.tol, args.max_iter);
  std::ostringstream log;
  log << "# iteration log2_likelihood log2_objective\n";
  log.precision(12);
  for (const auto& rec : result.log) {
    log << rec.iteration << " " << rec.log2_likelihood << " " << rec.log2_objective << "\n";
  }
  OutputSet outputs;
  outputs.add(args.out, write_utfm(result.model));
  outputs.add(args.out + ".log", log.str());
  outputs.commit();
  spdlog::info("{} iterations, log2-likelihood {:.6f} -> {:.6f}{}", result.log.size(),
               result.initial_log2_likelihood,
               result.log.empty() ? result.initial_log2_likelihood : result.log.back().log2_likelihood,
               result.converged ? " (converged)" : "");
  return kOk;
}

struct InspectArgs {
  std::string model, trace, out;
};

int cmd_inspect(const InspectArgs& args) {
  Utfm model;
  try {
    model = load_utfm(args.model);
  } catch (const std::exception& e) {
    throw InputError(args.model + ": " + e.what());
  }
  std::ostringstream out;
  out << "states: " << model.num_states() << "\n";
  out << "symbols:";
  for (const auto& s : model.alphabet()) out << " " << s;
  out << "\nvalid: yes\n";
  if (!args.trace.empty()) {
    std::istringstream words(args.trace);
    std::vector<std::string> x;
    for (std::string w; words >> w;) x.push_back(w);
    Trace t;
    try {
      t = viterbi_decode(model, x, PathEnd::Accepting);
    } catch (const std::exception& e) {
      throw InputError(e.what());
    }
    out << "viterbi:";
    for (auto s : t.states) out << " " << state_name(s);
    out << "\nlog2_probability: " << t.log2_probability << "\n";
    const StakeRecord rec = make_stake_record("", t);
    out << "weight_sum: " << rec.weight_sum << "\ntransitions: " << rec.transitions << "\nice: " << rec.ice
        << "\nstake: " << rec.stake << "\n";
  }
  if (args.out.empty()) {
    std::cout << out.str();
  } else {
    OutputSet outputs;
    outputs.add(args.out, out.str());
    outputs.commit();
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Decentralized multi-agent airline disruption recovery on a hashgraph ledger", "dlt-recovery"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Replay a scenario and write the consensus recovery plan");
  run_cmd->add_option("--scenario", run.scenario, "Scenario file")->required();
  run_cmd->add_option("--seed", run.seed, "Override the scenario seed");
  run_cmd->add_option("--report", run.report, "Recovery plan CSV output");
  run_cmd->add_option("--export-graph", run.graph, "Hashgraph DAG export");
  run_cmd->add_option("--transcript", run.transcript, "Sync transcript output");
  run_cmd->add_option("--summary", run.summary, "Simulation report output");

  ScalingArgs scaling;
  auto* scaling_cmd = app.add_subcommand("scaling", "Time to first consensus as membership grows");
  scaling_cmd->add_option("--scenario", scaling.scenario, "Scenario file")->required();
  scaling_cmd->add_option("--min-roles", scaling.min_roles, "Smallest membership")->capture_default_str();
  scaling_cmd->add_option("--max-roles", scaling.max_roles, "Largest membership")->capture_default_str();
  scaling_cmd->add_option("--out", scaling.out, "Table output")->required();
  scaling_cmd->add_option("--seed", scaling.seed, "Override the scenario seed");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Baum-Welch training of a UTFM");
  train_cmd->add_option("--corpus", train.corpus, "One whitespace-separated sequence per line")->required();
  train_cmd->add_option("--priors", train.priors, "tactical=, operational=, strategic=, symbol.<name>= counts");
  train_cmd->add_option("--tol", train.tol, "Convergence tolerance in bits")->capture_default_str();
  train_cmd->add_option("--max-iter", train.max_iter, "Iteration limit")->capture_default_str();
  train_cmd->add_option("--out", train.out, "Trained model output")->required();
  train_cmd->add_option("--model", train.model, "Starting model (default topology otherwise)");
  train_cmd->add_option("--alphabet", train.alphabet, "Comma-separated alphabet");
  train_cmd->add_option("--seed", train.seed, "Seed for the starting perturbation")->capture_default_str();

  InspectArgs inspect;
  auto* inspect_cmd = app.add_subcommand("inspect", "Validate a model and decode an input sequence");
  inspect_cmd->add_option("--model", inspect.model, "Model file")->required();
  inspect_cmd->add_option("--trace", inspect.trace, "Whitespace-separated input criteria to decode");
  inspect_cmd->add_option("--out", inspect.out, "Write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*scaling_cmd) return cmd_scaling(scaling);
    if (*train_cmd) return cmd_train(train);
    if (*inspect_cmd) return cmd_inspect(inspect);
  } catch (const InputError& e) {
    spdlog::error("{}", e.what());
    return kInputError;
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kInputError;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kRuntimeError;
  }
  return kUsage;
}
