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


// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "dltr/errors.hpp"
#include "dltr/gossip.hpp"
#include "dltr/hashgraph.hpp"
#include "dltr/scenario.hpp"
#include "dltr/stake.hpp"
#include "dltr/training.hpp"
#include "dltr/utfm.hpp"
#include "fixtures.hpp"
#include "oracles/hashgraph_oracle.hpp"
#include "oracles/hmm_oracle.hpp"

using namespace dltr;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// Pairwise comparison of the decided prefixes of two replicas.
bool prefixes_agree(const Hashgraph& a, const Hashgraph& b, std::string& why) {
  if (!consistent(a, b)) {
    why = "parent edges differ";
    return false;
  }
  const std::size_t common = std::min(a.ordered_event_count(), b.ordered_event_count());
  for (std::size_t k = 0; k < common; ++k) {
    const auto& id = a.ordered_event(k).id;
    if (id != b.ordered_event(k).id) {
      why = fmt("event order differs at position %zu", k);
      return false;
    }
    const auto ia = a.round_info(id);
    const auto ib = b.round_info(id);
    if (ia.consensus_timestamp != ib.consensus_timestamp || ia.consensus_position != ib.consensus_position ||
        ia.round_received != ib.round_received) {
      why = fmt("consensus data differs at position %zu", k);
      return false;
    }
  }
  const auto ta = a.consensus_order();
  const auto tb = b.consensus_order();
  const std::size_t tx_common = std::min(ta.size(), tb.size());
  for (std::size_t k = 0; k < tx_common; ++k) {
    if (ta[k].position != tb[k].position || !(ta[k].tx == tb[k].tx) ||
        ta[k].consensus_timestamp != tb[k].consensus_timestamp) {
      why = fmt("transaction order differs at position %zu", k);
      return false;
    }
  }
  return true;
}

bool honest_replicas_agree(const SimResult& r, std::string& why) {
  for (std::size_t i = 0; i < r.replicas.size(); ++i) {
    for (std::size_t j = i + 1; j < r.replicas.size(); ++j) {
      if (r.honest[i] && r.honest[j] && !prefixes_agree(r.replicas[i], r.replicas[j], why)) return false;
    }
  }
  return true;
}

Outcome pseudocount_arithmetic() {
  const auto t0 = Clock::now();
  const auto p = pseudocount_probability({{"1", 16160}, {"0", 620000 - 16160}}, {});
  const double percent = 100.0 * p.at("1");
  const double factor = prior_knowledge_factor(16160);
  const double elapsed_ms = 1e3 * seconds_since(t0);
  const bool ok = std::abs(std::round(percent * 100.0) / 100.0 - 2.61) <= 0.005 &&
                  std::abs(factor - 1.00006188) <= 1e-7 && elapsed_ms < 1.0;
  return {ok, fmt("p = %.2f%% (%.5f), f_pk(16160) = %.8f, %.3f ms", percent, p.at("1"), factor, elapsed_ms)};
}

Outcome cost_reproduction() {
  const std::vector<RecoveryImpact> rows = {
      {61, 18, 126, 26}, {41, 22, 93, 8},  {7, 17, 247, 33}, {35, 1, 106, -14}, {17, 8, 294, 39},
      {22, 1, 106, 6},   {55, 10, 96, 6},  {0, 3, 287, 40},  {-20, 41, 339, 38}, {51, 24, 103, 8},
  };
  const double cost = passenger_cost(rows, CostModel{47.0});
  return {std::abs(cost - 359.55) <= 0.01, fmt("$%.2f at $47/hr", cost)};
}

Outcome position_weights() {
  Trace full;
  full.states.assign(kAllStates.begin(), kAllStates.end());
  full.symbols.assign(kAllStates.size() - 1, "a");
  const WeightSum w = path_weight_sum(full);
  return {w.weight_sum == 28 && w.transitions == 11,
          fmt("S = %llu, N = %llu", static_cast<unsigned long long>(w.weight_sum),
              static_cast<unsigned long long>(w.transitions))};
}

Outcome decoding_oracle() {
  const auto t0 = Clock::now();
  Rng rng(2718);
  std::size_t checks = 0, mismatches = 0, unreachable = 0;
  double worst = 0.0;
  auto compare = [&](double got, double want) {
    const double err = std::abs(got - want) / std::max(1.0, std::abs(want));
    worst = std::max(worst, err);
    ++checks;
    if (err > 1e-9) ++mismatches;
  };
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Utfm m = testing::random_sparse_model(90'000 + seed, 2 + seed % 3);
    const auto xf = testing::random_word(rng, m, 1 + rng.below(6));
    compare(acceptance_probability(m, xf), oracle::acceptance(m, xf));

    const auto xv = testing::random_word(rng, m, 1 + rng.below(8));
    for (PathEnd end : {PathEnd::Any, PathEnd::Accepting}) {
      const auto best = oracle::argmax(m, xv, end == PathEnd::Accepting);
      try {
        const Trace t = viterbi_decode(m, xv, end);
        if (!best) {
          ++mismatches;
          continue;
        }
        compare(std::exp2(t.log2_probability), best->probability);
        std::vector<std::size_t> path;
        for (auto s : t.states) path.push_back(m.state_index(s));
        if (best->probability > best->runner_up && path != best->path) ++mismatches;
      } catch (const NoAdmissiblePath&) {
        ++unreachable;
        if (best) ++mismatches;
      }
    }
  }
  const double elapsed = seconds_since(t0);
  return {mismatches == 0 && elapsed < 60.0,
          fmt("%zu comparisons, %zu without a path, %zu mismatches, max rel err %.2e, %.2f s", checks, unreachable,
              mismatches, worst, elapsed)};
}

Outcome em_monotonicity() {
  std::size_t iterations = 0, violations = 0;
  double worst = 0.0;
  for (std::uint64_t run = 0; run < 50; ++run) {
    const Utfm gen = testing::random_sparse_model(70'000 + run, 3);
    Rng rng(run + 1);
    TrainingCorpus corpus;
    while (corpus.sequences.size() < 30) {
      auto x = testing::sample_sequence(gen, rng, 3 + rng.below(6));
      if (std::isfinite(sequence_log2_likelihood(gen, x))) corpus.sequences.push_back(std::move(x));
    }
    PseudocountConfig priors;
    const bool with_priors = run % 2 == 1;
    if (with_priors) priors.per_phase = {1 + run % 4, 2, 1 + run % 3};
    const auto result = baum_welch_train(perturbed_uniform(gen, run), corpus, priors, 1e-12, 25);
    double prev = with_priors ? result.initial_log2_objective : result.initial_log2_likelihood;
    for (const auto& rec : result.log) {
      const double now = with_priors ? rec.log2_objective : rec.log2_likelihood;
      worst = std::max(worst, prev - now);
      if (now < prev - 1e-9) ++violations;
      prev = now;
      ++iterations;
    }
  }
  return {violations == 0, fmt("50 runs, %zu iterations, %zu decreases, largest drop %.2e bits", iterations,
                               violations, std::max(0.0, worst))};
}

SimConfig agreement_config(std::uint64_t run, Rng& rng) {
  const std::size_t n = 4 + run % 8;
  SimConfig c = default_sim_config(first_roles(n));
  c.seed = 1000 + run;
  c.max_events = 200 + rng.below(101);
  c.training_iterations = 1;
  if (run % 2 == 1) {
    c.stake_mode = StakeMode::Explicit;
    for (const auto& role : c.agents) c.explicit_stakes[role] = 1 + rng.below(20);
  } else {
    c.stake_mode = StakeMode::Equal;
  }
  return c;
}

Outcome consensus_agreement() {
  const auto t0 = Clock::now();
  Rng rng(31337);
  std::size_t failures = 0, decided_runs = 0;
  std::string first_failure;
  std::uint64_t ordered = 0;
  for (std::uint64_t run = 0; run < 100; ++run) {
    const SimResult r = run_simulation(agreement_config(run, rng));
    std::string why;
    if (!honest_replicas_agree(r, why)) {
      if (failures++ == 0) first_failure = fmt("run %llu: %s", static_cast<unsigned long long>(run), why.c_str());
    }
    decided_runs += r.report.transactions_ordered > 0;
    ordered += r.report.transactions_ordered;
  }
  const double elapsed = seconds_since(t0);
  return {failures == 0 && decided_runs > 0 && elapsed < 300.0,
          fmt("100 runs, %zu disagreements, %zu runs ordered transactions (%llu total), %.1f s%s%s", failures,
              decided_runs, static_cast<unsigned long long>(ordered), elapsed, failures ? "; " : "",
              first_failure.c_str())};
}

Outcome fame_oracle() {
  std::size_t fixtures = 0, mismatches = 0, median_checks = 0, ordered = 0;
  std::uint64_t seed = 500;
  for (std::size_t members = 2; members <= 6; ++members) {
    for (int variant = 0; variant < 8; ++variant) {
      testing::DagOptions opt;
      opt.members = members;
      opt.events = 50;
      opt.unequal_stake = variant & 1;
      opt.ts_ties = variant & 2;
      opt.fork = (variant & 4) && members >= 4;
      const auto f = testing::random_dag(seed++, opt);
      const Hashgraph g = testing::build(f);
      const oracle::HashgraphOracle o(f.book, f.events);
      ++fixtures;
      const std::size_t n = f.events.size();
      for (std::size_t x = 0; x < n; ++x) {
        const auto& id = f.events[x].id;
        const RoundInfo info = g.round_info(id);
        mismatches += info.round_created != o.round(x) || info.is_witness != o.witness(x) ||
                      info.fame != o.fame(x) || info.round_received != o.round_received(x) ||
                      info.consensus_timestamp != o.timestamp(x) || info.consensus_position != o.position(x);
        ordered += info.consensus_position.has_value();
        for (std::size_t y = 0; y < n; ++y) {
          mismatches += g.strongly_sees(id, f.events[y].id) != o.strongly_sees(x, y);
        }
      }
    }
  }
  Rng rng(4);
  for (int k = 0; k < 2000; ++k) {
    std::vector<std::pair<std::int64_t, std::uint64_t>> samples(1 + rng.below(8));
    for (auto& [t, w] : samples) {
      t = static_cast<std::int64_t>(rng.below(20));
      w = 1 + rng.below(6);
    }
    mismatches += weighted_lower_median(samples) != oracle::HashgraphOracle::basket_median(samples);
    ++median_checks;
  }
  return {mismatches == 0 && ordered > 0,
          fmt("%zu fixtures (2-6 members, 50 events), %zu events ordered, %zu median checks, %zu mismatches",
              fixtures, ordered, median_checks, mismatches)};
}

Outcome finality() {
  const auto t0 = Clock::now();
  testing::DagOptions opt;
  opt.members = 7;
  opt.events = 10'000;
  opt.unequal_stake = true;
  const auto f = testing::random_dag(424242, opt);
  Hashgraph g(f.book, f.keys);
  std::vector<EventId> ids;
  std::vector<RoundInfo> infos;
  std::size_t changes = 0;
  for (const auto& e : f.events) {
    if (!g.insert(e).accepted()) return {false, "fixture event rejected"};
    g.update_consensus();
    if (g.ordered_event_count() < ids.size()) ++changes;
    for (std::size_t k = 0; k < ids.size() && k < g.ordered_event_count(); ++k) {
      if (g.ordered_event(k).id != ids[k]) ++changes;
    }
    for (std::size_t k = ids.size(); k < g.ordered_event_count(); ++k) {
      ids.push_back(g.ordered_event(k).id);
      infos.push_back(g.round_info(ids.back()));
    }
  }
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const auto now = g.round_info(ids[k]);
    changes += now.consensus_position != infos[k].consensus_position ||
               now.consensus_timestamp != infos[k].consensus_timestamp ||
               now.round_received != infos[k].round_received;
  }
  return {changes == 0 && !ids.empty(),
          fmt("%zu insertions, %zu events finalized, %zu changes, %.1f s", f.events.size(), ids.size(), changes,
              seconds_since(t0))};
}

Outcome fault_tolerance() {
  Rng rng(77);
  std::size_t failures = 0, with_forks = 0, decided = 0;
  std::string first_failure;
  for (std::uint64_t run = 0; run < 50; ++run) {
    const std::size_t n = 4 + run % 4;
    SimConfig c = default_sim_config(first_roles(n));
    c.seed = 5000 + run;
    c.max_events = 250;
    c.training_iterations = 1;
    const std::string forker = c.agents[rng.below(n)];
    if (run % 2 == 1) {
      c.stake_mode = StakeMode::Explicit;
      std::uint64_t rest = 0;
      for (const auto& role : c.agents) {
        if (role == forker) continue;
        c.explicit_stakes[role] = 1 + rng.below(10);
        rest += c.explicit_stakes[role];
      }
      c.explicit_stakes[forker] = std::max<std::uint64_t>(1, std::min<std::uint64_t>(1 + rng.below(10), (rest - 1) / 2));
    } else {
      c.stake_mode = StakeMode::Equal;
    }
    const SimResult r = inject_adversary(c, AdversaryBehavior::Fork, forker);
    std::string why;
    if (!honest_replicas_agree(r, why) && failures++ == 0) {
      first_failure = fmt("run %llu: %s", static_cast<unsigned long long>(run), why.c_str());
    }
    with_forks += r.report.forks_detected > 0;
    decided += r.report.transactions_ordered > 0;
  }
  return {failures == 0 && decided > 0,
          fmt("50 runs (4-7 agents), %zu disagreements, forks detected in %zu, ordering progressed in %zu%s%s",
              failures, with_forks, decided, failures ? "; " : "", first_failure.c_str())};
}

Outcome scaling_shape() {
  const auto t0 = Clock::now();
  constexpr std::size_t kSeeds = 5;
  std::map<std::size_t, std::vector<std::int64_t>> times;
  bool missing = false;
  for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
    SimConfig base = default_sim_config(first_roles(4));
    base.seed = seed;
    for (const auto& row : scaling_experiment(base, 4, 11)) {
      if (!row.time_to_first_consensus_ms) {
        missing = true;
        continue;
      }
      times[row.n_roles].push_back(*row.time_to_first_consensus_ms);
    }
  }
  std::string detail;
  std::vector<std::size_t> drops;
  for (std::size_t n = 4; n <= 11; ++n) {
    std::vector<std::int64_t> t = times[n];
    std::sort(t.begin(), t.end());
    detail += fmt("%s%zu:%lld", n == 4 ? "" : " ", n, t.empty() ? -1LL : static_cast<long long>(t[t.size() / 2]));
    if (n == 4) continue;
    std::size_t votes = 0;
    const auto& prev = times[n - 1];
    const auto& cur = times[n];
    for (std::size_t s = 0; s < std::min(prev.size(), cur.size()); ++s) votes += cur[s] >= prev[s];
    if (2 * votes <= kSeeds) drops.push_back(n);
  }
  std::string drop_list;
  for (std::size_t n : drops) drop_list += fmt(" %zu", n);
  return {!missing && drops.empty(), fmt("median ms per n {%s}; majority decrease at n =%s; %.1f s", detail.c_str(),
                                         drops.empty() ? " none" : drop_list.c_str(), seconds_since(t0))};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Outcome cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("dltr-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string scenario = std::string(DLTR_SOURCE_DIR) + "/scenarios/demo5.ini";
  auto invoke = [&](const std::string& tag) {
    const std::string cmd = "DLT_RECOVERY_LOG=error " + std::string(DLT_RECOVERY_BIN) + " run --scenario " +
                            scenario + " --seed 19 --report " + (dir / (tag + ".csv")).string() +
                            " --export-graph " + (dir / (tag + ".graph")).string() + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
  };
  const bool ran = invoke("a") && invoke("b");
  const std::string ra = slurp((dir / "a.csv").string());
  const std::string ga = slurp((dir / "a.graph").string());
  const bool same = ran && !ra.empty() && !ga.empty() && ra == slurp((dir / "b.csv").string()) &&
                    ga == slurp((dir / "b.graph").string());
  fs::remove_all(dir);
  return {same, fmt("report %zu bytes, graph %zu bytes, %s", ra.size(), ga.size(),
                    same ? "identical across two invocations" : "outputs differ or run failed")};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"pseudocount-arithmetic", pseudocount_arithmetic},
      {"cost-reproduction", cost_reproduction},
      {"position-weight-arithmetic", position_weights},
      {"viterbi-forward-oracle", decoding_oracle},
      {"em-monotonicity", em_monotonicity},
      {"consensus-agreement", consensus_agreement},
      {"fame-round-oracle", fame_oracle},
      {"finality", finality},
      {"fault-tolerance", fault_tolerance},
      {"scaling-shape", scaling_shape},
      {"cli-determinism", cli_determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
