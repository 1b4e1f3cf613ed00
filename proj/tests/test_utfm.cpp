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


#include <doctest.h>

#include <cmath>

#include "dltr/errors.hpp"
#include "dltr/utfm.hpp"
#include "dltr/utfm_io.hpp"
#include "fixtures.hpp"
#include "oracles/hmm_oracle.hpp"

using namespace dltr;

namespace {

Utfm two_symbol_model() {
  Utfm m({kAllStates.begin(), kAllStates.end()}, {"a", "b"});
  m.set_initial(m.state_index(StateId::TAS), 1.0);
  m.set_accepting(m.state_index(StateId::TIO), true);
  return m;
}

std::size_t idx(const Utfm& m, StateId s) { return m.state_index(s); }

}  // namespace

TEST_CASE("states are grouped four per phase") {
  std::array<int, 3> per_phase{};
  for (auto s : kAllStates) ++per_phase[static_cast<std::size_t>(phase_of(s))];
  CHECK(per_phase == std::array<int, 3>{4, 4, 4});
  CHECK(phase_of(StateId::TAS) == Phase::Tactical);
  CHECK(phase_of(StateId::TID) == Phase::Operational);
  CHECK(phase_of(StateId::TIO) == Phase::Strategic);
  for (auto s : kAllStates) CHECK(parse_state(state_name(s)) == s);
  CHECK_FALSE(parse_state("XYZ"));
}

TEST_CASE("default model validates") {
  const Utfm m = make_default_utfm({"a", "b", "c"});
  CHECK(validate(m).ok());
  CHECK(validate(perturbed_uniform(m, 42)).ok());
  CHECK(perturbed_uniform(m, 42) == perturbed_uniform(m, 42));
  CHECK_FALSE(perturbed_uniform(m, 42) == perturbed_uniform(m, 43));
}

TEST_CASE("validate reports row deviations") {
  Utfm m = two_symbol_model();
  const auto tas = idx(m, StateId::TAS);
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    for (std::size_t a = 0; a < 2; ++a) m.set_emission(s, a, 0.5);
  }

  SUBCASE("proper row passes") {
    m.set_transition(tas, 0, idx(m, StateId::TOS), 0.6);
    m.set_transition(tas, 0, idx(m, StateId::ES), 0.4);
    CHECK(validate(m).ok());
  }
  SUBCASE("overfull row is flagged with its deviation") {
    m.set_transition(tas, 0, idx(m, StateId::TOS), 0.6);
    m.set_transition(tas, 0, idx(m, StateId::ES), 0.5);
    const auto report = validate(m);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].where == "TRANS TAS a");
    CHECK(report.violations[0].deviation == doctest::Approx(0.1));
  }
  SUBCASE("empty successor sets pass") { CHECK(validate(m).ok()); }
  SUBCASE("no accept state fails") {
    m.set_accepting(idx(m, StateId::TIO), false);
    CHECK_FALSE(validate(m).ok());
  }
}

TEST_CASE("trace probability is the product of steps") {
  Utfm m = two_symbol_model();
  m.set_transition(idx(m, StateId::TAS), 0, idx(m, StateId::TOS), 0.5);
  m.set_transition(idx(m, StateId::TAS), 0, idx(m, StateId::TAS), 0.5);
  m.set_transition(idx(m, StateId::TOS), 1, idx(m, StateId::ES), 0.4);
  m.set_transition(idx(m, StateId::TOS), 1, idx(m, StateId::TOD), 0.6);

  CHECK(trace_probability(m, {{StateId::TAS}, {}, 0.0}) == 1.0);
  const Trace t{{StateId::TAS, StateId::TOS, StateId::ES}, {"a", "b"}, 0.0};
  CHECK(trace_probability(m, t) == doctest::Approx(0.2));
  CHECK(std::exp2(trace_log2_probability(m, t)) == doctest::Approx(0.2).epsilon(1e-12));
  const Trace off{{StateId::TAS, StateId::TIO}, {"a"}, 0.0};
  CHECK(trace_probability(m, off) == 0.0);
  CHECK_THROWS_AS(trace_probability(m, {{StateId::TAS}, {"a"}, 0.0}), DomainError);
}

TEST_CASE("acceptance probability edge cases") {
  Utfm m = two_symbol_model();
  m.set_initial(idx(m, StateId::TAS), 0.0);
  m.set_initial(idx(m, StateId::TIO), 1.0);
  CHECK(acceptance_probability(m, std::vector<std::string>{}) == 1.0);

  Utfm dead = two_symbol_model();
  dead.set_transition(idx(dead, StateId::TAS), 0, idx(dead, StateId::TAS), 1.0);
  CHECK(acceptance_probability(dead, std::vector<std::string>{"a", "a"}) == 0.0);
}

TEST_CASE("viterbi on a deterministic chain") {
  Utfm m = two_symbol_model();
  const std::vector<StateId> chain = {StateId::TAS, StateId::TAD, StateId::TAO, StateId::TOO};
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) m.set_transition(idx(m, chain[i]), 0, idx(m, chain[i + 1]), 1.0);
  const Trace t = viterbi_decode(m, std::vector<std::string>{"a", "a", "a"});
  CHECK(t.states == chain);
  CHECK(t.log2_probability == 0.0);
  CHECK_THROWS_AS(viterbi_decode(m, std::vector<std::string>{"b"}), NoAdmissiblePath);
  CHECK_THROWS_AS(viterbi_decode(m, std::vector<std::string>{}), DomainError);
  CHECK_THROWS_AS(viterbi_decode(m, std::vector<std::string>{"z"}), DomainError);
}

TEST_CASE("viterbi breaks exact ties toward smaller state indices") {
  Utfm m = two_symbol_model();
  const auto tas = idx(m, StateId::TAS);
  m.set_transition(tas, 0, idx(m, StateId::TAD), 0.5);
  m.set_transition(tas, 0, idx(m, StateId::TOS), 0.5);
  m.set_transition(idx(m, StateId::TOS), 0, idx(m, StateId::TOD), 1.0);
  m.set_transition(idx(m, StateId::TAD), 0, idx(m, StateId::TOD), 1.0);
  const std::vector<std::string> x = {"a", "a"};
  for (int rep = 0; rep < 3; ++rep) {
    const Trace t = viterbi_decode(m, x);
    CHECK(t.states == std::vector<StateId>{StateId::TAS, StateId::TOS, StateId::TOD});
    CHECK(t.log2_probability == -1.0);
  }
  const auto best = oracle::argmax(m, x, false);
  REQUIRE(best);
  CHECK(best->probability == 0.5);
  CHECK(best->runner_up == 0.5);
}

TEST_CASE("forward and viterbi agree with path enumeration") {
  Rng rng(5);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Utfm m = testing::random_sparse_model(1000 + seed);
    REQUIRE(validate(m).ok());
    const auto x = testing::random_word(rng, m, 1 + rng.below(5));
    CHECK(acceptance_probability(m, x) == doctest::Approx(oracle::acceptance(m, x)).epsilon(1e-9));
    const auto best = oracle::argmax(m, x, false);
    if (!best) {
      CHECK_THROWS_AS(viterbi_decode(m, x), NoAdmissiblePath);
      continue;
    }
    const Trace t = viterbi_decode(m, x);
    CHECK(std::exp2(t.log2_probability) == doctest::Approx(best->probability).epsilon(1e-9));
    CHECK(trace_probability(m, t) == doctest::Approx(best->probability).epsilon(1e-9));
  }
}

TEST_CASE("pseudocount smoothing") {
  auto p = pseudocount_probability({{"0", 1}, {"1", 1}}, {{"0", 1}, {"1", 1}});
  CHECK(p["1"] == doctest::Approx(0.5));

  p = pseudocount_probability({{"1", 16160}, {"0", 603840}}, {});
  CHECK(p["1"] == doctest::Approx(0.0261).epsilon(0.01));

  p = pseudocount_probability({{"x", 2}, {"y", 0}, {"z", 1}}, {{"x", 1}, {"y", 1}, {"z", 1}});
  CHECK(p["x"] == doctest::Approx(0.5));
  CHECK(p["y"] == doctest::Approx(1.0 / 6));
  CHECK(p["z"] == doctest::Approx(1.0 / 3));

  CHECK_THROWS_AS(pseudocount_probability({{"x", 0}}, {}), UndefinedDistribution);
}

TEST_CASE("prior knowledge factor") {
  CHECK(prior_knowledge_factor(1) == 2.0);
  CHECK(prior_knowledge_factor(16160) == doctest::Approx(1.0000619).epsilon(1e-7));
  CHECK(prior_knowledge_factor(850) == doctest::Approx(1.0011765).epsilon(1e-7));
  CHECK_THROWS_AS(prior_knowledge_factor(0), DomainError);
}

TEST_CASE("text format round trip") {
  const Utfm m = testing::random_sparse_model(77);
  const Utfm back = read_utfm(write_utfm(m));
  CHECK(back.alphabet() == m.alphabet());
  CHECK(back.states() == m.states());
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    CHECK(back.initial(s) == doctest::Approx(m.initial(s)).epsilon(1e-11));
    CHECK(back.accepting(s) == m.accepting(s));
    for (std::size_t a = 0; a < m.num_symbols(); ++a) {
      CHECK(back.emission(s, a) == doctest::Approx(m.emission(s, a)).epsilon(1e-11));
      for (std::size_t t = 0; t < m.num_states(); ++t) {
        CHECK(back.transition(s, a, t) == doctest::Approx(m.transition(s, a, t)).epsilon(1e-11));
      }
    }
  }
  CHECK(write_utfm(back) == write_utfm(m));
  CHECK_THROWS_AS(read_utfm("UTFM v1\nSTATE NOPE Tactical\n"), ParseError);
  CHECK_THROWS_AS(read_utfm("not a model"), ParseError);
}
