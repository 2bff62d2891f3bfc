#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "limitlab/constructions.hpp"
#include "oracles.hpp"

using namespace limitlab;

namespace {

bool has_stay(const TuringMachine& tm) {
  for (int q = 0; q + 1 < tm.num_states(); ++q)
    for (int c = 0; c < tm.alphabet().size(); ++c)
      if (tm.transition_at(q, c).move == Move::Stay) return true;
  return false;
}

std::vector<std::string> unary_inputs(int max_len) {
  std::vector<std::string> v{""};
  for (int k = 1; k <= max_len; ++k) v.push_back(std::string(static_cast<std::size_t>(k), '1'));
  return v;
}

// deterministic mixed-alphabet sample for the gadget checks
std::vector<std::string> sampled_strings(const SymbolSet& a, int len_lo, int len_hi, int count,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len(len_lo, len_hi);
  std::uniform_int_distribution<int> sym(0, a.size() - 1);
  std::set<std::string> out;
  while (static_cast<int>(out.size()) < count) {
    std::string x;
    int l = len(rng);
    for (int i = 0; i < l; ++i) x.push_back(a.at(sym(rng)));
    out.insert(std::move(x));
  }
  return {out.begin(), out.end()};
}

}  // namespace

TEST_CASE("stay removal is the identity on machines without stays") {
  TuringMachine rm = oracle::right_mover();
  REQUIRE(!has_stay(rm));
  CHECK(serialize(remove_stay_moves(rm)) == serialize(rm));
}

TEST_CASE("a stay becomes a right-step plus a bounce back") {
  TuringMachine tm = parse_machine(
      "tm states=2 gamma=_1 sigma=1\n"
      "q0 _ -> q1 1 S\n"
      "q0 1 -> q1 1 S\n");
  TuringMachine fixed = remove_stay_moves(tm);
  CHECK(fixed.num_states() == 3);  // one bounce state for the single stay target
  CHECK(!has_stay(fixed));

  RunOutcome before = run_bounded(tm, "", 10);
  RunOutcome after = run_bounded(fixed, "", 10);
  REQUIRE(before.halted());
  REQUIRE(after.halted());
  CHECK(before.steps == 1);
  CHECK(after.steps == 2);
  CHECK(before.output == after.output);
  CHECK(*after.output == "1");

  auto tb = tape_behavior(fixed, "", 10);
  REQUIRE(tb.has_value());
  REQUIRE(tb->actions.size() == 2);
  CHECK(tb->actions[0] == ActionTuple{'_', '1', Move::Right});
  CHECK(tb->actions[1] == ActionTuple{'_', '_', Move::Left});
}

TEST_CASE("stay removal preserves the function at budget-matched scale") {
  TapeAlphabet alpha("_1", "1");
  for (std::uint64_t i = 1; i <= 50; ++i) {
    TuringMachine tm = enumerate_machine(i, alpha);
    TuringMachine fixed = remove_stay_moves(tm);
    CHECK(!has_stay(fixed));
    CHECK(fixed.alphabet().gamma() == tm.alphabet().gamma());
    for (const std::string& x : unary_inputs(5)) {
      RunOutcome a = run_bounded(tm, x, 300);
      if (a.halted()) {
        RunOutcome b = run_bounded(fixed, x, 2 * a.steps);
        REQUIRE(b.halted());
        CHECK(b.output == a.output);
        CHECK(b.steps >= a.steps);
        CHECK(b.steps <= 2 * a.steps);
      } else {
        // the converted run is never shorter, so it cannot sneak under the bar
        CHECK(!run_bounded(fixed, x, 300).halted());
      }
    }
  }
}

TEST_CASE("doubling refuses machines with stays") {
  CHECK_THROWS_AS(double_transitions(oracle::identity_ab()), std::invalid_argument);
}

TEST_CASE("doubling adds one dummy state and one fresh symbol per transition") {
  TuringMachine base = remove_stay_moves(oracle::identity_ab());
  DoubledMachine d = double_transitions(base);
  int m = (base.num_states() - 1) * base.alphabet().size();
  CHECK(serialize(d.original) == serialize(base));
  CHECK(d.doubled.num_states() == base.num_states() + m);
  CHECK(d.doubled.alphabet().size() == base.alphabet().size() + m);
  CHECK(d.doubled.alphabet().sigma() == base.alphabet().sigma());
  REQUIRE(static_cast<int>(d.transition_index.size()) == m);

  std::set<int> dummies;
  std::set<char> fresh;
  for (const auto& [key, entry] : d.transition_index) {
    CHECK(key.first >= 0);
    CHECK(key.first < base.num_states() - 1);
    CHECK(base.alphabet().in_gamma(key.second));
    dummies.insert(entry.dummy_state);
    fresh.insert(entry.fresh_symbol);
    CHECK(!base.alphabet().in_gamma(entry.fresh_symbol));
    CHECK(d.doubled.alphabet().in_gamma(entry.fresh_symbol));
  }
  CHECK(static_cast<int>(dummies.size()) == m);
  CHECK(static_cast<int>(fresh.size()) == m);
  for (int s : dummies) {
    CHECK(s >= base.num_states() - 1);
    CHECK(s < d.doubled.num_states() - 1);
  }
}

TEST_CASE("a doubled run takes exactly twice the steps to the same output") {
  TapeAlphabet alpha("_1", "1");
  int doubled_runs = 0;
  for (std::uint64_t i = 1; i <= 30; ++i) {
    DoubledMachine d = double_transitions(remove_stay_moves(enumerate_machine(i, alpha)));
    for (const std::string& x : unary_inputs(4)) {
      RunOutcome a = run_bounded(d.original, x, 150);
      RunOutcome b = run_bounded(d.doubled, x, 300);
      CHECK(a.halted() == b.halted());
      if (!a.halted()) continue;
      CHECK(b.steps == 2 * a.steps);
      CHECK(b.output == a.output);
      ++doubled_runs;
    }
  }
  CHECK(doubled_runs > 40);
}

TEST_CASE("doubled traces interleave marker stays with the original actions") {
  DoubledMachine d = double_transitions(remove_stay_moves(oracle::identity_ab()));
  for (const std::string& x : {"ab", "ba", "aab", ""}) {
    auto orig = tape_behavior(d.original, x, 200);
    auto dbl = tape_behavior(d.doubled, x, 400);
    REQUIRE(orig.has_value());
    REQUIRE(dbl.has_value());
    REQUIRE(dbl->actions.size() == 2 * orig->actions.size());

    int state = 0;
    for (std::size_t k = 0; k < orig->actions.size(); ++k) {
      char read = orig->scanned[k];
      const DoubledMachine::Entry& entry = d.transition_index.at({state, read});
      // first half: mark the cell in place
      CHECK(dbl->scanned[2 * k] == read);
      CHECK(dbl->actions[2 * k] == ActionTuple{read, entry.fresh_symbol, Move::Stay});
      // second half: the original write and move, fired off the marker
      CHECK(dbl->actions[2 * k + 1] ==
            ActionTuple{entry.fresh_symbol, orig->actions[k].write, orig->actions[k].move});
      state = d.original.transition(state, read).next;
    }
  }
}

TEST_CASE("the one-transition blank-only machine doubles cleanly") {
  TuringMachine tiny(2, TapeAlphabet("_", ""), {Transition{1, '_', Move::Right}});
  DoubledMachine d = double_transitions(tiny);
  CHECK(d.doubled.num_states() == 3);
  CHECK(d.doubled.alphabet().size() == 2);
  CHECK(d.transition_index.size() == 1);
  RunOutcome a = run_bounded(tiny, "", 10);
  RunOutcome b = run_bounded(d.doubled, "", 10);
  REQUIRE(a.halted());
  REQUIRE(b.halted());
  CHECK(a.steps == 1);
  CHECK(b.steps == 2);
  CHECK(a.output == b.output);
  CHECK(a.output == std::string());
}

TEST_CASE("doubling every base machine preserves its function on samples") {
  for (const TuringMachine& base : oracle::base_machines()) {
    DoubledMachine d = double_transitions(remove_stay_moves(base));
    std::string sigma = base.alphabet().sigma();
    std::vector<std::string> inputs{""};
    for (const std::string& x : oracle::strings_up_to(SymbolSet(sigma), 3))
      inputs.push_back(x);
    for (const std::string& x : inputs) {
      RunOutcome want = run_bounded(base, x, 500);
      RunOutcome got = run_bounded(d.doubled, x, 2000);
      REQUIRE(want.halted());
      REQUIRE(got.halted());
      CHECK(got.output == want.output);
    }
  }
}

TEST_CASE("verdict machines split exactly at the subject's halting time") {
  TuringMachine subject = oracle::right_mover();
  HaltingGadgetPair pair = halting_gadgets(subject, "aa");  // halts in 3 steps
  const std::uint64_t kBudget = 200000;
  SymbolSet sg(pair.yes_machine.alphabet().sigma());
  CHECK(sg.contains('a'));
  CHECK(sg.contains('0'));
  CHECK(sg.contains('1'));

  // below the halting time the two machines are the same experiment
  std::vector<std::string> below{""};
  for (const std::string& x : oracle::strings_up_to(sg, 2)) below.push_back(x);
  for (const std::string& x : below) {
    auto ty = tape_behavior(pair.yes_machine, x, kBudget);
    auto tn = tape_behavior(pair.no_machine, x, kBudget);
    REQUIRE(ty.has_value());
    REQUIRE(tn.has_value());
    CHECK(ty->scanned == tn->scanned);
    CHECK(ty->actions == tn->actions);
  }

  // at and above it they announce opposite verdicts
  std::vector<std::string> at_or_above = oracle::strings_up_to(sg, 3);
  at_or_above.erase(std::remove_if(at_or_above.begin(), at_or_above.end(),
                                   [](const std::string& s) { return s.size() < 3; }),
                    at_or_above.end());
  for (int k = 4; k <= 7; ++k) at_or_above.push_back(std::string(static_cast<std::size_t>(k), 'a'));
  for (const std::string& x : sampled_strings(sg, 4, 7, 40, 11))
    at_or_above.push_back(x);
  for (const std::string& x : at_or_above) {
    RunOutcome ry = run_bounded(pair.yes_machine, x, kBudget);
    RunOutcome rn = run_bounded(pair.no_machine, x, kBudget);
    REQUIRE(ry.halted());
    REQUIRE(rn.halted());
    CHECK(ry.output == "1");
    CHECK(rn.output == "0");
  }
}

TEST_CASE("the verdict agrees with an independent interpreter's halting call") {
  TuringMachine subject = oracle::right_mover();
  for (const std::string& w : {std::string("aa"), std::string("aaaa")}) {
    HaltingGadgetPair pair = halting_gadgets(subject, w);
    SymbolSet sg(pair.yes_machine.alphabet().sigma());
    std::vector<std::string> probe{""};
    for (const std::string& x : oracle::strings_up_to(sg, 2)) probe.push_back(x);
    for (int k = 3; k <= 8; ++k) probe.push_back(std::string(static_cast<std::size_t>(k), 'a'));
    for (const std::string& x : probe) {
      oracle::RefRun ref = oracle::ref_run(subject, w, x.size());
      RunOutcome ry = run_bounded(pair.yes_machine, x, 200000);
      REQUIRE(ry.halted());
      if (ref.halted) {
        CHECK(ry.output == "1");
      } else {
        CHECK(ry.output != "1");
      }
    }
  }
}

TEST_CASE("a non-halting subject keeps the pair indistinguishable") {
  HaltingGadgetPair pair = halting_gadgets(oracle::runner(), "aa");
  SymbolSet sg(pair.yes_machine.alphabet().sigma());
  std::vector<std::string> probe{""};
  for (const std::string& x : oracle::strings_up_to(sg, 4)) probe.push_back(x);
  for (int k = 5; k <= 8; ++k) probe.push_back(std::string(static_cast<std::size_t>(k), 'a'));
  for (const std::string& x : sampled_strings(sg, 5, 8, 30, 23)) probe.push_back(x);
  for (const std::string& x : probe) {
    auto ty = tape_behavior(pair.yes_machine, x, 400000);
    auto tn = tape_behavior(pair.no_machine, x, 400000);
    REQUIRE(ty.has_value());
    REQUIRE(tn.has_value());
    CHECK(ty->scanned == tn->scanned);
    CHECK(ty->actions == tn->actions);
  }
}

TEST_CASE("a zero-step subject earns the verdict on every clock") {
  TuringMachine halted_already(1, TapeAlphabet("_a", "a"), {});
  HaltingGadgetPair pair = halting_gadgets(halted_already, "");
  for (const std::string& x : {std::string(), std::string("a"), std::string("a01")}) {
    RunOutcome ry = run_bounded(pair.yes_machine, x, 1000);
    RunOutcome rn = run_bounded(pair.no_machine, x, 1000);
    REQUIRE(ry.halted());
    REQUIRE(rn.halted());
    CHECK(ry.output == "1");
    CHECK(rn.output == "0");
  }
}

TEST_CASE("gadget construction rejects unusable subjects") {
  CHECK_THROWS_AS(halting_gadgets(oracle::right_mover(), "b"), std::invalid_argument);
  TuringMachine bad_blank = parse_machine(
      "tm states=2 gamma=0a sigma=a\n"
      "q0 0 -> q1 0 S\n"
      "q0 a -> q0 a R\n");
  CHECK_THROWS_AS(halting_gadgets(bad_blank, "a"), std::invalid_argument);
}

TEST_CASE("one example pins a constant behavior") {
  CharsetRequest req;
  req.tm = oracle::constant_one();
  req.source = InputSource::explicit_set({"1", "11", "111"}, "1");
  req.channel = IooChannel{};
  req.learner = EnumTmLearnerConfig{TapeAlphabet("_1", "1")};
  CharsetResult res = characteristic_set_search(req);
  REQUIRE(res.found);
  CHECK(res.size == 1);
  CHECK(res.inputs.size() == 1);
  CHECK(res.exhaustive);
  CHECK(res.served == 3);
  auto ex = make_example(req.tm, res.inputs[0], req.channel, req.example_budget);
  REQUIRE(ex.has_value());
  CHECK(res.mass == example_mass(*ex));
  CHECK(charset_qualifies(req, res.inputs));
}

TEST_CASE("found sets are minimal and stay qualifying under supersets") {
  CharsetRequest req;
  req.tm = oracle::identity_unary();
  req.source = InputSource::explicit_set({"1", "11", "111"}, "1");
  req.channel = IooChannel{};
  req.learner = EnumTmLearnerConfig{TapeAlphabet("_1", "1")};
  CharsetResult res = characteristic_set_search(req);
  REQUIRE(res.found);
  CHECK(res.exhaustive);
  CHECK(charset_qualifies(req, res.inputs));

  // no strictly smaller subset qualifies
  std::vector<std::string> served{"1", "11", "111"};
  for (std::uint64_t mask = 1; mask < 8; ++mask) {
    std::vector<std::string> subset;
    for (std::size_t i = 0; i < 3; ++i)
      if (mask >> i & 1) subset.push_back(served[i]);
    if (subset.size() < res.size) CHECK(!charset_qualifies(req, subset));
  }

  // supersets of the found set keep qualifying
  for (const std::string& extra : served) {
    std::vector<std::string> super = res.inputs;
    if (std::find(super.begin(), super.end(), extra) != super.end()) continue;
    super.push_back(extra);
    CHECK(charset_qualifies(req, super));
  }

  // capping the size below the minimum reports not-found instead
  CharsetRequest capped = req;
  capped.max_subset_size = res.size - 1;
  if (res.size > 1) {
    CharsetResult small = characteristic_set_search(capped);
    CHECK(!small.found);
    CHECK(small.inputs.empty());
  }

  // the same search under the time-bound channel also lands
  CharsetRequest tb = req;
  tb.channel = TboChannel{1, 0, 0};
  CharsetResult tbr = characteristic_set_search(tb);
  CHECK(tbr.found);
  CHECK(charset_qualifies(tb, tbr.inputs));
}

TEST_CASE("searches on a source the machine never answers come back empty") {
  CharsetRequest req;
  req.tm = oracle::runner();
  req.source = InputSource::explicit_set({"a", "aa"}, "a");
  req.channel = IooChannel{};
  req.learner = EnumTmLearnerConfig{TapeAlphabet("_a", "a")};
  req.example_budget = 100;
  CharsetResult res = characteristic_set_search(req);
  CHECK(!res.found);
  CHECK(res.served == 0);

  CHECK_THROWS_AS(charset_qualifies(req, {"a"}), std::invalid_argument);

  CharsetRequest bad = req;
  bad.channel = PtoChannel{};
  CHECK_THROWS_AS(characteristic_set_search(bad), std::invalid_argument);
  CharsetRequest inf = req;
  inf.source = InputSource::predicate("a", [](const std::string&) { return true; });
  CHECK_THROWS_AS(characteristic_set_search(inf), std::invalid_argument);
}

TEST_CASE("distinct functions expose a distinguishing input, equal ones none") {
  std::vector<std::string> inputs{"1", "11", "111"};
  auto d = distinguishing_input(oracle::identity_unary(), oracle::erase_all(), inputs,
                                IooChannel{}, 1000);
  REQUIRE(d.has_value());
  CHECK(*d == "1");

  CHECK(!distinguishing_input(oracle::identity_unary(), oracle::identity_unary(), inputs,
                              IooChannel{}, 1000)
             .has_value());

  // halting versus non-halting splits on the first input
  auto h = distinguishing_input(oracle::right_mover(), oracle::runner(), {"a", "aa"},
                                IooChannel{}, 100);
  REQUIRE(h.has_value());
  CHECK(*h == "a");

  // the two verdict machines of a non-halter agree on every channel
  HaltingGadgetPair pair = halting_gadgets(oracle::runner(), "a");
  SymbolSet sg(pair.yes_machine.alphabet().sigma());
  std::vector<std::string> probe{""};
  for (const std::string& x : oracle::strings_up_to(sg, 3)) probe.push_back(x);
  CHECK(!distinguishing_input(pair.yes_machine, pair.no_machine, probe, IooChannel{}, 400000)
             .has_value());
  CHECK(!distinguishing_input(pair.yes_machine, pair.no_machine, probe, TboChannel{1, 0, 0},
                              400000)
             .has_value());
  CHECK(!distinguishing_input(pair.yes_machine, pair.no_machine, probe, PtoChannel{}, 400000)
             .has_value());
}
