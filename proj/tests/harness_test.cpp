#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "limitlab/cli.hpp"
#include "limitlab/harness.hpp"
#include "oracles.hpp"

using namespace limitlab;

namespace {

namespace fs = std::filesystem;

// scratch directory for config and machine files the parser must read back
fs::path scratch() {
  fs::path dir = fs::temp_directory_path() / "limitlab_harness_test";
  fs::create_directories(dir);
  return dir;
}

std::string put_file(const std::string& name, const std::string& text) {
  fs::path p = scratch() / name;
  std::ofstream out(p, std::ios::binary);
  out << text;
  out.close();
  return p.string();
}

EpisodeConfig unary_identity_episode(LearnerKind kind, const Channel& ch) {
  EpisodeConfig cfg;
  cfg.ground_truth = oracle::identity_unary();
  cfg.channel = ch;
  cfg.source = InputSource::explicit_set({"1", "11", "111"}, "1");
  cfg.ordering = RoundRobinByLength{};
  cfg.learner = kind;
  cfg.enum_config = EnumTmLearnerConfig{TapeAlphabet("_1", "1")};
  cfg.horizon = 30;
  cfg.verify_depth = 3;
  return cfg;
}

void check_same_report(const EpisodeReport& a, const EpisodeReport& b) {
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].t == b.steps[i].t);
    CHECK(a.steps[i].x == b.steps[i].x);
    CHECK(a.steps[i].served == b.steps[i].served);
    CHECK(a.steps[i].hyp_index == b.steps[i].hyp_index);
    CHECK(a.steps[i].hyp_hash == b.steps[i].hyp_hash);
    CHECK(a.steps[i].validated == b.steps[i].validated);
  }
  CHECK(a.blocked == b.blocked);
  CHECK(a.convergence_step == b.convergence_step);
  CHECK(a.verification.verdict == b.verification.verdict);
  CHECK(a.samples == b.samples);
  CHECK(a.mass == b.mass);
  CHECK(a.final_index == b.final_index);
  CHECK(a.final_hash == b.final_hash);
}

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("the report hash is plain FNV-1a over the serialization") {
  CHECK(fnv1a64("") == 14695981039346656037ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("report vocabulary is frozen") {
  CHECK(std::string(learner_kind_name(LearnerKind::EnumIoo)) == "enum-ioo");
  CHECK(std::string(learner_kind_name(LearnerKind::EnumTbo)) == "enum-tbo");
  CHECK(std::string(learner_kind_name(LearnerKind::EnumRational)) == "enum-rational");
  CHECK(std::string(learner_kind_name(LearnerKind::Msm)) == "msm");
  CHECK(std::string(verdict_name(VerifyResult::Verdict::Agree)) == "agree");
  CHECK(std::string(verdict_name(VerifyResult::Verdict::Disagree)) == "disagree");
  CHECK(std::string(verdict_name(VerifyResult::Verdict::Inconclusive)) == "inconclusive");
  CHECK(std::string(ordering_name(RoundRobinByLength{})) == "round-robin");
  CHECK(std::string(ordering_name(SeededShuffleCover{1})) == "shuffle");
  CHECK(std::string(ordering_name(AdversarialScript{{0}, true})) == "script");
  CHECK(std::string(channel_name(IooChannel{})) == "ioo");
  CHECK(std::string(channel_name(TboChannel{})) == "tbo");
  CHECK(std::string(channel_name(PtoChannel{})) == "pto");
}

TEST_CASE("machine verification: agree, least witness, inconclusive") {
  InputSource src = InputSource::explicit_set({"1", "11"}, "1");
  TuringMachine id = oracle::identity_unary();

  VerifyResult same = verify_hypothesis(id, id, src, 2, 1000);
  CHECK(same.verdict == VerifyResult::Verdict::Agree);
  CHECK(!same.witness.has_value());
  CHECK(same.inconclusive_inputs.empty());

  VerifyResult diff = verify_hypothesis(oracle::erase_all(), id, src, 2, 1000);
  CHECK(diff.verdict == VerifyResult::Verdict::Disagree);
  REQUIRE(diff.witness.has_value());
  CHECK(*diff.witness == "1");  // canonical scan order makes the witness least

  // budget exhaustion on either side only weakens the verdict
  InputSource asrc = InputSource::explicit_set({"a", "aa", "aaa"}, "a");
  TuringMachine rm = oracle::right_mover();
  VerifyResult inc = verify_hypothesis(rm, rm, asrc, 3, 3);
  CHECK(inc.verdict == VerifyResult::Verdict::Inconclusive);
  CHECK(inc.inconclusive_inputs == std::vector<std::string>{"aaa"});

  // a definite mismatch still beats an earlier inconclusive input
  TuringMachine loop_on_a = parse_machine(
      "tm states=3 gamma=_a sigma=a\n"
      "q0 _ -> q2 _ S\n"
      "q0 a -> q1 a R\n"
      "q1 _ -> q1 _ S\n"
      "q1 a -> q2 a L\n");
  TuringMachine eraser = parse_machine(
      "tm states=2 gamma=_a sigma=a\n"
      "q0 _ -> q1 _ S\n"
      "q0 a -> q0 _ R\n");
  InputSource two = InputSource::explicit_set({"a", "aa"}, "a");
  VerifyResult mixed = verify_hypothesis(eraser, loop_on_a, two, 2, 1000);
  CHECK(mixed.verdict == VerifyResult::Verdict::Disagree);
  REQUIRE(mixed.witness.has_value());
  CHECK(*mixed.witness == "aa");
  CHECK(mixed.inconclusive_inputs == std::vector<std::string>{"a"});
}

TEST_CASE("transducer verification compares per-step output strings") {
  SymbolSet a("ab"), b("01");
  Transducer zero(1, a, b, {0, 0}, {'0', '0'});
  Transducer one(1, a, b, {0, 0}, {'1', '1'});
  InputSource src = InputSource::explicit_set({"a", "b", "ab"}, "ab");

  CHECK(verify_hypothesis(zero, zero, src, 2).verdict == VerifyResult::Verdict::Agree);
  VerifyResult diff = verify_hypothesis(zero, one, src, 2);
  CHECK(diff.verdict == VerifyResult::Verdict::Disagree);
  CHECK(*diff.witness == "a");

  // members outside a machine's input alphabet are inconclusive, not fatal
  Transducer narrow(1, SymbolSet("a"), b, {0}, {'0'});
  VerifyResult inc = verify_hypothesis(narrow, zero, src, 2);
  CHECK(inc.verdict == VerifyResult::Verdict::Inconclusive);
  CHECK(inc.inconclusive_inputs == std::vector<std::string>{"b", "ab"});
}

TEST_CASE("policy verification replays the subject's coded actions") {
  TuringMachine id = oracle::identity_unary();
  WriteMoveCoder coder(id.alphabet());
  InputSource src = InputSource::explicit_set({"1", "11", "111"}, "1");

  ExampleSet set;
  for (const std::string& x : {"1", "11", "111"})
    set.insert(*make_example(id, x, PtoChannel{}, 1000));
  PartialTransducer policy = msm(build_observation_tree(
      pto_reduce(set, coder), SymbolSet(id.alphabet().gamma()), coder.b()));

  VerifyResult ok = verify_hypothesis(policy, coder, id, src, 3, 1000);
  CHECK(ok.verdict == VerifyResult::Verdict::Agree);

  // a policy that emits the wrong action is caught on the least witness
  PartialTransducer wrong(1, SymbolSet(id.alphabet().gamma()), coder.b());
  wrong.set_transition(0, wrong.a().index_of('1'), 0, coder.encode('_', Move::Right));
  wrong.set_transition(0, wrong.a().index_of('_'), 0, coder.encode('_', Move::Stay));
  VerifyResult bad = verify_hypothesis(wrong, coder, id, src, 3, 1000);
  CHECK(bad.verdict == VerifyResult::Verdict::Disagree);
  CHECK(*bad.witness == "1");

  // a non-halting truth yields no trajectories to replay
  TuringMachine run = oracle::runner();
  WriteMoveCoder rcoder(run.alphabet());
  InputSource asrc = InputSource::explicit_set({"a"}, "a");
  VerifyResult inc = verify_hypothesis(policy, rcoder, run, asrc, 1, 100);
  CHECK(inc.verdict == VerifyResult::Verdict::Inconclusive);
  CHECK(inc.inconclusive_inputs == std::vector<std::string>{"a"});
}

TEST_CASE("episodes are deterministic modulo wall time") {
  for (LearnerKind kind : {LearnerKind::EnumIoo, LearnerKind::EnumTbo, LearnerKind::Msm}) {
    Channel ch = kind == LearnerKind::EnumTbo ? Channel{TboChannel{1, 0, 0}}
                 : kind == LearnerKind::Msm   ? Channel{PtoChannel{}}
                                              : Channel{IooChannel{}};
    EpisodeConfig cfg = unary_identity_episode(kind, ch);
    check_same_report(run_episode(cfg), run_episode(cfg));
  }
}

TEST_CASE("every presentation order converges to the same hypothesis") {
  std::vector<std::vector<std::size_t>> perms{{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                              {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (LearnerKind kind : {LearnerKind::EnumIoo, LearnerKind::EnumTbo, LearnerKind::Msm}) {
    Channel ch = kind == LearnerKind::EnumTbo ? Channel{TboChannel{1, 0, 0}}
                 : kind == LearnerKind::Msm   ? Channel{PtoChannel{}}
                                              : Channel{IooChannel{}};
    std::set<std::uint64_t> hashes;
    for (const auto& p : perms) {
      EpisodeConfig cfg = unary_identity_episode(kind, ch);
      cfg.ordering = AdversarialScript{p, true};
      EpisodeReport rep = run_episode(cfg);
      REQUIRE(rep.convergence_step.has_value());
      CHECK(rep.verification.verdict == VerifyResult::Verdict::Agree);
      CHECK(rep.final_hash != 0);
      hashes.insert(rep.final_hash);
    }
    CHECK(hashes.size() == 1);
  }
}

TEST_CASE("convergence needs a confirming step inside the horizon") {
  EpisodeConfig cfg = unary_identity_episode(LearnerKind::EnumIoo, IooChannel{});
  cfg.horizon = 1;
  EpisodeReport rep = run_episode(cfg);
  CHECK(!rep.convergence_step.has_value());
  CHECK(rep.final_hash != 0);

  // doubling the horizon does not move a converged hypothesis
  EpisodeConfig base = unary_identity_episode(LearnerKind::EnumIoo, IooChannel{});
  EpisodeReport r30 = run_episode(base);
  base.horizon = 60;
  EpisodeReport r60 = run_episode(base);
  REQUIRE(r30.convergence_step.has_value());
  REQUIRE(r60.convergence_step.has_value());
  CHECK(*r30.convergence_step == *r60.convergence_step);
  CHECK(r30.final_hash == r60.final_hash);
}

TEST_CASE("blocked inputs double the budget and keep the step record") {
  EpisodeConfig cfg;
  cfg.ground_truth = oracle::right_mover();
  cfg.channel = IooChannel{};
  cfg.source = InputSource::explicit_set({"a"}, "a");
  cfg.ordering = RoundRobinByLength{};
  cfg.learner = LearnerKind::EnumIoo;
  cfg.enum_config = EnumTmLearnerConfig{TapeAlphabet("_a", "a")};
  cfg.horizon = 5;
  cfg.verify_depth = 1;
  cfg.budget0 = 1;  // the subject needs 2 steps on "a"
  EpisodeReport rep = run_episode(cfg);
  REQUIRE(rep.steps.size() == 5);
  CHECK(!rep.steps[0].served);
  CHECK(rep.steps[0].hyp_hash == 0);
  CHECK(rep.blocked == std::vector<std::pair<int, std::string>>{{1, "a"}});
  CHECK(rep.samples == 4);
  REQUIRE(rep.convergence_step.has_value());
  CHECK(*rep.convergence_step == 2);
  CHECK(rep.verification.verdict == VerifyResult::Verdict::Agree);
}

TEST_CASE("the sequence learner episode tracks pair mass") {
  SymbolSet a("ab"), b("01");
  Transducer truth = enumerate_transducer(7, a, b);
  EpisodeConfig cfg;
  cfg.ground_truth = truth;
  cfg.source = InputSource::explicit_set({"a", "b", "ab"}, "ab");
  cfg.ordering = RoundRobinByLength{};
  cfg.learner = LearnerKind::EnumRational;
  cfg.horizon = 20;
  cfg.verify_depth = 3;
  EpisodeReport rep = run_episode(cfg);
  CHECK(rep.samples == 20);
  CHECK(rep.mass == 2 + 2 + 4);  // |x|+|y| per distinct pair
  REQUIRE(rep.convergence_step.has_value());
  CHECK(rep.verification.verdict == VerifyResult::Verdict::Agree);
  CHECK(rep.final_index >= 1);
}

TEST_CASE("mismatched learner and channel configurations are rejected") {
  EpisodeConfig cfg = unary_identity_episode(LearnerKind::EnumIoo, IooChannel{});
  cfg.channel = TboChannel{};
  CHECK_THROWS_AS(run_episode(cfg), std::invalid_argument);

  cfg = unary_identity_episode(LearnerKind::EnumTbo, TboChannel{});
  cfg.channel = IooChannel{};
  CHECK_THROWS_AS(run_episode(cfg), std::invalid_argument);

  cfg = unary_identity_episode(LearnerKind::Msm, PtoChannel{});
  cfg.channel = IooChannel{};
  CHECK_THROWS_AS(run_episode(cfg), std::invalid_argument);

  cfg = unary_identity_episode(LearnerKind::EnumRational, IooChannel{});
  CHECK_THROWS_AS(run_episode(cfg), std::invalid_argument);  // machine truth

  cfg = unary_identity_episode(LearnerKind::EnumIoo, IooChannel{});
  cfg.horizon = 0;
  CHECK_THROWS_AS(run_episode(cfg), std::invalid_argument);

  cfg = unary_identity_episode(LearnerKind::EnumIoo, IooChannel{});
  cfg.budget0 = 0;
  CHECK_THROWS_AS(run_episode(cfg), std::invalid_argument);

  cfg = unary_identity_episode(LearnerKind::EnumIoo, IooChannel{});
  cfg.verify_depth = 2;  // source holds "111"
  CHECK_THROWS_AS(run_episode(cfg), std::invalid_argument);
}

TEST_CASE("episode configs parse from key=value text") {
  std::string tm_path = put_file("idu.tm", serialize(oracle::identity_unary()));
  std::string text =
      "# comment line\n"
      "learner = enum-tbo\n"
      "truth = idu.tm\n"
      "source = explicit:1,11\n"
      "ordering = script:1,0\n"
      "tbo_scale = 2\n"
      "horizon = 7\n"
      "budget = 500\n"
      "seed = 9\n";
  EpisodeConfig cfg = parse_episode_config(text, scratch().string());
  CHECK(cfg.learner == LearnerKind::EnumTbo);
  CHECK(std::get<TboChannel>(cfg.channel).scale == 2);
  CHECK(cfg.source.size() == 2);
  CHECK(std::get<AdversarialScript>(cfg.ordering).indices ==
        std::vector<std::size_t>{1, 0});
  CHECK(cfg.horizon == 7);
  CHECK(cfg.budget0 == 500);
  CHECK(cfg.seed == 9);
  CHECK(cfg.verify_depth == 2);  // defaults to the longest source member
  CHECK(cfg.enum_config.alphabet.gamma() == "_1");

  // channel defaults follow the learner
  EpisodeConfig msm_cfg = parse_episode_config(
      "learner=msm\ntruth=idu.tm\nsource=explicit:1\n", scratch().string());
  CHECK(std::holds_alternative<PtoChannel>(msm_cfg.channel));
  CHECK(msm_cfg.horizon == 100);

  EpisodeConfig len_cfg = parse_episode_config(
      "learner=enum-ioo\ntruth=idu.tm\nsource=length:1..3\nordering=shuffle\nseed=4\n"
      "mode=poly-capped\ncap_coeff=50\ncap_exp=1\nq_overhead=linear\nclass_bound=quadratic\n",
      scratch().string());
  CHECK(len_cfg.source.size() == 3);
  CHECK(std::get<SeededShuffleCover>(len_cfg.ordering).seed == 4);
  CHECK(len_cfg.enum_config.mode == LearnerMode::PolynomialCapped);
  CHECK(len_cfg.enum_config.cap_coeff == 50);
  CHECK(len_cfg.enum_config.cap_exp == 1);
  CHECK(len_cfg.enum_config.q_overhead.name == "linear");
  CHECK(len_cfg.enum_config.class_bound.name == "quadratic");

  // a parsed config actually runs
  EpisodeReport rep = run_episode(cfg);
  CHECK(rep.steps.size() == 7);
  CHECK(rep.verification.verdict == VerifyResult::Verdict::Agree);
}

TEST_CASE("config errors name the offense") {
  std::string tm_path = put_file("idu.tm", serialize(oracle::identity_unary()));
  std::string base = scratch().string();
  auto bad = [&](const std::string& text) { parse_episode_config(text, base); };

  CHECK_THROWS_AS(bad("learner=enum-ioo\nsource=explicit:1\n"), std::invalid_argument);
  CHECK_THROWS_AS(bad("learner=alchemy\ntruth=idu.tm\nsource=explicit:1\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(bad("learner=enum-ioo\ntruth=idu.tm\nsource=explicit:1\nchannel=qqo\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(bad("learner=enum-ioo\ntruth=idu.tm\nsource=mystery:1\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(bad("learner=enum-ioo\ntruth=idu.tm\nsource=length:3\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(bad("learner=enum-ioo\ntruth=idu.tm\nsource=explicit:1\nordering=zigzag\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(bad("learner=enum-ioo\ntruth=idu.tm\nsource=explicit:1\nhorizon=soon\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(bad("learner=enum-ioo\ntruth=idu.tm\nsource=explicit:1\nmode=sometimes\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(bad("learner=enum-ioo\ntruth=missing.tm\nsource=explicit:1\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(bad("learner=enum-ioo\nlearner=msm\ntruth=idu.tm\nsource=explicit:1\n"),
                  ParseError);
  CHECK_THROWS_AS(bad("just some words\n"), ParseError);
}

TEST_CASE("sweeps emit one sorted CSV row per job") {
  EpisodeConfig ioo = unary_identity_episode(LearnerKind::EnumIoo, IooChannel{});
  EpisodeConfig tbo = unary_identity_episode(LearnerKind::EnumTbo, TboChannel{1, 0, 0});
  std::string csv = sweep_csv({{"b-second", tbo}, {"a-first", ioo}});

  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "config_id,seed,ordering,channel,converged_at,verified,samples,mass,wall_ms");
  CHECK(lines[1].rfind("a-first,0,round-robin,ioo,", 0) == 0);
  CHECK(lines[2].rfind("b-second,0,round-robin,tbo,", 0) == 0);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    CHECK(std::count(lines[i].begin(), lines[i].end(), ',') == 8);
    CHECK(lines[i].find(",agree,") != std::string::npos);
  }

  // identical jobs produce identical rows up to the wall-time field
  std::string again = sweep_csv({{"a-first", ioo}});
  std::string row1 = lines[1].substr(0, lines[1].rfind(','));
  std::istringstream in2(again);
  std::getline(in2, line);
  std::getline(in2, line);
  CHECK(line.substr(0, line.rfind(',')) == row1);
}

TEST_CASE("command line: simulate prints the run outcome") {
  std::string tm_path = put_file("idu.tm", serialize(oracle::identity_unary()));
  std::string out;
  CHECK(cli({"simulate", "--machine", tm_path, "--input", "11", "--budget", "100"}, &out) == 0);
  CHECK(out == "halted steps=3 output=11\n");

  CHECK(cli({"simulate", "--machine", tm_path, "--input", "11", "--budget", "1"}, &out) == 0);
  CHECK(out == "out-of-budget steps=1\n");

  CHECK(cli({"simulate", "--machine", tm_path, "--input", "1", "--budget", "100", "--trace"},
            &out) == 0);
  CHECK(out == "1 1 R\n_ _ S\nhalted steps=2 output=1\n");

  std::string err;
  CHECK(cli({"simulate", "--machine", (scratch() / "nope.tm").string()}, &out, &err) == 1);
  CHECK(err.find("error:") != std::string::npos);
  CHECK(cli({"simulate"}, &out, &err) == 1);  // --machine is required
  CHECK(cli({"conjure"}, &out, &err) == 1);
}

TEST_CASE("command line: learn reports and enforces convergence") {
  std::string tm_path = put_file("idu.tm", serialize(oracle::identity_unary()));
  put_file("ep_ioo.cfg",
           "learner=enum-ioo\ntruth=idu.tm\nsource=explicit:1,11,111\nhorizon=20\n");
  std::string out;
  CHECK(cli({"learn", "--config", (scratch() / "ep_ioo.cfg").string()}, &out) == 0);
  CHECK(out.find("learner=enum-ioo steps=20") != std::string::npos);
  CHECK(out.find("converged_at=1") != std::string::npos);
  CHECK(out.find("verified=agree") != std::string::npos);
  CHECK(out.find("hypothesis=10") != std::string::npos);

  // one example is not enough to separate identity from constant output
  put_file("c1.tm", serialize(oracle::constant_one()));
  put_file("ep_partial.cfg",
           "learner=enum-ioo\ntruth=c1.tm\nsource=explicit:1,11,111\nhorizon=1\n");
  int code = cli({"learn", "--config", (scratch() / "ep_partial.cfg").string(),
                  "--expect-converge"},
                 &out);
  CHECK(code == 2);
  CHECK(out.find("verified=disagree") != std::string::npos);
  CHECK(out.find("witness=11") != std::string::npos);
  // without the flag the same run only reports
  CHECK(cli({"learn", "--config", (scratch() / "ep_partial.cfg").string()}, &out) == 0);
}

TEST_CASE("command line: sweep grids orderings and channels") {
  put_file("idu.tm", serialize(oracle::identity_unary()));
  put_file("ep_base.cfg",
           "learner=enum-ioo\ntruth=idu.tm\nsource=explicit:1,11\nhorizon=12\n");
  std::string out;
  CHECK(cli({"sweep", "--config", (scratch() / "ep_base.cfg").string(), "--orderings",
             "round-robin,shuffle", "--channels", "ioo,tbo", "--seeds", "1,2"},
            &out) == 0);
  std::istringstream in(out);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 9);  // header + 2*2*2 jobs
  CHECK(lines[0] ==
        "config_id,seed,ordering,channel,converged_at,verified,samples,mass,wall_ms");
  CHECK(std::is_sorted(lines.begin() + 1, lines.end()));
  for (std::size_t i = 1; i < lines.size(); ++i)
    CHECK(lines[i].find(",agree,") != std::string::npos);

  std::string csv_path = (scratch() / "grid.csv").string();
  CHECK(cli({"sweep", "--config", (scratch() / "ep_base.cfg").string(), "--out", csv_path},
            &out) == 0);
  std::ifstream written(csv_path);
  REQUIRE(written.good());
  std::getline(written, line);
  CHECK(line == "config_id,seed,ordering,channel,converged_at,verified,samples,mass,wall_ms");
}

TEST_CASE("command line: charset search output") {
  std::string tm_path = put_file("const1.tm", serialize(oracle::constant_one()));
  std::string out;
  CHECK(cli({"charset", "--machine", tm_path, "--source", "explicit:1,11,111"}, &out) == 0);
  CHECK(out.rfind("found size=1 ", 0) == 0);
  CHECK(out.find("regime=exhaustive") != std::string::npos);
  CHECK(out.find("served=3") != std::string::npos);
  // singletons below {"111"} steer the learner to identity, clashing with
  // the longer served inputs, so the search lands on the largest singleton
  CHECK(out.find("inputs=111\n") != std::string::npos);
}

TEST_CASE("command line: gadget double round-trips through serialization") {
  std::string tm_path = put_file("idu.tm", serialize(oracle::identity_unary()));
  std::string out_path = (scratch() / "doubled.tm").string();
  std::string out;
  CHECK(cli({"gadget", "double", "--machine", tm_path, "--out", out_path}, &out) == 0);

  DoubledMachine want = double_transitions(remove_stay_moves(oracle::identity_unary()));
  std::ostringstream expect;
  expect << "doubled states=" << want.doubled.num_states()
         << " transitions=" << want.transition_index.size() << "\n";
  CHECK(out == expect.str());

  std::ifstream in(out_path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  TuringMachine doubled = parse_machine(text.str());
  TuringMachine stay_free = remove_stay_moves(oracle::identity_unary());
  for (const std::string& x : {"", "1", "11"}) {
    RunOutcome a = run_bounded(stay_free, x, 200);
    RunOutcome b = run_bounded(doubled, x, 400);
    REQUIRE(a.halted());
    REQUIRE(b.halted());
    CHECK(b.steps == 2 * a.steps);
    CHECK(b.output == a.output);
  }
}

TEST_CASE("command line: gadget yn writes a working verdict pair") {
  std::string tm_path = put_file("rmover.tm", serialize(oracle::right_mover()));
  std::string yes_path = (scratch() / "yes.tm").string();
  std::string no_path = (scratch() / "no.tm").string();
  std::string out;
  CHECK(cli({"gadget", "yn", "--machine", tm_path, "--input", "aa", "--out-yes", yes_path,
             "--out-no", no_path},
            &out) == 0);
  CHECK(out.rfind("gadgets states=", 0) == 0);

  auto load = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_machine(text.str());
  };
  TuringMachine yes = load(yes_path), no = load(no_path);
  // subject halts on "aa" in 3 steps: clocks of length 3 earn the verdict
  RunOutcome ry = run_bounded(yes, "aaa", 200000);
  RunOutcome rn = run_bounded(no, "aaa", 200000);
  REQUIRE(ry.halted());
  REQUIRE(rn.halted());
  CHECK(ry.output == "1");
  CHECK(rn.output == "0");
  auto ty = tape_behavior(yes, "aa", 200000);
  auto tn = tape_behavior(no, "aa", 200000);
  REQUIRE(ty.has_value());
  REQUIRE(tn.has_value());
  CHECK(ty->actions == tn->actions);
}

TEST_CASE("command line: minimize and equivalence checking") {
  SymbolSet a("ab"), b("01");
  // two states that both emit 0 everywhere: collapses to one
  Transducer redundant(2, a, b, {1, 1, 0, 0}, {'0', '0', '0', '0'});
  std::string fst_path = put_file("m.fst", serialize(redundant));
  std::string out;
  CHECK(cli({"minimize", "--fst", fst_path}, &out) == 0);
  Transducer minimized = parse_transducer(out);
  CHECK(minimized.num_states() == 1);
  CHECK(equivalent(minimized, redundant).equal);

  std::string zero_path = put_file("zero.fst",
                                   serialize(Transducer(1, a, b, {0, 0}, {'0', '0'})));
  std::string one_path = put_file("one.fst",
                                  serialize(Transducer(1, a, b, {0, 0}, {'1', '1'})));
  CHECK(cli({"minimize", "--fst", fst_path, "--equiv", zero_path}, &out) == 0);
  CHECK(out == "equivalent\n");
  CHECK(cli({"minimize", "--fst", fst_path, "--equiv", one_path}, &out) == 0);
  CHECK(out.rfind("distinguished witness=", 0) == 0);
  CHECK(out.size() > std::string("distinguished witness=\n").size());
}
