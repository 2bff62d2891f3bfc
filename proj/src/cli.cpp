#include "limitlab/cli.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "limitlab/harness.hpp"

namespace limitlab {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file '" + path + "'");
  out << text;
}

std::string dirname_of(const std::string& path) {
  std::size_t slash = path.find_last_of('/');
  return slash == std::string::npos ? std::string(".") : path.substr(0, slash);
}

void print_outcome(std::ostream& out, const RunOutcome& rc) {
  if (rc.halted()) {
    out << "halted steps=" << rc.steps << " output=";
    if (rc.output) out << *rc.output;
    else out << "undefined";
    out << "\n";
  } else {
    out << "out-of-budget steps=" << rc.steps << "\n";
  }
}

Channel channel_from_name(const std::string& name, std::uint64_t scale, std::uint64_t slack,
                          std::uint64_t seed) {
  if (name == "ioo") return IooChannel{};
  if (name == "tbo") return TboChannel{scale, slack, seed};
  if (name == "pto") return PtoChannel{};
  throw std::invalid_argument("unknown channel '" + name + "'");
}

InputSource source_from_spec(const std::string& spec, const std::string& sigma) {
  if (spec.rfind("explicit:", 0) == 0) {
    std::vector<std::string> members;
    std::string cur;
    for (char c : spec.substr(9)) {
      if (c == ',') {
        members.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    members.push_back(cur);
    return InputSource::explicit_set(std::move(members), sigma);
  }
  if (spec.rfind("length:", 0) == 0) {
    std::string range = spec.substr(7);
    std::size_t dots = range.find("..");
    if (dots == std::string::npos)
      throw std::invalid_argument("source length range needs min..max");
    return InputSource::length_bounded(sigma, std::stoi(range.substr(dots + 2)),
                                       std::stoi(range.substr(0, dots)));
  }
  throw std::invalid_argument("unknown source '" + spec + "'");
}

int cmd_simulate(const std::string& machine_path, const std::string& input,
                 std::uint64_t budget, bool trace, std::ostream& out) {
  TuringMachine tm = parse_machine(read_file(machine_path));
  if (trace) {
    auto tb = tape_behavior(tm, input, budget);
    if (!tb) {
      out << "out-of-budget steps=" << budget << "\n";
      return 0;
    }
    for (const ActionTuple& t : tb->actions)
      out << t.read << ' ' << t.write << ' ' << to_char(t.move) << "\n";
  }
  print_outcome(out, run_bounded(tm, input, budget));
  return 0;
}

int cmd_learn(const std::string& config_path, bool expect_converge, std::ostream& out) {
  EpisodeConfig cfg = parse_episode_config(read_file(config_path), dirname_of(config_path));
  EpisodeReport rep = run_episode(cfg);
  out << "learner=" << learner_kind_name(cfg.learner) << " steps=" << rep.steps.size()
      << " samples=" << rep.samples << " mass=" << rep.mass << "\n";
  out << "converged_at=";
  if (rep.convergence_step) out << *rep.convergence_step;
  else out << "none";
  out << " verified=" << verdict_name(rep.verification.verdict) << " hypothesis="
      << rep.final_index << " hash=" << std::hex << std::setw(16) << std::setfill('0')
      << rep.final_hash << std::dec << "\n";
  if (!rep.blocked.empty()) out << "blocked=" << rep.blocked.size() << "\n";
  if (rep.verification.witness) out << "witness=" << *rep.verification.witness << "\n";
  if (expect_converge && rep.verification.verdict == VerifyResult::Verdict::Disagree) return 2;
  return 0;
}

int cmd_sweep(const std::string& config_path, std::vector<std::string> orderings,
              std::vector<std::string> channels, std::vector<std::uint64_t> seeds,
              const std::string& out_path, std::ostream& out) {
  EpisodeConfig base = parse_episode_config(read_file(config_path), dirname_of(config_path));
  if (orderings.empty()) orderings.push_back(ordering_name(base.ordering));
  if (channels.empty())
    channels.push_back(base.learner == LearnerKind::EnumRational ? "seq"
                                                                 : channel_name(base.channel));
  if (seeds.empty()) seeds.push_back(base.seed);

  std::vector<std::pair<std::string, EpisodeConfig>> jobs;
  for (const std::string& o : orderings)
    for (const std::string& c : channels)
      for (std::uint64_t s : seeds) {
        EpisodeConfig cfg = base;
        cfg.seed = s;
        if (o == "round-robin") cfg.ordering = RoundRobinByLength{};
        else if (o == "shuffle") cfg.ordering = SeededShuffleCover{s};
        else throw std::invalid_argument("sweep: unknown ordering '" + o + "'");
        if (cfg.learner != LearnerKind::EnumRational && c != "seq") {
          cfg.channel = channel_from_name(c, 1, 0, s);
          if (c == "ioo") cfg.learner = LearnerKind::EnumIoo;
          else if (c == "tbo") cfg.learner = LearnerKind::EnumTbo;
          else cfg.learner = LearnerKind::Msm;
        }
        jobs.emplace_back(o + "-" + c + "-s" + std::to_string(s), std::move(cfg));
      }

  std::string csv = sweep_csv(jobs);
  if (out_path.empty()) out << csv;
  else write_file(out_path, csv);
  return 0;
}

int cmd_charset(const std::string& machine_path, const std::string& channel,
                const std::string& source_spec, std::size_t max_size, std::size_t depth,
                std::uint64_t budget, std::uint64_t seed, std::ostream& out) {
  CharsetRequest req;
  req.tm = parse_machine(read_file(machine_path));
  req.channel = channel_from_name(channel, 1, 0, seed);
  req.source = source_from_spec(source_spec, req.tm.alphabet().sigma());
  req.learner.alphabet = req.tm.alphabet();
  req.max_subset_size = max_size;
  req.verify_depth = depth;
  req.example_budget = budget;
  req.verify_budget = budget;
  req.seed = seed;
  CharsetResult res = characteristic_set_search(req);
  out << (res.found ? "found" : "not-found") << " size=" << res.size << " mass=" << res.mass
      << " regime=" << (res.exhaustive ? "exhaustive" : "sampled")
      << " supersets=" << res.supersets_checked << " served=" << res.served;
  if (res.found) {
    out << " inputs=";
    for (std::size_t i = 0; i < res.inputs.size(); ++i) {
      if (i) out << ',';
      out << res.inputs[i];
    }
  }
  out << "\n";
  return 0;
}

int cmd_gadget_double(const std::string& machine_path, const std::string& out_path,
                      std::ostream& out) {
  TuringMachine tm = parse_machine(read_file(machine_path));
  DoubledMachine d = double_transitions(remove_stay_moves(tm));
  std::string text = serialize(d.doubled);
  if (out_path.empty()) out << text;
  else {
    write_file(out_path, text);
    out << "doubled states=" << d.doubled.num_states()
        << " transitions=" << d.transition_index.size() << "\n";
  }
  return 0;
}

int cmd_gadget_yn(const std::string& machine_path, const std::string& w,
                  const std::string& yes_path, const std::string& no_path, std::ostream& out) {
  TuringMachine tm = parse_machine(read_file(machine_path));
  HaltingGadgetPair pair = halting_gadgets(tm, w);
  write_file(yes_path, serialize(pair.yes_machine));
  write_file(no_path, serialize(pair.no_machine));
  out << "gadgets states=" << pair.yes_machine.num_states()
      << " gamma=" << pair.yes_machine.alphabet().size() << "\n";
  return 0;
}

int cmd_minimize(const std::string& fst_path, const std::string& other_path,
                 std::ostream& out) {
  Transducer m = parse_transducer(read_file(fst_path));
  if (!other_path.empty()) {
    Transducer other = parse_transducer(read_file(other_path));
    EquivalenceResult eq = equivalent(m, other);
    if (eq.equal) out << "equivalent\n";
    else out << "distinguished witness=" << eq.witness << "\n";
    return 0;
  }
  out << serialize(minimize(m).machine);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"limitlab: machines, observation channels, and limit learners"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "run a machine on one input");
  std::string sim_machine, sim_input;
  std::uint64_t sim_budget = 10000;
  bool sim_trace = false;
  sim->add_option("--machine", sim_machine, "machine file")->required();
  sim->add_option("--input", sim_input, "input word (may be empty)");
  sim->add_option("--budget", sim_budget, "step budget");
  sim->add_flag("--trace", sim_trace, "print the action-tuple trajectory");

  auto* learn = app.add_subcommand("learn", "run one learning episode from a config");
  std::string learn_config;
  bool learn_expect = false;
  learn->add_option("--config", learn_config, "episode config file")->required();
  learn->add_flag("--expect-converge", learn_expect, "exit 2 on verification disagreement");

  auto* sweep = app.add_subcommand("sweep", "grid of episodes, CSV report");
  std::string sweep_config, sweep_out;
  std::vector<std::string> sweep_orderings, sweep_channels;
  std::vector<std::uint64_t> sweep_seeds;
  sweep->add_option("--config", sweep_config, "base episode config")->required();
  sweep->add_option("--orderings", sweep_orderings, "orderings to grid over")->delimiter(',');
  sweep->add_option("--channels", sweep_channels, "channels to grid over")->delimiter(',');
  sweep->add_option("--seeds", sweep_seeds, "seeds to grid over")->delimiter(',');
  sweep->add_option("--out", sweep_out, "CSV output file (default stdout)");

  auto* charset = app.add_subcommand("charset", "characteristic-set search");
  std::string cs_machine, cs_channel = "ioo", cs_source;
  std::size_t cs_max_size = 3, cs_depth = 4;
  std::uint64_t cs_budget = 100000, cs_seed = 1;
  charset->add_option("--machine", cs_machine, "target machine file")->required();
  charset->add_option("--channel", cs_channel, "ioo or tbo");
  charset->add_option("--source", cs_source, "explicit:... or length:min..max")->required();
  charset->add_option("--max-size", cs_max_size, "largest subset size tried");
  charset->add_option("--depth", cs_depth, "agreement depth");
  charset->add_option("--budget", cs_budget, "simulation budget");
  charset->add_option("--seed", cs_seed, "sampling seed");

  auto* gadget = app.add_subcommand("gadget", "emit proof-gadget machines");
  gadget->require_subcommand(1);
  auto* gdouble = gadget->add_subcommand("double", "transition-doubled machine");
  std::string gd_machine, gd_out;
  gdouble->add_option("--machine", gd_machine, "base machine file")->required();
  gdouble->add_option("--out", gd_out, "output file (default stdout)");
  auto* gyn = gadget->add_subcommand("yn", "halting gadget pair");
  std::string gy_machine, gy_input, gy_yes, gy_no;
  gyn->add_option("--machine", gy_machine, "subject machine file")->required();
  gyn->add_option("--input", gy_input, "subject input w");
  gyn->add_option("--out-yes", gy_yes, "yes-machine output file")->required();
  gyn->add_option("--out-no", gy_no, "no-machine output file")->required();

  auto* minimizec = app.add_subcommand("minimize", "minimize or compare transducers");
  std::string mz_fst, mz_other;
  minimizec->add_option("--fst", mz_fst, "transducer file")->required();
  minimizec->add_option("--equiv", mz_other, "second transducer to compare against");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_machine, sim_input, sim_budget, sim_trace, out);
    if (learn->parsed()) return cmd_learn(learn_config, learn_expect, out);
    if (sweep->parsed())
      return cmd_sweep(sweep_config, sweep_orderings, sweep_channels, sweep_seeds, sweep_out,
                       out);
    if (charset->parsed())
      return cmd_charset(cs_machine, cs_channel, cs_source, cs_max_size, cs_depth, cs_budget,
                         cs_seed, out);
    if (gadget->parsed()) {
      if (gdouble->parsed()) return cmd_gadget_double(gd_machine, gd_out, out);
      return cmd_gadget_yn(gy_machine, gy_input, gy_yes, gy_no, out);
    }
    if (minimizec->parsed()) return cmd_minimize(mz_fst, mz_other, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "error: no subcommand\n";
  return 1;
}

}  // namespace limitlab
