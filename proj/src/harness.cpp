#include "limitlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <sstream>

namespace limitlab {

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

const char* learner_kind_name(LearnerKind k) {
  switch (k) {
    case LearnerKind::EnumIoo: return "enum-ioo";
    case LearnerKind::EnumTbo: return "enum-tbo";
    case LearnerKind::EnumRational: return "enum-rational";
    case LearnerKind::Msm: return "msm";
  }
  return "?";
}

const char* verdict_name(VerifyResult::Verdict v) {
  switch (v) {
    case VerifyResult::Verdict::Agree: return "agree";
    case VerifyResult::Verdict::Disagree: return "disagree";
    case VerifyResult::Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

const char* ordering_name(const OrderingStrategy& s) {
  if (std::holds_alternative<RoundRobinByLength>(s)) return "round-robin";
  if (std::holds_alternative<SeededShuffleCover>(s)) return "shuffle";
  return "script";
}

const char* channel_name(const Channel& c) {
  if (std::holds_alternative<IooChannel>(c)) return "ioo";
  if (std::holds_alternative<TboChannel>(c)) return "tbo";
  return "pto";
}

namespace {

std::vector<std::string> scan_inputs(const InputSource& source, std::size_t depth) {
  return source.members_up_to_length(depth);
}

template <typename RunHyp, typename RunTruth>
VerifyResult verify_scan(const std::vector<std::string>& inputs, RunHyp run_hyp,
                         RunTruth run_truth) {
  VerifyResult res;
  for (const std::string& x : inputs) {
    auto a = run_hyp(x);    // optional<optional<string>>: outer = halted
    auto b = run_truth(x);
    if (!a || !b) {
      res.inconclusive_inputs.push_back(x);
      continue;
    }
    if (*a != *b) {  // a definite mismatch wins over any earlier Inconclusive
      res.verdict = VerifyResult::Verdict::Disagree;
      res.witness = x;
      return res;
    }
  }
  res.verdict = res.inconclusive_inputs.empty() ? VerifyResult::Verdict::Agree
                                                : VerifyResult::Verdict::Inconclusive;
  return res;
}

std::optional<std::optional<std::string>> bounded_output(const TuringMachine& tm,
                                                         const std::string& x,
                                                         std::uint64_t budget) {
  RunOutcome rc = run_bounded(tm, x, budget);
  if (!rc.halted()) return std::nullopt;
  return std::optional<std::optional<std::string>>{rc.output};
}

}  // namespace

VerifyResult verify_hypothesis(const TuringMachine& hypothesis, const TuringMachine& truth,
                               const InputSource& source, std::size_t depth,
                               std::uint64_t budget) {
  return verify_scan(
      scan_inputs(source, depth),
      [&](const std::string& x) { return bounded_output(hypothesis, x, budget); },
      [&](const std::string& x) { return bounded_output(truth, x, budget); });
}

VerifyResult verify_hypothesis(const Transducer& hypothesis, const Transducer& truth,
                               const InputSource& source, std::size_t depth) {
  auto run = [](const Transducer& m, const std::string& x)
      -> std::optional<std::optional<std::string>> {
    for (char c : x)
      if (!m.a().contains(c)) return std::nullopt;  // outside the machine's domain
    return std::optional<std::optional<std::string>>{std::optional<std::string>{seq_map(m, x)}};
  };
  return verify_scan(
      scan_inputs(source, depth),
      [&](const std::string& x) { return run(hypothesis, x); },
      [&](const std::string& x) { return run(truth, x); });
}

// A merged policy may define extra transitions past the point where the
// subject halts, so closed-loop execution can overrun.  Agreement is judged
// by replay instead: the policy must reproduce the subject's coded action
// sequence when fed the subject's scanned string.
VerifyResult verify_hypothesis(const PartialTransducer& policy, const WriteMoveCoder& coder,
                               const TuringMachine& truth, const InputSource& source,
                               std::size_t depth, std::uint64_t budget) {
  VerifyResult res;
  for (const std::string& x : source.members_up_to_length(depth)) {
    std::optional<TapeBehavior> tb = tape_behavior(truth, x, budget);
    if (!tb) {
      res.inconclusive_inputs.push_back(x);
      continue;
    }
    std::string want = coder.encode_actions(tb->actions);
    std::optional<std::string> got = partial_seq_map(policy, tb->scanned);
    if (!got || *got != want) {
      res.verdict = VerifyResult::Verdict::Disagree;
      res.witness = x;
      return res;
    }
  }
  res.verdict = res.inconclusive_inputs.empty() ? VerifyResult::Verdict::Agree
                                                : VerifyResult::Verdict::Inconclusive;
  return res;
}

namespace {

void validate_config(const EpisodeConfig& cfg) {
  if (cfg.horizon < 1) throw std::invalid_argument("episode: horizon must be at least 1");
  if (cfg.budget0 == 0) throw std::invalid_argument("episode: starting budget must be positive");
  bool tm_truth = std::holds_alternative<TuringMachine>(cfg.ground_truth);
  switch (cfg.learner) {
    case LearnerKind::EnumIoo:
      if (!tm_truth || !std::holds_alternative<IooChannel>(cfg.channel))
        throw std::invalid_argument("episode: enum-ioo needs a machine truth and ioo channel");
      break;
    case LearnerKind::EnumTbo:
      if (!tm_truth || !std::holds_alternative<TboChannel>(cfg.channel))
        throw std::invalid_argument("episode: enum-tbo needs a machine truth and tbo channel");
      break;
    case LearnerKind::Msm:
      if (!tm_truth || !std::holds_alternative<PtoChannel>(cfg.channel))
        throw std::invalid_argument("episode: msm needs a machine truth and pto channel");
      break;
    case LearnerKind::EnumRational:
      if (tm_truth)
        throw std::invalid_argument("episode: enum-rational needs a transducer truth");
      break;
  }
  if (cfg.source.finite())
    for (std::size_t i = 0; i < cfg.source.size(); ++i)
      if (cfg.source.member(i).size() > cfg.verify_depth)
        throw std::invalid_argument(
            "episode: verify_depth must cover every explicit source member");
}

std::optional<int> detect_convergence(const std::vector<StepRecord>& steps) {
  if (steps.empty()) return std::nullopt;
  std::uint64_t last = steps.back().hyp_hash;
  if (last == 0) return std::nullopt;  // never formed a hypothesis
  int horizon = steps.back().t;
  int at = horizon;
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    if (it->hyp_hash != last) break;
    at = it->t;
  }
  if (at >= horizon) return std::nullopt;  // stability needs a later confirming step
  return at;
}

}  // namespace

EpisodeReport run_episode(const EpisodeConfig& cfg) {
  validate_config(cfg);
  auto t0 = std::chrono::steady_clock::now();

  Ordering ordering(cfg.source, cfg.ordering);
  EpisodeReport rep;
  std::uint64_t budget = cfg.budget0;

  const TuringMachine* tm = std::get_if<TuringMachine>(&cfg.ground_truth);
  const Transducer* ft = std::get_if<Transducer>(&cfg.ground_truth);

  std::optional<EnumTmLearner> enum_learner;
  if (cfg.learner == LearnerKind::EnumIoo || cfg.learner == LearnerKind::EnumTbo)
    enum_learner.emplace(cfg.enum_config, cfg.learner == LearnerKind::EnumTbo);

  std::optional<RationalEnumLearner> rational;
  if (cfg.learner == LearnerKind::EnumRational) rational.emplace(ft->a(), ft->b());
  std::uint64_t rational_mass = 0;
  std::size_t rational_seen = 0;

  std::optional<WriteMoveCoder> coder;
  ExampleSet msm_seen;
  std::optional<PartialTransducer> msm_policy;
  if (cfg.learner == LearnerKind::Msm) coder.emplace(tm->alphabet());

  std::uint64_t hash = 0, index = 0;
  bool validated = false;

  for (int t = 1; t <= cfg.horizon; ++t) {
    std::string x = ordering.next_input(static_cast<std::uint64_t>(t));
    StepRecord step;
    step.t = t;
    step.x = x;

    if (cfg.learner == LearnerKind::EnumRational) {
      std::string y = seq_map(*ft, x);
      index = rational->observe(x, y);
      if (rational->seen().size() != rational_seen) {
        rational_seen = rational->seen().size();
        rational_mass += x.size() + y.size();
      }
      hash = fnv1a64(serialize(canonical_form(minimize(rational->machine(index)).machine)));
      validated = true;
    } else {
      auto ex = make_example(*tm, x, cfg.channel, budget);
      if (!ex) {
        step.served = false;
        step.hyp_index = index;
        step.hyp_hash = hash;
        step.validated = validated;
        rep.steps.push_back(std::move(step));
        rep.blocked.emplace_back(t, x);
        budget = sat_mul(budget, 2);
        continue;
      }
      if (enum_learner) {
        Hypothesis h = enum_learner->observe(*ex);
        index = h.index;
        validated = h.validated;
        hash = h.index == 0 ? 0 : fnv1a64(serialize(enum_learner->machine(h.index)));
      } else {  // msm
        std::size_t before = msm_seen.size();
        msm_seen.insert(*ex);
        if (msm_seen.size() != before || !msm_policy) {
          auto pairs = pto_reduce(msm_seen, *coder);
          ObservationTree tree =
              build_observation_tree(pairs, SymbolSet(tm->alphabet().gamma()), coder->b());
          msm_policy = msm(tree);
        }
        hash = fnv1a64(serialize(canonical_form(*msm_policy)));
        index = 0;
        validated = true;
      }
    }

    step.hyp_index = index;
    step.hyp_hash = hash;
    step.validated = validated;
    rep.steps.push_back(std::move(step));
    ++rep.samples;
  }

  rep.convergence_step = detect_convergence(rep.steps);
  rep.final_index = index;
  rep.final_hash = hash;

  if (cfg.learner == LearnerKind::EnumRational) {
    rep.mass = rational_mass;
    rep.verification = verify_hypothesis(rational->machine(index), *ft, cfg.source,
                                         cfg.verify_depth);
  } else if (enum_learner) {
    rep.mass = enum_learner->seen().mass();
    if (index == 0) {
      rep.verification.verdict = VerifyResult::Verdict::Inconclusive;
    } else {
      rep.verification = verify_hypothesis(enum_learner->machine(index), *tm, cfg.source,
                                           cfg.verify_depth, cfg.verify_budget);
    }
  } else {
    rep.mass = msm_seen.mass();
    if (!msm_policy) {
      rep.verification.verdict = VerifyResult::Verdict::Inconclusive;
    } else {
      rep.verification = verify_hypothesis(*msm_policy, *coder, *tm, cfg.source,
                                           cfg.verify_depth, cfg.verify_budget);
    }
  }

  auto t1 = std::chrono::steady_clock::now();
  rep.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return rep;
}

namespace {

std::string read_file_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("config: cannot read file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::uint64_t to_u64(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    std::uint64_t v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": '" + s + "'");
  }
}

}  // namespace

EpisodeConfig parse_episode_config(const std::string& text, const std::string& base_dir) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::size_t eq = line.find('=', first);
    if (eq == std::string::npos)
      throw ParseError(line_no, 1, "config: expected key=value");
    std::string key = line.substr(first, eq - first);
    std::string value = line.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    std::size_t vstart = value.find_first_not_of(" \t");
    value = vstart == std::string::npos ? "" : value.substr(vstart);
    if (!kv.emplace(key, value).second)
      throw ParseError(line_no, 1, "config: duplicate key '" + key + "'");
  }

  auto need = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("config: missing key '" + key + "'");
    return it->second;
  };
  auto get = [&](const std::string& key, const std::string& dflt) {
    auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
  };

  EpisodeConfig cfg;

  std::string learner = need("learner");
  if (learner == "enum-ioo") cfg.learner = LearnerKind::EnumIoo;
  else if (learner == "enum-tbo") cfg.learner = LearnerKind::EnumTbo;
  else if (learner == "enum-rational") cfg.learner = LearnerKind::EnumRational;
  else if (learner == "msm") cfg.learner = LearnerKind::Msm;
  else throw std::invalid_argument("config: unknown learner '" + learner + "'");

  std::string truth_path = need("truth");
  if (!truth_path.empty() && truth_path[0] != '/' && !base_dir.empty())
    truth_path = base_dir + "/" + truth_path;
  std::string truth_text = read_file_or_throw(truth_path);
  std::string sigma;
  if (cfg.learner == LearnerKind::EnumRational) {
    Transducer ft = parse_transducer(truth_text);
    sigma = ft.a().chars();
    cfg.ground_truth = std::move(ft);
  } else {
    TuringMachine tm = parse_machine(truth_text);
    sigma = tm.alphabet().sigma();
    cfg.ground_truth = std::move(tm);
  }

  std::string channel = get("channel", cfg.learner == LearnerKind::EnumTbo   ? "tbo"
                                       : cfg.learner == LearnerKind::Msm     ? "pto"
                                                                             : "ioo");
  if (channel == "ioo") cfg.channel = IooChannel{};
  else if (channel == "tbo")
    cfg.channel = TboChannel{to_u64(get("tbo_scale", "1"), "tbo_scale"),
                             to_u64(get("tbo_slack", "0"), "tbo_slack"),
                             to_u64(get("tbo_seed", "0"), "tbo_seed")};
  else if (channel == "pto") cfg.channel = PtoChannel{};
  else throw std::invalid_argument("config: unknown channel '" + channel + "'");

  std::string source = need("source");
  if (source.rfind("explicit:", 0) == 0) {
    cfg.source = InputSource::explicit_set(split(source.substr(9), ','), sigma);
  } else if (source.rfind("length:", 0) == 0) {
    std::string range = source.substr(7);
    std::size_t dots = range.find("..");
    if (dots == std::string::npos)
      throw std::invalid_argument("config: source length range needs min..max");
    int lo = static_cast<int>(to_u64(range.substr(0, dots), "source"));
    int hi = static_cast<int>(to_u64(range.substr(dots + 2), "source"));
    cfg.source = InputSource::length_bounded(sigma, hi, lo);
  } else {
    throw std::invalid_argument("config: unknown source '" + source + "'");
  }

  cfg.seed = to_u64(get("seed", "0"), "seed");

  std::string ordering = get("ordering", "round-robin");
  if (ordering == "round-robin") cfg.ordering = RoundRobinByLength{};
  else if (ordering == "shuffle") cfg.ordering = SeededShuffleCover{cfg.seed};
  else if (ordering.rfind("script:", 0) == 0) {
    AdversarialScript script;
    for (const std::string& tok : split(ordering.substr(7), ','))
      script.indices.push_back(static_cast<std::size_t>(to_u64(tok, "ordering")));
    cfg.ordering = std::move(script);
  } else {
    throw std::invalid_argument("config: unknown ordering '" + ordering + "'");
  }

  cfg.horizon = static_cast<int>(to_u64(get("horizon", "100"), "horizon"));
  cfg.budget0 = to_u64(get("budget", "1000"), "budget");
  cfg.verify_budget = to_u64(get("verify_budget", "100000"), "verify_budget");

  std::size_t max_len = 0;
  if (cfg.source.finite())
    for (std::size_t i = 0; i < cfg.source.size(); ++i)
      max_len = std::max(max_len, cfg.source.member(i).size());
  cfg.verify_depth = static_cast<std::size_t>(
      to_u64(get("verify_depth", std::to_string(std::max<std::size_t>(max_len, 1))),
             "verify_depth"));

  if (cfg.learner == LearnerKind::EnumIoo || cfg.learner == LearnerKind::EnumTbo) {
    const TuringMachine& tm = std::get<TuringMachine>(cfg.ground_truth);
    cfg.enum_config.alphabet = tm.alphabet();
    cfg.enum_config.q_overhead = q_overhead_preset(get("q_overhead", "identity"));
    cfg.enum_config.class_bound = class_bound_preset(get("class_bound", "linear"));
    std::string mode = get("mode", "always-consistent");
    if (mode == "always-consistent") cfg.enum_config.mode = LearnerMode::AlwaysConsistent;
    else if (mode == "poly-capped") cfg.enum_config.mode = LearnerMode::PolynomialCapped;
    else throw std::invalid_argument("config: unknown mode '" + mode + "'");
    cfg.enum_config.cap_coeff = to_u64(get("cap_coeff", "1000"), "cap_coeff");
    cfg.enum_config.cap_exp = static_cast<int>(to_u64(get("cap_exp", "2"), "cap_exp"));
  }

  return cfg;
}

std::string sweep_csv(const std::vector<std::pair<std::string, EpisodeConfig>>& jobs) {
  std::vector<std::future<std::string>> rows;
  rows.reserve(jobs.size());
  for (const auto& [id, cfg] : jobs) {
    rows.push_back(std::async(std::launch::async, [id = id, cfg = cfg]() {
      EpisodeReport rep = run_episode(cfg);
      std::ostringstream os;
      os << id << ',' << cfg.seed << ',' << ordering_name(cfg.ordering) << ','
         << (cfg.learner == LearnerKind::EnumRational ? "seq" : channel_name(cfg.channel))
         << ',';
      if (rep.convergence_step) os << *rep.convergence_step;
      else os << "none";
      os << ',' << verdict_name(rep.verification.verdict) << ',' << rep.samples << ','
         << rep.mass << ',' << rep.wall_ms;
      return os.str();
    }));
  }
  std::vector<std::string> done;
  done.reserve(rows.size());
  for (auto& f : rows) done.push_back(f.get());
  std::sort(done.begin(), done.end());
  std::string csv = "config_id,seed,ordering,channel,converged_at,verified,samples,mass,wall_ms\n";
  for (const std::string& r : done) {
    csv += r;
    csv += '\n';
  }
  return csv;
}

}  // namespace limitlab
