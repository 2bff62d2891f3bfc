#include "limitlab/learners.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace limitlab {

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
  return r > UINT64_MAX ? UINT64_MAX : static_cast<std::uint64_t>(r);
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = a + b;
  return r < a ? UINT64_MAX : r;
}

ResourceBound q_overhead_preset(const std::string& name) {
  if (name == "identity")
    return {name, [](std::uint64_t, std::uint64_t n) { return n; }};
  if (name == "linear")
    return {name, [](std::uint64_t c, std::uint64_t n) { return sat_mul(c, sat_add(n, 1)); }};
  if (name == "quadratic")
    return {name, [](std::uint64_t c, std::uint64_t n) {
              return sat_mul(c, sat_mul(sat_add(n, 1), sat_add(n, 1)));
            }};
  throw std::invalid_argument("q-overhead preset: unknown name '" + name + "'");
}

ResourceBound class_bound_preset(const std::string& name) {
  if (name == "linear")
    return {name, [](std::uint64_t c, std::uint64_t n) { return sat_mul(c, sat_add(n, 1)); }};
  if (name == "quadratic")
    return {name, [](std::uint64_t c, std::uint64_t n) {
              return sat_mul(c, sat_mul(sat_add(n, 1), sat_add(n, 1)));
            }};
  if (name == "cubic")
    return {name, [](std::uint64_t c, std::uint64_t n) {
              std::uint64_t m = sat_add(n, 1);
              return sat_mul(c, sat_mul(m, sat_mul(m, m)));
            }};
  throw std::invalid_argument("class-bound preset: unknown name '" + name + "'");
}

EnumTmLearner::EnumTmLearner(EnumTmLearnerConfig cfg, bool time_bounded)
    : cfg_(std::move(cfg)), time_bounded_(time_bounded) {}

const TuringMachine& EnumTmLearner::machine(std::uint64_t index) {
  auto it = machines_.find(index);
  if (it == machines_.end())
    it = machines_.emplace(index, enumerate_machine(index, cfg_.alphabet)).first;
  return it->second;
}

std::uint64_t EnumTmLearner::example_budget(const Example& ex) const {
  if (time_bounded_) {
    const auto* tbo = std::get_if<TboPayload>(&ex.payload);
    if (!tbo)
      throw std::invalid_argument("time-bound learner: example lacks a time-bound payload");
    return cfg_.q_overhead(counter_, sat_mul(counter_, tbo->bound));
  }
  std::uint64_t class_steps = cfg_.class_bound(counter_, ex.x.size());
  return cfg_.q_overhead(counter_, sat_mul(counter_, class_steps));
}

int EnumTmLearner::candidate_valid(std::uint64_t index, std::uint64_t* spent,
                                   std::uint64_t cap) {
  const TuringMachine& tm = machine(index);
  for (const auto& [x, ex] : seen_) {
    std::uint64_t budget = example_budget(ex);
    auto key = std::make_pair(index, x);
    auto it = runs_.find(key);
    if (it == runs_.end()) it = runs_.emplace(key, start_run(tm, x)).first;
    ResumableRun& run = it->second;

    if (!run.halted && run.steps < budget) {
      std::uint64_t target = budget;
      if (cap > 0) {
        std::uint64_t allowed = cap > *spent ? cap - *spent : 0;
        target = std::min(budget, sat_add(run.steps, allowed));
      }
      std::uint64_t before = run.steps;
      advance_run(tm, run, target);
      *spent += run.steps - before;
      if (!run.halted && run.steps < budget) return -1;  // stopped by the cap, not the budget
    }

    if (!run.halted || run.steps > budget) {
      discarded_[index] = DiscardReason::TooSlow;
      return 0;
    }
    std::optional<std::string> out = extract_output(run.cfg.tape, tm.alphabet());
    if (out != ex.y) {
      discarded_[index] = DiscardReason::WrongOutput;  // permanent: halting is budget-free
      return 0;
    }
  }
  return 1;
}

Hypothesis EnumTmLearner::observe(const Example& ex) {
  seen_.insert(ex);

  std::uint64_t cap = 0;
  if (cfg_.mode == LearnerMode::PolynomialCapped) {
    cap = cfg_.cap_coeff;
    std::uint64_t base = sat_add(seen_.mass(), 1);
    for (int i = 0; i < cfg_.cap_exp; ++i) cap = sat_mul(cap, base);
    if (cap == 0) cap = 1;
  }

  std::uint64_t spent = 0;
  bool cap_hit = false;
  while (!cap_hit) {
    for (std::uint64_t i = 1; i <= counter_; ++i) {
      auto d = discarded_.find(i);
      if (d != discarded_.end() && d->second == DiscardReason::WrongOutput) continue;
      int r = candidate_valid(i, &spent, cap);
      if (r > 0) {
        discarded_.erase(i);  // a valid hypothesis is not discarded
        current_ = Hypothesis{i, true};
        return current_;
      }
      if (r < 0) {
        cap_hit = true;
        break;
      }
    }
    if (!cap_hit) counter_ = sat_add(counter_, 1);
  }

  // compute budget exhausted: emit the first candidate not known wrong
  std::uint64_t i = 1;
  while (true) {
    auto d = discarded_.find(i);
    if (d == discarded_.end() || d->second != DiscardReason::WrongOutput) break;
    ++i;
  }
  current_ = Hypothesis{i, false};
  return current_;
}

void EnumTmLearner::ingest_silent(const Example& ex) { seen_.insert(ex); }

std::string EnumTmLearner::checkpoint() const {
  std::ostringstream os;
  os << "enum-learner channel=" << (time_bounded_ ? "tbo" : "ioo") << " C=" << counter_
     << " hypothesis=" << current_.index << " validated=" << (current_.validated ? 1 : 0)
     << "\n";
  for (const auto& [i, reason] : discarded_)
    os << "discard " << i << ' '
       << (reason == DiscardReason::WrongOutput ? "wrong" : "slow") << "\n";
  return os.str();
}

EnumTmLearner EnumTmLearner::restore(EnumTmLearnerConfig cfg, bool time_bounded,
                                     const std::string& text) {
  EnumTmLearner learner(std::move(cfg), time_bounded);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "enum-learner") {
      std::string channel_kv, c_kv, h_kv, v_kv;
      ls >> channel_kv >> c_kv >> h_kv >> v_kv;
      std::string want = std::string("channel=") + (time_bounded ? "tbo" : "ioo");
      if (channel_kv != want)
        throw ParseError(line_no, 1, "checkpoint channel does not match the learner");
      if (c_kv.rfind("C=", 0) != 0 || h_kv.rfind("hypothesis=", 0) != 0 ||
          v_kv.rfind("validated=", 0) != 0)
        throw ParseError(line_no, 1, "malformed checkpoint header");
      try {
        learner.counter_ = std::stoull(c_kv.substr(2));
        learner.current_.index = std::stoull(h_kv.substr(11));
      } catch (const std::exception&) {
        throw ParseError(line_no, 1, "malformed checkpoint header");
      }
      learner.current_.validated = v_kv.substr(10) == "1";
      saw_header = true;
    } else if (tag == "discard") {
      std::uint64_t i;
      std::string reason;
      if (!(ls >> i >> reason) || (reason != "wrong" && reason != "slow"))
        throw ParseError(line_no, 1, "malformed discard line");
      learner.discarded_[i] =
          reason == "wrong" ? DiscardReason::WrongOutput : DiscardReason::TooSlow;
    } else {
      throw ParseError(line_no, 1, "unknown checkpoint line '" + tag + "'");
    }
  }
  if (!saw_header) throw ParseError(1, 1, "checkpoint missing header");
  return learner;
}

Hypothesis enum_ioo_step(EnumTmLearner& learner, const Example& ex) {
  if (learner.time_bounded())
    throw std::invalid_argument("enum_ioo_step: learner is time-bounded");
  return learner.observe(ex);
}

Hypothesis enum_tbo_step(EnumTmLearner& learner, const Example& ex) {
  if (!learner.time_bounded())
    throw std::invalid_argument("enum_tbo_step: learner is not time-bounded");
  return learner.observe(ex);
}

namespace {
constexpr const char* kCoderPool =
    "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz"
    "!#$%&'()*+,-./:;<=>?@[]^_`{|}~";
}

WriteMoveCoder::WriteMoveCoder(const TapeAlphabet& alphabet) : alphabet_(alphabet) {
  std::string pool = kCoderPool;
  std::size_t need = static_cast<std::size_t>(alphabet_.size()) * 3;
  if (need > pool.size())
    throw std::invalid_argument("write-move coder: tape alphabet too large to code");
  b_ = SymbolSet(pool.substr(0, need));
}

static int move_rank(Move m) {
  switch (m) {
    case Move::Left: return 0;
    case Move::Right: return 1;
    case Move::Stay: return 2;
  }
  return 2;
}

char WriteMoveCoder::encode(char write, Move m) const {
  int i = alphabet_.index_of(write);
  if (i < 0) throw std::invalid_argument("write-move coder: symbol outside gamma");
  return b_.at(3 * i + move_rank(m));
}

std::pair<char, Move> WriteMoveCoder::decode(char coded) const {
  int i = b_.index_of(coded);
  if (i < 0) throw std::invalid_argument("write-move coder: unknown coded symbol");
  Move m = i % 3 == 0 ? Move::Left : i % 3 == 1 ? Move::Right : Move::Stay;
  return {alphabet_.gamma()[static_cast<std::size_t>(i / 3)], m};
}

std::string WriteMoveCoder::encode_actions(const std::vector<ActionTuple>& actions) const {
  std::string s;
  s.reserve(actions.size());
  for (const ActionTuple& t : actions) s.push_back(encode(t.write, t.move));
  return s;
}

PsiImage psi(const TuringMachine& tm) {
  WriteMoveCoder coder(tm.alphabet());
  int n = tm.num_states();
  int g = tm.alphabet().size();
  std::vector<int> next(static_cast<std::size_t>(n) * g);
  std::vector<char> out(static_cast<std::size_t>(n) * g);
  char sink = coder.encode(tm.alphabet().blank(), Move::Stay);
  for (int q = 0; q < n; ++q)
    for (int s = 0; s < g; ++s) {
      std::size_t i = static_cast<std::size_t>(q) * g + s;
      if (q == tm.halt_state()) {
        next[i] = q;
        out[i] = sink;
      } else {
        const Transition& tr = tm.transition_at(q, s);
        next[i] = tr.next;
        out[i] = coder.encode(tr.write, tr.move);
      }
    }
  return PsiImage{Transducer(n, SymbolSet(tm.alphabet().gamma()), coder.b(), std::move(next),
                             std::move(out)),
                  coder};
}

std::vector<std::pair<std::string, std::string>> pto_reduce(const ExampleSet& examples,
                                                            const WriteMoveCoder& coder) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& [x, ex] : examples) {
    const auto* p = std::get_if<PtoPayload>(&ex.payload);
    if (!p) throw std::invalid_argument("pto_reduce: example lacks a trajectory payload");
    if (p->trace.empty()) continue;  // a zero-step run constrains nothing
    std::string scanned, writes;
    scanned.reserve(p->trace.size());
    writes.reserve(p->trace.size());
    for (const ActionTuple& t : p->trace) {
      if (!coder.tape_alphabet().in_gamma(t.read))
        throw std::invalid_argument("pto_reduce: trajectory symbol outside gamma");
      scanned.push_back(t.read);
      writes.push_back(coder.encode(t.write, t.move));
    }
    pairs.emplace_back(std::move(scanned), std::move(writes));
  }
  return pairs;
}

RationalEnumLearner::RationalEnumLearner(SymbolSet a, SymbolSet b)
    : a_(std::move(a)), b_(std::move(b)) {}

const Transducer& RationalEnumLearner::machine(std::uint64_t index) {
  auto it = machines_.find(index);
  if (it == machines_.end())
    it = machines_.emplace(index, enumerate_transducer(index, a_, b_)).first;
  return it->second;
}

bool RationalEnumLearner::consistent(std::uint64_t index) {
  const Transducer& m = machine(index);
  for (const auto& [x, y] : seen_)
    if (seq_map(m, x) != y) return false;
  return true;
}

std::uint64_t RationalEnumLearner::observe(const std::string& x, const std::string& y) {
  if (x.empty()) throw std::invalid_argument("rational learner: input must be nonempty");
  if (x.size() != y.size())
    throw std::invalid_argument("rational learner: output length must match input length");
  for (char c : x)
    if (!a_.contains(c)) throw std::invalid_argument("rational learner: input symbol not in A");
  for (char c : y)
    if (!b_.contains(c)) throw std::invalid_argument("rational learner: output symbol not in B");

  for (std::size_t i = 0; i < x.size(); ++i) {
    std::string prefix = x.substr(0, i + 1);
    auto [it, fresh] = forced_.try_emplace(prefix, y[i]);
    if (!fresh && it->second != y[i]) throw PrefixConflictError(std::move(prefix));
  }

  std::pair<std::string, std::string> pair{x, y};
  if (std::find(seen_.begin(), seen_.end(), pair) == seen_.end()) seen_.push_back(pair);

  while (!consistent(candidate_)) ++candidate_;
  return candidate_;
}

PrefixConflictError::PrefixConflictError(std::string prefix_)
    : std::invalid_argument("prefix conflict at '" + prefix_ + "'"), prefix(std::move(prefix_)) {}

ObservationTree build_observation_tree(
    const std::vector<std::pair<std::string, std::string>>& pairs, const SymbolSet& a,
    const SymbolSet& b) {
  struct Node {
    std::vector<int> child;
    std::vector<char> out;
    std::string prefix;
    int created_by = -1;
  };
  int k = a.size();
  std::vector<Node> nodes(1);
  nodes[0].child.assign(static_cast<std::size_t>(k), -1);
  nodes[0].out.assign(static_cast<std::size_t>(k), '\0');

  for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
    const auto& [x, y] = pairs[idx];
    if (x.empty()) throw std::invalid_argument("observation tree: input must be nonempty");
    if (x.size() != y.size())
      throw std::invalid_argument("observation tree: output length must match input length");
    int cur = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      int c = a.index_of(x[i]);
      if (c < 0) throw std::invalid_argument("observation tree: input symbol not in A");
      if (!b.contains(y[i]))
        throw std::invalid_argument("observation tree: output symbol not in B");
      int ch = nodes[static_cast<std::size_t>(cur)].child[static_cast<std::size_t>(c)];
      if (ch >= 0) {
        if (nodes[static_cast<std::size_t>(cur)].out[static_cast<std::size_t>(c)] != y[i])
          throw PrefixConflictError(x.substr(0, i + 1));
      } else {
        ch = static_cast<int>(nodes.size());
        nodes[static_cast<std::size_t>(cur)].child[static_cast<std::size_t>(c)] = ch;
        nodes[static_cast<std::size_t>(cur)].out[static_cast<std::size_t>(c)] = y[i];
        Node fresh;
        fresh.child.assign(static_cast<std::size_t>(k), -1);
        fresh.out.assign(static_cast<std::size_t>(k), '\0');
        fresh.prefix = x.substr(0, i + 1);
        fresh.created_by = static_cast<int>(idx);
        nodes.push_back(std::move(fresh));
      }
      cur = ch;
    }
  }

  // relabel into BFS order (level by level, alphabet order within a level)
  std::vector<int> bfs_id(nodes.size(), -1);
  std::vector<int> order;
  std::deque<int> queue{0};
  bfs_id[0] = 0;
  order.push_back(0);
  while (!queue.empty()) {
    int n = queue.front();
    queue.pop_front();
    for (int c = 0; c < k; ++c) {
      int ch = nodes[static_cast<std::size_t>(n)].child[static_cast<std::size_t>(c)];
      if (ch < 0) continue;
      bfs_id[static_cast<std::size_t>(ch)] = static_cast<int>(order.size());
      order.push_back(ch);
      queue.push_back(ch);
    }
  }

  ObservationTree tree{PartialTransducer(static_cast<int>(nodes.size()), a, b), {}, {}, {}};
  tree.state_prefix.resize(nodes.size());
  tree.created_by.resize(nodes.size());
  tree.is_leaf.resize(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Node& n = nodes[static_cast<std::size_t>(order[i])];
    tree.state_prefix[i] = n.prefix;
    tree.created_by[i] = n.created_by;
    bool leaf = true;
    for (int c = 0; c < k; ++c) {
      int ch = n.child[static_cast<std::size_t>(c)];
      if (ch < 0) continue;
      leaf = false;
      tree.machine.set_transition(static_cast<int>(i), c, bfs_id[static_cast<std::size_t>(ch)],
                                  n.out[static_cast<std::size_t>(c)]);
    }
    tree.is_leaf[i] = leaf;
  }
  return tree;
}

MergeOutcome merge(const PartialTransducer& m, int p, int q) {
  int n = m.num_states(), k = m.a().size();
  if (p < 0 || p >= n || q < 0 || q >= n)
    throw std::invalid_argument("merge: state out of range");

  std::vector<int> parent(static_cast<std::size_t>(n));
  std::vector<int> rnk(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };

  std::vector<std::vector<int>> target(static_cast<std::size_t>(n),
                                       std::vector<int>(static_cast<std::size_t>(k), -1));
  std::vector<std::vector<char>> outc(static_cast<std::size_t>(n),
                                      std::vector<char>(static_cast<std::size_t>(k), '\0'));
  for (int s = 0; s < n; ++s)
    for (int c = 0; c < k; ++c)
      if (m.defined(s, c)) {
        target[static_cast<std::size_t>(s)][static_cast<std::size_t>(c)] = m.next(s, c);
        outc[static_cast<std::size_t>(s)][static_cast<std::size_t>(c)] = m.out(s, c);
      }

  std::deque<std::pair<int, int>> pending{{p, q}};
  int mergers = 0;
  while (!pending.empty()) {
    auto [a0, b0] = pending.front();
    pending.pop_front();
    int ra = find(a0), rb = find(b0);
    if (ra == rb) continue;
    if (rnk[static_cast<std::size_t>(ra)] < rnk[static_cast<std::size_t>(rb)]) std::swap(ra, rb);
    for (int c = 0; c < k; ++c) {
      int tb = target[static_cast<std::size_t>(rb)][static_cast<std::size_t>(c)];
      if (tb < 0) continue;
      int ta = target[static_cast<std::size_t>(ra)][static_cast<std::size_t>(c)];
      if (ta < 0) {
        target[static_cast<std::size_t>(ra)][static_cast<std::size_t>(c)] = tb;
        outc[static_cast<std::size_t>(ra)][static_cast<std::size_t>(c)] =
            outc[static_cast<std::size_t>(rb)][static_cast<std::size_t>(c)];
        continue;
      }
      if (outc[static_cast<std::size_t>(ra)][static_cast<std::size_t>(c)] !=
          outc[static_cast<std::size_t>(rb)][static_cast<std::size_t>(c)])
        return {std::nullopt, 0};  // forced identification with clashing outputs
      pending.emplace_back(ta, tb);
    }
    parent[static_cast<std::size_t>(rb)] = ra;
    if (rnk[static_cast<std::size_t>(ra)] == rnk[static_cast<std::size_t>(rb)])
      ++rnk[static_cast<std::size_t>(ra)];
    ++mergers;
  }

  // assemble the quotient, BFS order from the start block
  std::vector<int> new_id(static_cast<std::size_t>(n), -1);
  std::vector<int> order;
  std::deque<int> queue{find(m.start_state())};
  new_id[static_cast<std::size_t>(find(m.start_state()))] = 0;
  order.push_back(find(m.start_state()));
  while (!queue.empty()) {
    int r = queue.front();
    queue.pop_front();
    for (int c = 0; c < k; ++c) {
      int t = target[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      if (t < 0) continue;
      int rt = find(t);
      if (new_id[static_cast<std::size_t>(rt)] < 0) {
        new_id[static_cast<std::size_t>(rt)] = static_cast<int>(order.size());
        order.push_back(rt);
        queue.push_back(rt);
      }
    }
  }
  if (static_cast<int>(order.size()) != n - mergers)
    throw std::logic_error("merge: quotient lost reachability");

  PartialTransducer out(static_cast<int>(order.size()), m.a(), m.b());
  for (std::size_t i = 0; i < order.size(); ++i) {
    int r = order[i];
    for (int c = 0; c < k; ++c) {
      int t = target[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      if (t < 0) continue;
      out.set_transition(static_cast<int>(i), c, new_id[static_cast<std::size_t>(find(t))],
                         outc[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
    }
  }
  return {std::move(out), mergers};
}

int similarity(const PartialTransducer& m, int p, int q) {
  MergeOutcome o = merge(m, p, q);
  return o.valid() ? o.mergers : 0;
}

PartialTransducer msm(const ObservationTree& tree) {
  PartialTransducer cur = tree.machine;
  for (;;) {
    int best = 0, bi = -1, bj = -1;
    for (int i = 0; i < cur.num_states(); ++i)
      for (int j = i + 1; j < cur.num_states(); ++j) {
        int s = similarity(cur, i, j);
        if (s > best) {
          best = s;
          bi = i;
          bj = j;
        }
      }
    if (best == 0) return cur;
    cur = std::move(*merge(cur, bi, bj).machine);
  }
}

RunOutcome policy_run(const PartialTransducer& policy, const WriteMoveCoder& coder,
                      const std::string& input, std::uint64_t budget) {
  const TapeAlphabet& ab = coder.tape_alphabet();
  for (char c : input)
    if (!ab.in_sigma(c))
      throw std::invalid_argument(std::string("input symbol '") + c + "' not in sigma");
  Tape tape(input, ab.blank());
  std::int64_t head = 0;
  int state = policy.start_state();
  std::uint64_t steps = 0;
  for (;;) {
    char g = tape.read(head);
    int ai = policy.a().index_of(g);
    if (ai < 0 || !policy.defined(state, ai))
      return RunOutcome{RunOutcome::Status::Halted, extract_output(tape, ab), steps};
    if (steps == budget)
      return RunOutcome{RunOutcome::Status::OutOfBudget, std::nullopt, steps};
    auto [w, mv] = coder.decode(policy.out(state, ai));
    tape.write(head, w);
    switch (mv) {
      case Move::Left: --head; break;
      case Move::Right: ++head; break;
      case Move::Stay: break;
    }
    state = policy.next(state, ai);
    ++steps;
  }
}

}  // namespace limitlab
