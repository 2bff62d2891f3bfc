#include "limitlab/constructions.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace limitlab {

namespace {

// Assembles a machine from named states.  finish() remaps so the start state
// is 0 and the halt state is last; unspecified rows spin in place forever.
class TmBuilder {
 public:
  TmBuilder(std::string gamma, std::string sigma)
      : alphabet_(std::move(gamma), std::move(sigma)) {}

  int state(const std::string& name) {
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(names_.size());
    ids_.emplace(name, id);
    names_.push_back(name);
    return id;
  }

  void row(const std::string& from, char read, const std::string& to, char write, Move m) {
    int f = state(from), t = state(to);
    int ri = alphabet_.index_of(read);
    if (ri < 0 || alphabet_.index_of(write) < 0)
      throw std::logic_error("machine builder: symbol outside gamma");
    if (!rows_.emplace(std::make_pair(f, ri), Transition{t, write, m}).second)
      throw std::logic_error("machine builder: duplicate row for state " + from);
  }

  TuringMachine finish(const std::string& start, const std::string& halt) {
    int s = state(start), h = state(halt);
    if (s == h) throw std::logic_error("machine builder: start equals halt");
    int n = static_cast<int>(names_.size());
    std::vector<int> remap(static_cast<std::size_t>(n), -1);
    remap[static_cast<std::size_t>(s)] = 0;
    remap[static_cast<std::size_t>(h)] = n - 1;
    int next_id = 1;
    for (int i = 0; i < n; ++i)
      if (remap[static_cast<std::size_t>(i)] < 0) remap[static_cast<std::size_t>(i)] = next_id++;

    int g = alphabet_.size();
    std::vector<Transition> table(static_cast<std::size_t>(n - 1) * g);
    for (int i = 0; i < n; ++i) {
      if (i == h) continue;
      int q = remap[static_cast<std::size_t>(i)];
      for (int c = 0; c < g; ++c) {
        auto it = rows_.find({i, c});
        if (it == rows_.end()) {
          table[static_cast<std::size_t>(q) * g + c] =
              Transition{q, alphabet_.gamma()[static_cast<std::size_t>(c)], Move::Stay};
        } else {
          table[static_cast<std::size_t>(q) * g + c] =
              Transition{remap[static_cast<std::size_t>(it->second.next)], it->second.write,
                         it->second.move};
        }
      }
    }
    for (const auto& [key, tr] : rows_)
      if (key.first == h) throw std::logic_error("machine builder: rows from the halt state");
    return TuringMachine(n, alphabet_, std::move(table));
  }

 private:
  TapeAlphabet alphabet_;
  std::map<std::string, int> ids_;
  std::vector<std::string> names_;
  std::map<std::pair<int, int>, Transition> rows_;
};

char take_fresh(std::set<char>& used) {
  for (int c = 33; c < 127; ++c) {
    char ch = static_cast<char>(c);
    if (used.insert(ch).second) return ch;
  }
  throw std::invalid_argument("construction: printable character pool exhausted");
}

}  // namespace

TuringMachine remove_stay_moves(const TuringMachine& tm) {
  int n = tm.num_states(), g = tm.alphabet().size();
  std::map<int, int> bounce;  // stay-target -> bounce slot, in table scan order
  for (int q = 0; q < n - 1; ++q)
    for (int c = 0; c < g; ++c) {
      const Transition& t = tm.transition_at(q, c);
      if (t.move == Move::Stay && !bounce.count(t.next))
        bounce[t.next] = static_cast<int>(bounce.size());
    }
  if (bounce.empty()) return tm;

  int b = static_cast<int>(bounce.size());
  int nn = n + b;  // originals keep 0..n-2, bounces at n-1..n-2+b, halt last
  auto map_state = [&](int q) { return q == n - 1 ? nn - 1 : q; };

  std::vector<Transition> table(static_cast<std::size_t>(nn - 1) * g);
  for (int q = 0; q < n - 1; ++q)
    for (int c = 0; c < g; ++c) {
      const Transition& t = tm.transition_at(q, c);
      if (t.move == Move::Stay)
        table[static_cast<std::size_t>(q) * g + c] =
            Transition{n - 1 + bounce[t.next], t.write, Move::Right};
      else
        table[static_cast<std::size_t>(q) * g + c] =
            Transition{map_state(t.next), t.write, t.move};
    }
  for (const auto& [target, slot] : bounce)
    for (int c = 0; c < g; ++c)
      table[static_cast<std::size_t>(n - 1 + slot) * g + c] =
          Transition{map_state(target), tm.alphabet().gamma()[static_cast<std::size_t>(c)],
                     Move::Left};
  return TuringMachine(nn, tm.alphabet(), std::move(table));
}

DoubledMachine double_transitions(const TuringMachine& tm) {
  int n = tm.num_states(), g = tm.alphabet().size();
  for (int q = 0; q < n - 1; ++q)
    for (int c = 0; c < g; ++c)
      if (tm.transition_at(q, c).move == Move::Stay)
        throw std::invalid_argument("double_transitions: machine has stay moves");

  int m = (n - 1) * g;
  std::set<char> used(tm.alphabet().gamma().begin(), tm.alphabet().gamma().end());
  std::string fresh;
  for (int k = 0; k < m; ++k) fresh.push_back(take_fresh(used));

  TapeAlphabet af(tm.alphabet().gamma() + fresh, tm.alphabet().sigma());
  int nn = n + m;  // originals keep 0..n-2, dummies at n-1..n-2+m, halt last
  int gf = af.size();
  auto map_state = [&](int q) { return q == n - 1 ? nn - 1 : q; };

  std::vector<Transition> table(static_cast<std::size_t>(nn - 1) * gf);
  for (int q = 0; q < nn - 1; ++q)
    for (int c = 0; c < gf; ++c)
      table[static_cast<std::size_t>(q) * gf + c] =
          Transition{q, af.gamma()[static_cast<std::size_t>(c)], Move::Stay};

  std::map<std::pair<int, char>, DoubledMachine::Entry> index;
  int k = 0;
  for (int q = 0; q < n - 1; ++q)
    for (int c = 0; c < g; ++c, ++k) {
      const Transition& t = tm.transition_at(q, c);
      int dummy = n - 1 + k;
      char gk = fresh[static_cast<std::size_t>(k)];
      table[static_cast<std::size_t>(q) * gf + c] = Transition{dummy, gk, Move::Stay};
      table[static_cast<std::size_t>(dummy) * gf + af.index_of(gk)] =
          Transition{map_state(t.next), t.write, t.move};
      index[{q, tm.alphabet().gamma()[static_cast<std::size_t>(c)]}] =
          DoubledMachine::Entry{dummy, gk};
    }
  return DoubledMachine{tm, TuringMachine(nn, af, std::move(table)), std::move(index)};
}

HaltingGadgetPair halting_gadgets(const TuringMachine& subject, const std::string& w) {
  const TapeAlphabet& at = subject.alphabet();
  for (char c : w)
    if (!at.in_sigma(c))
      throw std::invalid_argument("halting_gadgets: w has a symbol outside the subject's sigma");
  char blank = at.blank();
  if (blank == '0' || blank == '1')
    throw std::invalid_argument("halting_gadgets: subject blank collides with verdict symbols");

  std::string sigma_g = at.sigma();
  for (char c : {'0', '1'})
    if (sigma_g.find(c) == std::string::npos) sigma_g.push_back(c);

  // zero-step subject: it has already halted, so every clock length suffices
  if (subject.num_states() == 1) {
    auto trivial = [&](char verdict) {
      TmBuilder b(std::string(1, blank) + sigma_g, sigma_g);
      for (char s : sigma_g) b.row("start", s, "start", blank, Move::Right);
      b.row("start", blank, "halt", verdict, Move::Stay);
      return b.finish("start", "halt");
    };
    return HaltingGadgetPair{trivial('1'), trivial('0'), subject, w};
  }

  const std::string& gt = at.gamma();
  std::set<char> used(sigma_g.begin(), sigma_g.end());
  used.insert(blank);
  std::map<char, char> hat, chk;  // simulated tape symbol / same with the head on it
  for (char c : gt) hat[c] = take_fresh(used);
  for (char c : gt) chk[c] = take_fresh(used);
  char sep = take_fresh(used);    // boundary between simulation region and clock
  char tick = take_fresh(used);   // consumed clock cell
  char flag = take_fresh(used);   // halt detected, anchors the cleanup sweep

  std::string gamma_g(1, blank);
  gamma_g += sigma_g;
  for (char c : gt) gamma_g.push_back(hat[c]);
  for (char c : gt) gamma_g.push_back(chk[c]);
  gamma_g.push_back(sep);
  gamma_g.push_back(tick);
  gamma_g.push_back(flag);

  int nT = subject.num_states();
  auto build = [&](char verdict) {
    TmBuilder b(gamma_g, sigma_g);
    std::string seek0 = "seek0";

    // setup: shift the input right one cell, plant the separator at the old
    // origin, then lay down w (mirrored, marked) to its left
    std::string head_entry =
        w.empty() ? "pute" : (w.size() == 1 ? "put0" : "go1");
    b.row("start", blank, head_entry, sep, Move::Left);
    for (char s : sigma_g) {
      std::string cs = std::string("carry_") + s;
      b.row("start", s, cs, sep, Move::Right);
      for (char v : sigma_g) b.row(cs, v, std::string("carry_") + v, s, Move::Right);
      b.row(cs, blank, "back", s, Move::Left);
    }
    for (char v : sigma_g) b.row("back", v, "back", v, Move::Left);
    b.row("back", sep, head_entry, sep, Move::Left);

    if (w.size() >= 2)
      for (std::size_t i = 1; i <= w.size() - 1; ++i) {
        std::string next = i == w.size() - 1 ? "put" + std::to_string(w.size() - 1)
                                             : "go" + std::to_string(i + 1);
        b.row("go" + std::to_string(i), blank, next, blank, Move::Left);
      }
    for (std::size_t j = w.size(); j-- > 0;) {
      std::string next = j == 0 ? seek0 : "put" + std::to_string(j - 1);
      char sym = j == 0 ? chk[w[0]] : hat[w[j]];
      b.row("put" + std::to_string(j), blank, next, sym, Move::Right);
    }
    if (w.empty()) b.row("pute", blank, seek0, chk[blank], Move::Right);

    // tick cycle, parameterized by the subject's current state
    for (int q = 0; q < nT - 1; ++q) {
      std::string qs = std::to_string(q);
      std::string seek = "seek" + qs, back = "wback" + qs;

      // rightward: across the region and consumed cells to the next clock symbol
      for (char c : gt) b.row(seek, hat[c], seek, hat[c], Move::Right);
      b.row(seek, sep, seek, sep, Move::Right);
      b.row(seek, tick, seek, tick, Move::Right);
      for (char s : sigma_g) b.row(seek, s, back, tick, Move::Left);
      b.row(seek, blank, "halt", blank, Move::Stay);  // clock expired: stop in place

      // leftward, back to the subject's head
      b.row(back, tick, back, tick, Move::Left);
      b.row(back, sep, back, sep, Move::Left);
      for (char c : gt) b.row(back, hat[c], back, hat[c], Move::Left);

      // one subject step at the marked cell.  The region is mirrored, so the
      // subject's left/right swap.
      for (char c : gt) {
        const Transition& t = subject.transition_at(q, at.index_of(c));
        if (t.next == subject.halt_state()) {
          b.row(back, chk[c], "clr", flag, Move::Right);
        } else {
          Move mm = t.move == Move::Left    ? Move::Right
                    : t.move == Move::Right ? Move::Left
                                            : Move::Stay;
          b.row(back, chk[c], "mark" + std::to_string(t.next), hat[t.write], mm);
        }
      }
    }

    // arrive at the subject's new head cell and mark it
    for (int q = 0; q < nT - 1; ++q) {
      std::string qs = std::to_string(q);
      std::string mark = "mark" + qs, seek = "seek" + qs, ret = "shret" + qs;
      for (char c : gt) b.row(mark, hat[c], seek, chk[c], Move::Right);
      b.row(mark, blank, seek, chk[blank], Move::Right);

      // ran into the separator: claim the cell, push separator and clock right
      auto carry = [&](char v) { return "shc" + qs + "_" + std::string(1, v); };
      b.row(mark, sep, carry(sep), chk[blank], Move::Right);
      std::string carried(1, sep);
      carried.push_back(tick);
      carried += sigma_g;
      for (char u : carried) {
        for (char v : sigma_g) b.row(carry(u), v, carry(v), u, Move::Right);
        b.row(carry(u), tick, carry(tick), u, Move::Right);
        b.row(carry(u), blank, ret, u, Move::Left);
      }
      for (char s : sigma_g) b.row(ret, s, ret, s, Move::Left);
      b.row(ret, tick, ret, tick, Move::Left);
      b.row(ret, sep, ret, sep, Move::Left);
      for (char c : gt) b.row(ret, chk[c], seek, chk[c], Move::Right);
    }

    // the subject halted: erase everything to the right, return to the flag,
    // erase everything to its left, leave only the verdict on the tape
    for (char c : gamma_g)
      if (c != blank) b.row("clr", c, "clr", blank, Move::Right);
    b.row("clr", blank, "cla", blank, Move::Left);
    b.row("cla", blank, "cla", blank, Move::Left);
    b.row("cla", flag, "clb", blank, Move::Left);
    for (char c : gamma_g)
      if (c != blank && c != flag) b.row("clb", c, "clb", blank, Move::Left);
    b.row("clb", blank, "halt", verdict, Move::Stay);
    b.row("clb", flag, "clb", blank, Move::Left);

    return b.finish("start", "halt");
  };

  return HaltingGadgetPair{build('1'), build('0'), subject, w};
}

namespace {

struct ServedSource {
  std::vector<std::string> inputs;  // length-lex, as the source serves them
  std::vector<Example> examples;
  std::vector<std::uint64_t> masses;
};

ServedSource serve(const CharsetRequest& req) {
  if (!req.source.finite())
    throw std::invalid_argument("charset search: source must be finite");
  if (std::holds_alternative<PtoChannel>(req.channel))
    throw std::invalid_argument("charset search: channel must be ioo or tbo");
  ServedSource s;
  for (std::size_t i = 0; i < req.source.size(); ++i) {
    std::string x = req.source.member(i);
    auto ex = make_example(req.tm, x, req.channel, req.example_budget);
    if (!ex) continue;  // blocked input, outside the served source
    s.inputs.push_back(std::move(x));
    s.masses.push_back(example_mass(*ex));
    s.examples.push_back(std::move(*ex));
  }
  if (s.inputs.size() > 60)
    throw std::invalid_argument("charset search: served source too large");
  return s;
}

// Feed the masked examples in canonical order to a fresh learner; accept if
// its final hypothesis matches the target on every served input up to the
// verification depth.
bool learner_agrees(const CharsetRequest& req, const ServedSource& s, std::uint64_t mask) {
  if (mask == 0) return false;  // no data, no hypothesis
  EnumTmLearner learner(req.learner, std::holds_alternative<TboChannel>(req.channel));
  Hypothesis h;
  for (std::size_t i = 0; i < s.inputs.size(); ++i)
    if (mask >> i & 1) h = learner.observe(s.examples[i]);
  if (h.index == 0) return false;
  const TuringMachine& hyp = learner.machine(h.index);
  for (std::size_t i = 0; i < s.inputs.size(); ++i) {
    if (s.inputs[i].size() > req.verify_depth) continue;
    RunOutcome rc = run_bounded(hyp, s.inputs[i], req.verify_budget);
    if (!rc.halted() || rc.output != s.examples[i].y) return false;
  }
  return true;
}

bool subset_qualifies(const CharsetRequest& req, const ServedSource& s, std::uint64_t smask,
                      std::map<std::uint64_t, bool>& memo) {
  std::uint64_t full = (1ull << s.inputs.size()) - 1;
  auto check = [&](std::uint64_t m) {
    auto it = memo.find(m);
    if (it == memo.end()) it = memo.emplace(m, learner_agrees(req, s, m)).first;
    return it->second;
  };
  std::uint64_t rest = full & ~smask;
  if (s.inputs.size() <= req.exhaustive_cap) {
    std::uint64_t sub = rest;  // walks every subset of rest, including 0
    for (;;) {
      if (!check(smask | sub)) return false;
      if (sub == 0) break;
      sub = (sub - 1) & rest;
    }
    return true;
  }
  // sampled regime: the set itself and the full source always, then random
  if (!check(smask) || !check(full)) return false;
  std::mt19937_64 rng(req.seed ^ (smask * 0x9E3779B97F4A7C15ull));
  for (std::size_t k = 0; k < req.sample_count; ++k)
    if (!check(smask | (rng() & rest))) return false;
  return true;
}

}  // namespace

CharsetResult characteristic_set_search(const CharsetRequest& req) {
  ServedSource s = serve(req);
  CharsetResult res;
  res.served = s.inputs.size();
  res.exhaustive = s.inputs.size() <= req.exhaustive_cap;

  std::map<std::uint64_t, bool> memo;
  std::size_t n = s.inputs.size();
  std::size_t smax = std::min(req.max_subset_size, n);
  std::vector<std::size_t> idx;
  for (std::size_t size = 1; size <= smax; ++size) {
    // candidates of this size, ranked by mass then generation (lex) order
    std::vector<std::pair<std::uint64_t, std::vector<std::size_t>>> cands;
    idx.resize(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    for (;;) {
      std::uint64_t mass = 0;
      for (std::size_t i : idx) mass = sat_add(mass, s.masses[i]);
      cands.emplace_back(mass, idx);
      std::size_t j = size;
      bool advanced = false;
      while (j-- > 0) {
        if (idx[j] < n - size + j) {
          ++idx[j];
          for (std::size_t l = j + 1; l < size; ++l) idx[l] = idx[l - 1] + 1;
          advanced = true;
          break;
        }
      }
      if (!advanced) break;
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    for (const auto& [mass, indices] : cands) {
      std::uint64_t mask = 0;
      for (std::size_t i : indices) mask |= 1ull << i;
      if (subset_qualifies(req, s, mask, memo)) {
        res.found = true;
        for (std::size_t i : indices) res.inputs.push_back(s.inputs[i]);
        res.size = indices.size();
        res.mass = mass;
        res.supersets_checked = memo.size();
        return res;
      }
    }
  }
  res.supersets_checked = memo.size();
  return res;
}

bool charset_qualifies(const CharsetRequest& req, const std::vector<std::string>& subset) {
  ServedSource s = serve(req);
  std::uint64_t mask = 0;
  for (const std::string& x : subset) {
    auto it = std::find(s.inputs.begin(), s.inputs.end(), x);
    if (it == s.inputs.end())
      throw std::invalid_argument("charset_qualifies: input is not a served source member");
    mask |= 1ull << static_cast<std::size_t>(it - s.inputs.begin());
  }
  std::map<std::uint64_t, bool> memo;
  return subset_qualifies(req, s, mask, memo);
}

std::optional<std::string> distinguishing_input(const TuringMachine& a, const TuringMachine& b,
                                                const std::vector<std::string>& inputs,
                                                const Channel& channel, std::uint64_t budget) {
  for (const std::string& x : inputs) {
    auto ea = make_example(a, x, channel, budget);
    auto eb = make_example(b, x, channel, budget);
    if (ea.has_value() != eb.has_value()) return x;
    if (ea && !(*ea == *eb)) return x;
  }
  return std::nullopt;
}

}  // namespace limitlab
