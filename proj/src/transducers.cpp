#include "limitlab/transducers.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace limitlab {

SymbolSet::SymbolSet(std::string syms) : syms_(std::move(syms)) {
  index_.fill(-1);
  if (syms_.empty()) throw std::invalid_argument("symbol set: empty");
  for (std::size_t i = 0; i < syms_.size(); ++i) {
    char c = syms_[i];
    if (!std::isprint(static_cast<unsigned char>(c)) || std::isspace(static_cast<unsigned char>(c)))
      throw std::invalid_argument("symbol set: unprintable symbol");
    if (index_[static_cast<unsigned char>(c)] >= 0)
      throw std::invalid_argument(std::string("symbol set: duplicate symbol '") + c + "'");
    index_[static_cast<unsigned char>(c)] = static_cast<int>(i);
  }
}

Transducer::Transducer(int num_states, SymbolSet a, SymbolSet b, std::vector<int> next,
                       std::vector<char> out)
    : num_states_(num_states), a_(std::move(a)), b_(std::move(b)), next_(std::move(next)),
      out_(std::move(out)) {
  if (num_states_ < 1) throw std::invalid_argument("transducer: needs at least one state");
  std::size_t want = static_cast<std::size_t>(num_states_) * a_.size();
  if (next_.size() != want || out_.size() != want)
    throw std::invalid_argument("transducer: tables must be total on Q x A");
  for (int t : next_)
    if (t < 0 || t >= num_states_)
      throw std::invalid_argument("transducer: transition target out of range");
  for (char c : out_)
    if (!b_.contains(c)) throw std::invalid_argument("transducer: output symbol outside B");
}

PartialTransducer::PartialTransducer(int num_states, SymbolSet a, SymbolSet b)
    : num_states_(num_states), a_(std::move(a)), b_(std::move(b)),
      next_(static_cast<std::size_t>(num_states) * a_.size(), -1),
      out_(static_cast<std::size_t>(num_states) * a_.size(), '\0') {
  if (num_states_ < 1) throw std::invalid_argument("transducer: needs at least one state");
}

void PartialTransducer::set_transition(int state, int a_idx, int target, char out) {
  if (state < 0 || state >= num_states_ || a_idx < 0 || a_idx >= a_.size())
    throw std::invalid_argument("transducer: state/symbol out of range");
  if (target < 0 || target >= num_states_)
    throw std::invalid_argument("transducer: transition target out of range");
  if (!b_.contains(out)) throw std::invalid_argument("transducer: output symbol outside B");
  std::size_t i = static_cast<std::size_t>(state) * a_.size() + a_idx;
  next_[i] = target;
  out_[i] = out;
}

int PartialTransducer::defined_count() const {
  int n = 0;
  for (int t : next_)
    if (t >= 0) ++n;
  return n;
}

PartialTransducer as_partial(const Transducer& m) {
  PartialTransducer p(m.num_states(), m.a(), m.b());
  for (int s = 0; s < m.num_states(); ++s)
    for (int c = 0; c < m.a().size(); ++c) p.set_transition(s, c, m.next(s, c), m.out(s, c));
  return p;
}

Transducer as_total(const PartialTransducer& m) {
  std::vector<int> next;
  std::vector<char> out;
  for (int s = 0; s < m.num_states(); ++s)
    for (int c = 0; c < m.a().size(); ++c) {
      if (!m.defined(s, c))
        throw std::invalid_argument(std::string("machine is partial: missing row for q") +
                                    std::to_string(s) + " '" + m.a().at(c) + "'");
      next.push_back(m.next(s, c));
      out.push_back(m.out(s, c));
    }
  return Transducer(m.num_states(), m.a(), m.b(), std::move(next), std::move(out));
}

static void check_input(const SymbolSet& a, const std::string& u, const char* who) {
  if (u.empty()) throw std::invalid_argument(std::string(who) + ": input must be nonempty");
  for (char c : u)
    if (!a.contains(c))
      throw std::invalid_argument(std::string(who) + ": symbol '" + c + "' not in A");
}

char semantics(const Transducer& m, const std::string& u) {
  check_input(m.a(), u, "semantics");
  int s = m.start_state();
  char last = '\0';
  for (char c : u) {
    int i = m.a().index_of(c);
    last = m.out(s, i);
    s = m.next(s, i);
  }
  return last;
}

std::string seq_map(const Transducer& m, const std::string& u) {
  check_input(m.a(), u, "seq_map");
  std::string v;
  v.reserve(u.size());
  int s = m.start_state();
  for (char c : u) {
    int i = m.a().index_of(c);
    v.push_back(m.out(s, i));
    s = m.next(s, i);
  }
  return v;
}

std::optional<std::string> partial_seq_map(const PartialTransducer& m, const std::string& u) {
  check_input(m.a(), u, "partial_seq_map");
  std::string v;
  v.reserve(u.size());
  int s = m.start_state();
  for (char c : u) {
    int i = m.a().index_of(c);
    if (!m.defined(s, i)) return std::nullopt;
    v.push_back(m.out(s, i));
    s = m.next(s, i);
  }
  return v;
}

namespace {

// Coarsest partition of a total Mealy table in which same-block states have
// identical output behavior.  Hopcroft-style worklist refinement over
// preimages; the initial partition groups states by output row.
std::vector<int> mealy_partition(int n, int k, const std::vector<int>& next,
                                 const std::vector<char>& out) {
  std::vector<int> block_of(static_cast<std::size_t>(n));
  std::vector<std::vector<int>> blocks;
  {
    std::map<std::string, int> row_ids;
    for (int s = 0; s < n; ++s) {
      std::string row(out.begin() + static_cast<std::ptrdiff_t>(s) * k,
                      out.begin() + static_cast<std::ptrdiff_t>(s + 1) * k);
      auto [it, fresh] = row_ids.try_emplace(row, static_cast<int>(blocks.size()));
      if (fresh) blocks.emplace_back();
      block_of[static_cast<std::size_t>(s)] = it->second;
      blocks[static_cast<std::size_t>(it->second)].push_back(s);
    }
  }

  // inverse transitions per symbol
  std::vector<std::vector<std::vector<int>>> inv(
      static_cast<std::size_t>(k), std::vector<std::vector<int>>(static_cast<std::size_t>(n)));
  for (int s = 0; s < n; ++s)
    for (int c = 0; c < k; ++c)
      inv[static_cast<std::size_t>(c)][static_cast<std::size_t>(next[static_cast<std::size_t>(s) * k + c])]
          .push_back(s);

  std::deque<std::pair<int, int>> work;
  std::set<std::pair<int, int>> in_work;
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b)
    for (int c = 0; c < k; ++c) {
      work.emplace_back(b, c);
      in_work.insert({b, c});
    }

  while (!work.empty()) {
    auto [bid, c] = work.front();
    work.pop_front();
    in_work.erase({bid, c});

    // preimage of the splitter block under symbol c, bucketed by block
    std::map<int, std::vector<int>> touched;
    for (int t : blocks[static_cast<std::size_t>(bid)])
      for (int s : inv[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)])
        touched[block_of[static_cast<std::size_t>(s)]].push_back(s);

    for (auto& [y, members] : touched) {
      auto& ymembers = blocks[static_cast<std::size_t>(y)];
      if (members.size() == ymembers.size()) continue;  // whole block maps in; no split

      int nb = static_cast<int>(blocks.size());
      for (int s : members) block_of[static_cast<std::size_t>(s)] = nb;
      std::vector<int> rest;
      rest.reserve(ymembers.size() - members.size());
      for (int s : ymembers)
        if (block_of[static_cast<std::size_t>(s)] == y) rest.push_back(s);
      ymembers = std::move(rest);
      blocks.push_back(std::move(members));

      // worklist policy: pending splitters stay valid for both halves;
      // otherwise the smaller half suffices
      for (int d = 0; d < k; ++d) {
        if (in_work.count({y, d})) {
          work.emplace_back(nb, d);
          in_work.insert({nb, d});
        } else {
          int smaller = blocks[static_cast<std::size_t>(nb)].size() <
                                blocks[static_cast<std::size_t>(y)].size()
                            ? nb
                            : y;
          work.emplace_back(smaller, d);
          in_work.insert({smaller, d});
        }
      }
    }
  }
  return block_of;
}

std::vector<int> reachable_order_total(const Transducer& m) {
  std::vector<int> order;
  std::vector<bool> seen(static_cast<std::size_t>(m.num_states()), false);
  std::deque<int> q{m.start_state()};
  seen[static_cast<std::size_t>(m.start_state())] = true;
  while (!q.empty()) {
    int s = q.front();
    q.pop_front();
    order.push_back(s);
    for (int c = 0; c < m.a().size(); ++c) {
      int t = m.next(s, c);
      if (!seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = true;
        q.push_back(t);
      }
    }
  }
  return order;
}

}  // namespace

MinimizeResult minimize(const Transducer& m) {
  int k = m.a().size();
  std::vector<int> order = reachable_order_total(m);
  int n = static_cast<int>(order.size());
  std::vector<int> comp(static_cast<std::size_t>(m.num_states()), -1);
  for (int i = 0; i < n; ++i) comp[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;

  std::vector<int> next(static_cast<std::size_t>(n) * k);
  std::vector<char> out(static_cast<std::size_t>(n) * k);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < k; ++c) {
      next[static_cast<std::size_t>(i) * k + c] =
          comp[static_cast<std::size_t>(m.next(order[static_cast<std::size_t>(i)], c))];
      out[static_cast<std::size_t>(i) * k + c] = m.out(order[static_cast<std::size_t>(i)], c);
    }

  std::vector<int> block_of = mealy_partition(n, k, next, out);
  int num_blocks = *std::max_element(block_of.begin(), block_of.end()) + 1;

  // representative member per block, then BFS relabel from the start block
  std::vector<int> rep(static_cast<std::size_t>(num_blocks), -1);
  for (int i = 0; i < n; ++i)
    if (rep[static_cast<std::size_t>(block_of[static_cast<std::size_t>(i)])] < 0)
      rep[static_cast<std::size_t>(block_of[static_cast<std::size_t>(i)])] = i;

  std::vector<int> bfs_id(static_cast<std::size_t>(num_blocks), -1);
  std::vector<int> bfs_order;
  std::deque<int> q{block_of[0]};
  bfs_id[static_cast<std::size_t>(block_of[0])] = 0;
  bfs_order.push_back(block_of[0]);
  while (!q.empty()) {
    int b = q.front();
    q.pop_front();
    int r = rep[static_cast<std::size_t>(b)];
    for (int c = 0; c < k; ++c) {
      int tb = block_of[static_cast<std::size_t>(next[static_cast<std::size_t>(r) * k + c])];
      if (bfs_id[static_cast<std::size_t>(tb)] < 0) {
        bfs_id[static_cast<std::size_t>(tb)] = static_cast<int>(bfs_order.size());
        bfs_order.push_back(tb);
        q.push_back(tb);
      }
    }
  }

  std::vector<int> qnext(static_cast<std::size_t>(num_blocks) * k);
  std::vector<char> qout(static_cast<std::size_t>(num_blocks) * k);
  for (int id = 0; id < num_blocks; ++id) {
    int r = rep[static_cast<std::size_t>(bfs_order[static_cast<std::size_t>(id)])];
    for (int c = 0; c < k; ++c) {
      qnext[static_cast<std::size_t>(id) * k + c] =
          bfs_id[static_cast<std::size_t>(block_of[static_cast<std::size_t>(
              next[static_cast<std::size_t>(r) * k + c])])];
      qout[static_cast<std::size_t>(id) * k + c] = out[static_cast<std::size_t>(r) * k + c];
    }
  }

  std::vector<int> state_class(static_cast<std::size_t>(m.num_states()), -1);
  for (int s = 0; s < m.num_states(); ++s)
    if (comp[static_cast<std::size_t>(s)] >= 0)
      state_class[static_cast<std::size_t>(s)] =
          bfs_id[static_cast<std::size_t>(block_of[static_cast<std::size_t>(comp[static_cast<std::size_t>(s)])])];

  return MinimizeResult{Transducer(num_blocks, m.a(), m.b(), std::move(qnext), std::move(qout)),
                        std::move(state_class)};
}

EquivalenceResult equivalent(const Transducer& m1, const Transducer& m2) {
  if (!(m1.a() == m2.a()))
    throw std::invalid_argument("equivalent: machines must share the input alphabet");
  int k = m1.a().size();
  int n1 = m1.num_states(), n2 = m2.num_states();
  int n = n1 + n2;

  std::vector<int> next(static_cast<std::size_t>(n) * k);
  std::vector<char> out(static_cast<std::size_t>(n) * k);
  for (int s = 0; s < n1; ++s)
    for (int c = 0; c < k; ++c) {
      next[static_cast<std::size_t>(s) * k + c] = m1.next(s, c);
      out[static_cast<std::size_t>(s) * k + c] = m1.out(s, c);
    }
  for (int s = 0; s < n2; ++s)
    for (int c = 0; c < k; ++c) {
      next[static_cast<std::size_t>(n1 + s) * k + c] = n1 + m2.next(s, c);
      out[static_cast<std::size_t>(n1 + s) * k + c] = m2.out(s, c);
    }

  std::vector<int> block_of = mealy_partition(n, k, next, out);
  if (block_of[0] == block_of[static_cast<std::size_t>(n1)]) return {true, ""};

  // shortest witness by BFS over the product of the two machines
  std::vector<int> parent(static_cast<std::size_t>(n1) * n2, -1);
  std::vector<char> via(static_cast<std::size_t>(n1) * n2, '\0');
  std::vector<bool> seen(static_cast<std::size_t>(n1) * n2, false);
  std::deque<int> q;
  auto id = [&](int p, int r) { return p * n2 + r; };
  seen[static_cast<std::size_t>(id(0, 0))] = true;
  q.push_back(id(0, 0));
  while (!q.empty()) {
    int cur = q.front();
    q.pop_front();
    int p = cur / n2, r = cur % n2;
    for (int c = 0; c < k; ++c) {
      if (m1.out(p, c) != m2.out(r, c)) {
        std::string w(1, m1.a().at(c));
        for (int node = cur; node != id(0, 0); node = parent[static_cast<std::size_t>(node)])
          w.push_back(via[static_cast<std::size_t>(node)]);
        std::reverse(w.begin(), w.end());
        return {false, w};
      }
      int nxt = id(m1.next(p, c), m2.next(r, c));
      if (!seen[static_cast<std::size_t>(nxt)]) {
        seen[static_cast<std::size_t>(nxt)] = true;
        parent[static_cast<std::size_t>(nxt)] = cur;
        via[static_cast<std::size_t>(nxt)] = m1.a().at(c);
        q.push_back(nxt);
      }
    }
  }
  throw std::logic_error("equivalent: refinement and product search disagree");
}

ApartResult apart(const PartialTransducer& m, int p, int q) {
  if (p < 0 || p >= m.num_states() || q < 0 || q >= m.num_states())
    throw std::invalid_argument("apart: state out of range");
  if (p == q) return {false, ""};
  int n = m.num_states(), k = m.a().size();
  auto id = [&](int x, int y) { return x * n + y; };
  std::vector<int> parent(static_cast<std::size_t>(n) * n, -1);
  std::vector<char> via(static_cast<std::size_t>(n) * n, '\0');
  std::vector<bool> seen(static_cast<std::size_t>(n) * n, false);
  std::deque<int> queue;
  seen[static_cast<std::size_t>(id(p, q))] = true;
  queue.push_back(id(p, q));
  while (!queue.empty()) {
    int cur = queue.front();
    queue.pop_front();
    int x = cur / n, y = cur % n;
    for (int c = 0; c < k; ++c) {
      // missing transitions on either side carry no evidence
      if (!m.defined(x, c) || !m.defined(y, c)) continue;
      if (m.out(x, c) != m.out(y, c)) {
        std::string w(1, m.a().at(c));
        for (int node = cur; node != id(p, q); node = parent[static_cast<std::size_t>(node)])
          w.push_back(via[static_cast<std::size_t>(node)]);
        std::reverse(w.begin(), w.end());
        return {true, w};
      }
      int nxt = id(m.next(x, c), m.next(y, c));
      if (!seen[static_cast<std::size_t>(nxt)]) {
        seen[static_cast<std::size_t>(nxt)] = true;
        parent[static_cast<std::size_t>(nxt)] = cur;
        via[static_cast<std::size_t>(nxt)] = m.a().at(c);
        queue.push_back(nxt);
      }
    }
  }
  return {false, ""};
}

QuotientResult quotient(const PartialTransducer& m, const std::vector<int>& block_of) {
  if (block_of.size() != static_cast<std::size_t>(m.num_states()))
    throw std::invalid_argument("quotient: partition size mismatch");
  int num_blocks = 0;
  for (int b : block_of) {
    if (b < 0) throw std::invalid_argument("quotient: negative block id");
    num_blocks = std::max(num_blocks, b + 1);
  }
  std::vector<bool> used(static_cast<std::size_t>(num_blocks), false);
  for (int b : block_of) used[static_cast<std::size_t>(b)] = true;
  for (bool u : used)
    if (!u) throw std::invalid_argument("quotient: partition skips a block id");

  int k = m.a().size();
  QuotientResult res;
  res.num_blocks = num_blocks;
  res.relation.assign(static_cast<std::size_t>(num_blocks) * k, {});
  for (int s = 0; s < m.num_states(); ++s)
    for (int c = 0; c < k; ++c) {
      if (!m.defined(s, c)) continue;
      auto& cell = res.relation[static_cast<std::size_t>(block_of[static_cast<std::size_t>(s)]) * k + c];
      std::pair<int, char> entry{block_of[static_cast<std::size_t>(m.next(s, c))], m.out(s, c)};
      if (std::find(cell.begin(), cell.end(), entry) == cell.end()) cell.push_back(entry);
    }
  for (auto& cell : res.relation) std::sort(cell.begin(), cell.end());

  res.deterministic = std::all_of(res.relation.begin(), res.relation.end(),
                                  [](const auto& cell) { return cell.size() <= 1; });
  if (!res.deterministic) return res;

  // deterministic quotient machine, BFS order from the start block
  int start_block = block_of[static_cast<std::size_t>(m.start_state())];
  std::vector<int> bfs_id(static_cast<std::size_t>(num_blocks), -1);
  std::vector<int> order;
  std::deque<int> q{start_block};
  bfs_id[static_cast<std::size_t>(start_block)] = 0;
  order.push_back(start_block);
  while (!q.empty()) {
    int b = q.front();
    q.pop_front();
    for (int c = 0; c < k; ++c) {
      const auto& cell = res.relation[static_cast<std::size_t>(b) * k + c];
      if (cell.empty()) continue;
      int tb = cell[0].first;
      if (bfs_id[static_cast<std::size_t>(tb)] < 0) {
        bfs_id[static_cast<std::size_t>(tb)] = static_cast<int>(order.size());
        order.push_back(tb);
        q.push_back(tb);
      }
    }
  }

  PartialTransducer qm(static_cast<int>(order.size()), m.a(), m.b());
  for (int idx = 0; idx < static_cast<int>(order.size()); ++idx) {
    int b = order[static_cast<std::size_t>(idx)];
    for (int c = 0; c < k; ++c) {
      const auto& cell = res.relation[static_cast<std::size_t>(b) * k + c];
      if (cell.empty()) continue;
      qm.set_transition(idx, c, bfs_id[static_cast<std::size_t>(cell[0].first)], cell[0].second);
    }
  }
  res.machine = std::move(qm);
  res.machine_state_to_block = std::move(order);
  return res;
}

Transducer canonical_form(const Transducer& m) {
  int k = m.a().size();
  std::vector<int> order = reachable_order_total(m);
  std::vector<int> new_id(static_cast<std::size_t>(m.num_states()), -1);
  for (int i = 0; i < static_cast<int>(order.size()); ++i)
    new_id[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;
  std::vector<int> next(order.size() * static_cast<std::size_t>(k));
  std::vector<char> out(order.size() * static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int c = 0; c < k; ++c) {
      next[i * k + static_cast<std::size_t>(c)] =
          new_id[static_cast<std::size_t>(m.next(order[i], c))];
      out[i * k + static_cast<std::size_t>(c)] = m.out(order[i], c);
    }
  return Transducer(static_cast<int>(order.size()), m.a(), m.b(), std::move(next), std::move(out));
}

PartialTransducer canonical_form(const PartialTransducer& m) {
  int k = m.a().size();
  std::vector<int> order;
  std::vector<int> new_id(static_cast<std::size_t>(m.num_states()), -1);
  std::deque<int> q{m.start_state()};
  new_id[static_cast<std::size_t>(m.start_state())] = 0;
  order.push_back(m.start_state());
  while (!q.empty()) {
    int s = q.front();
    q.pop_front();
    for (int c = 0; c < k; ++c) {
      if (!m.defined(s, c)) continue;
      int t = m.next(s, c);
      if (new_id[static_cast<std::size_t>(t)] < 0) {
        new_id[static_cast<std::size_t>(t)] = static_cast<int>(order.size());
        order.push_back(t);
        q.push_back(t);
      }
    }
  }
  PartialTransducer res(static_cast<int>(order.size()), m.a(), m.b());
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int c = 0; c < k; ++c) {
      if (!m.defined(order[i], c)) continue;
      res.set_transition(static_cast<int>(i), c, new_id[static_cast<std::size_t>(m.next(order[i], c))],
                         m.out(order[i], c));
    }
  return res;
}

bool isomorphic(const Transducer& m1, const Transducer& m2) {
  if (!(m1.a() == m2.a()) || !(m1.b() == m2.b())) return false;
  return canonical_form(m1) == canonical_form(m2);
}

std::uint64_t transducers_with_state_count(int num_states, int a_size, int b_size) {
  if (num_states < 1 || a_size < 1 || b_size < 1) return 0;
  unsigned __int128 radix = static_cast<unsigned __int128>(num_states) * b_size;
  unsigned __int128 total = 1;
  long entries = static_cast<long>(num_states) * a_size;
  for (long i = 0; i < entries; ++i) {
    total *= radix;
    if (total > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(total);
}

Transducer enumerate_transducer(std::uint64_t index, const SymbolSet& a, const SymbolSet& b) {
  if (index == 0) throw std::invalid_argument("enumerate_transducer: index is 1-based");
  unsigned __int128 before = 0;
  int k = 1;
  for (;; ++k) {
    std::uint64_t group = transducers_with_state_count(k, a.size(), b.size());
    if (group == UINT64_MAX || index <= before + group) break;
    before += group;
  }
  std::uint64_t offset = static_cast<std::uint64_t>(index - before - 1);

  int entries = k * a.size();
  std::uint64_t radix = static_cast<std::uint64_t>(k) * b.size();
  std::vector<std::uint64_t> digits(static_cast<std::size_t>(entries));
  for (int e = entries - 1; e >= 0; --e) {
    digits[static_cast<std::size_t>(e)] = offset % radix;
    offset /= radix;
  }
  std::vector<int> next;
  std::vector<char> out;
  next.reserve(digits.size());
  out.reserve(digits.size());
  for (std::uint64_t d : digits) {
    next.push_back(static_cast<int>(d / b.size()));
    out.push_back(b.at(static_cast<int>(d % b.size())));
  }
  return Transducer(k, a, b, std::move(next), std::move(out));
}

std::string serialize(const PartialTransducer& m) {
  std::ostringstream os;
  os << "fst states=" << m.num_states() << " a=" << m.a().chars() << " b=" << m.b().chars()
     << "\n";
  for (int s = 0; s < m.num_states(); ++s)
    for (int c = 0; c < m.a().size(); ++c) {
      if (!m.defined(s, c)) continue;
      os << 'q' << s << ' ' << m.a().at(c) << " -> q" << m.next(s, c) << ' ' << m.out(s, c)
         << "\n";
    }
  return os.str();
}

std::string serialize(const Transducer& m) { return serialize(as_partial(m)); }

namespace {

std::vector<std::pair<std::string, int>> fst_tokenize(const std::string& line) {
  std::vector<std::pair<std::string, int>> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    tokens.emplace_back(line.substr(i, j - i), static_cast<int>(i) + 1);
    i = j;
  }
  return tokens;
}

std::string fst_expect_kv(const std::pair<std::string, int>& tok, const std::string& key,
                          int line) {
  const std::string& s = tok.first;
  if (s.size() < key.size() + 1 || s.compare(0, key.size(), key) != 0 || s[key.size()] != '=')
    throw ParseError(line, tok.second, "expected " + key + "=...");
  return s.substr(key.size() + 1);
}

int fst_state_token(const std::pair<std::string, int>& tok, int line) {
  const std::string& s = tok.first;
  if (s.size() < 2 || s[0] != 'q' || s.find_first_not_of("0123456789", 1) != std::string::npos)
    throw ParseError(line, tok.second, "expected a state like q0");
  return std::stoi(s.substr(1));
}

}  // namespace

PartialTransducer parse_partial_transducer(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_line()) throw ParseError(1, 1, "empty transducer description");
  auto header = fst_tokenize(line);
  if (header.empty() || header[0].first != "fst")
    throw ParseError(line_no, header.empty() ? 1 : header[0].second, "expected 'fst' header");
  if (header.size() != 4) throw ParseError(line_no, 1, "header needs states=, a=, b=");
  int n;
  try {
    n = std::stoi(fst_expect_kv(header[1], "states", line_no));
  } catch (const std::logic_error&) {
    throw ParseError(line_no, header[1].second, "bad state count");
  }
  if (n < 1) throw ParseError(line_no, header[1].second, "state count must be positive");
  SymbolSet a = [&] {
    try {
      return SymbolSet(fst_expect_kv(header[2], "a", line_no));
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, header[2].second, e.what());
    }
  }();
  SymbolSet b = [&] {
    try {
      return SymbolSet(fst_expect_kv(header[3], "b", line_no));
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, header[3].second, e.what());
    }
  }();

  PartialTransducer m(n, a, b);
  while (next_line()) {
    auto toks = fst_tokenize(line);
    if (toks.size() != 5 || toks[2].first != "->")
      throw ParseError(line_no, toks.empty() ? 1 : toks[0].second,
                       "expected 'q<i> <a> -> q<j> <b>'");
    int from = fst_state_token(toks[0], line_no);
    if (from >= n) throw ParseError(line_no, toks[0].second, "state out of range");
    if (toks[1].first.size() != 1 || !a.contains(toks[1].first[0]))
      throw ParseError(line_no, toks[1].second, "expected an A symbol");
    int c = a.index_of(toks[1].first[0]);
    int to = fst_state_token(toks[3], line_no);
    if (to >= n) throw ParseError(line_no, toks[3].second, "state out of range");
    if (toks[4].first.size() != 1 || !b.contains(toks[4].first[0]))
      throw ParseError(line_no, toks[4].second, "expected a B symbol");
    if (m.defined(from, c))
      throw ParseError(line_no, toks[0].second, "duplicate transition row");
    m.set_transition(from, c, to, toks[4].first[0]);
  }
  return m;
}

Transducer parse_transducer(const std::string& text) {
  return as_total(parse_partial_transducer(text));
}

}  // namespace limitlab
