#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "limitlab/machines.hpp"  // ParseError

namespace limitlab {

// Ordered set of distinct printable symbols, indexable both ways.
class SymbolSet {
 public:
  SymbolSet() = default;
  explicit SymbolSet(std::string syms);

  int size() const { return static_cast<int>(syms_.size()); }
  char at(int i) const { return syms_[static_cast<std::size_t>(i)]; }
  int index_of(char c) const { return index_[static_cast<unsigned char>(c)]; }
  bool contains(char c) const { return index_of(c) >= 0; }
  const std::string& chars() const { return syms_; }

  friend bool operator==(const SymbolSet& x, const SymbolSet& y) { return x.syms_ == y.syms_; }

 private:
  std::string syms_;
  std::array<int, 256> index_{};
};

// Total sequential (Mealy) transducer.  States 0..n-1, start state 0; next
// and out are total on Q x A.
class Transducer {
 public:
  Transducer(int num_states, SymbolSet a, SymbolSet b, std::vector<int> next,
             std::vector<char> out);

  int num_states() const { return num_states_; }
  int start_state() const { return 0; }
  const SymbolSet& a() const { return a_; }
  const SymbolSet& b() const { return b_; }

  int next(int state, int a_idx) const {
    return next_[static_cast<std::size_t>(state) * a_.size() + a_idx];
  }
  char out(int state, int a_idx) const {
    return out_[static_cast<std::size_t>(state) * a_.size() + a_idx];
  }

  friend bool operator==(const Transducer&, const Transducer&) = default;

 private:
  int num_states_;
  SymbolSet a_, b_;
  std::vector<int> next_;
  std::vector<char> out_;
};

// Partial machine: an entry is either absent or carries both a target and
// an output symbol.
class PartialTransducer {
 public:
  PartialTransducer(int num_states, SymbolSet a, SymbolSet b);

  int num_states() const { return num_states_; }
  int start_state() const { return 0; }
  const SymbolSet& a() const { return a_; }
  const SymbolSet& b() const { return b_; }

  bool defined(int state, int a_idx) const { return next(state, a_idx) >= 0; }
  int next(int state, int a_idx) const {
    return next_[static_cast<std::size_t>(state) * a_.size() + a_idx];
  }
  char out(int state, int a_idx) const {
    return out_[static_cast<std::size_t>(state) * a_.size() + a_idx];
  }
  void set_transition(int state, int a_idx, int target, char out);

  int defined_count() const;

  friend bool operator==(const PartialTransducer&, const PartialTransducer&) = default;

 private:
  int num_states_;
  SymbolSet a_, b_;
  std::vector<int> next_;  // -1 when undefined
  std::vector<char> out_;
};

PartialTransducer as_partial(const Transducer& m);

// Converts a partial machine whose table happens to be total.
Transducer as_total(const PartialTransducer& m);

// Mealy semantics on nonempty input strings: the symbol emitted by the
// last transition.
char semantics(const Transducer& m, const std::string& u);

// Sequence-to-sequence map: the outputs emitted along the whole run, one
// per input symbol.
std::string seq_map(const Transducer& m, const std::string& u);

// seq_map on a partial machine; nullopt when the run leaves the defined
// region.
std::optional<std::string> partial_seq_map(const PartialTransducer& m, const std::string& u);

struct MinimizeResult {
  Transducer machine;
  std::vector<int> state_class;  // original state -> canonical state; -1 if unreachable
};

// Minimal machine for the same semantics, built by partition refinement
// over the reachable part and relabeled into BFS order.
MinimizeResult minimize(const Transducer& m);

struct EquivalenceResult {
  bool equal;
  std::string witness;  // shortest distinguishing string when !equal
};

// Semantic equality of two machines over the same alphabets.  A negative
// answer carries a witness of length at most n + n' - 1.
EquivalenceResult equivalent(const Transducer& m1, const Transducer& m2);

struct ApartResult {
  bool apart;
  std::string witness;  // defined along both paths; outputs differ at the last step
};

// Apartness of two states of a partial machine: only strings defined along
// both paths count as evidence.
ApartResult apart(const PartialTransducer& m, int p, int q);

struct QuotientResult {
  bool deterministic;
  // per (block, input symbol): sorted distinct (target block, output) pairs
  std::vector<std::vector<std::pair<int, char>>> relation;
  int num_blocks;
  // present iff deterministic; states in BFS order from the start block
  std::optional<PartialTransducer> machine;
  std::vector<int> machine_state_to_block;
};

// Quotient by a partition given as block_of[state]; blocks must be
// numbered 0..k-1 with every id used.
QuotientResult quotient(const PartialTransducer& m, const std::vector<int>& block_of);

// BFS relabeling from the start state with the input alphabet order fixed;
// unreachable states are dropped.  Two machines are isomorphic iff their
// canonical forms are equal.
Transducer canonical_form(const Transducer& m);
PartialTransducer canonical_form(const PartialTransducer& m);
bool isomorphic(const Transducer& m1, const Transducer& m2);

// Number of total transducers with exactly `num_states` states over
// alphabet sizes |A|, |B|; saturates at uint64 max.
std::uint64_t transducers_with_state_count(int num_states, int a_size, int b_size);

// Fixed enumeration of all total transducers over (A, B) by ascending
// state count; index is 1-based.
Transducer enumerate_transducer(std::uint64_t index, const SymbolSet& a, const SymbolSet& b);

std::string serialize(const PartialTransducer& m);
std::string serialize(const Transducer& m);
PartialTransducer parse_partial_transducer(const std::string& text);
Transducer parse_transducer(const std::string& text);

}  // namespace limitlab
