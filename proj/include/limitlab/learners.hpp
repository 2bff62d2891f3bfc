#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "limitlab/machines.hpp"
#include "limitlab/observations.hpp"
#include "limitlab/transducers.hpp"

namespace limitlab {

// Saturating helpers used by the resource-bound presets.
std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b);
std::uint64_t sat_add(std::uint64_t a, std::uint64_t b);

// Named monotone bound in (c, n); named so configs and checkpoints can
// refer to it.
struct ResourceBound {
  std::string name;
  std::function<std::uint64_t(std::uint64_t, std::uint64_t)> fn;

  std::uint64_t operator()(std::uint64_t c, std::uint64_t n) const { return fn(c, n); }
};

// q-overhead presets: identity, linear, quadratic.
ResourceBound q_overhead_preset(const std::string& name);
// class-bound presets for Q: linear, quadratic, cubic.
ResourceBound class_bound_preset(const std::string& name);

enum class DiscardReason { WrongOutput, TooSlow };

enum class LearnerMode { AlwaysConsistent, PolynomialCapped };

struct EnumTmLearnerConfig {
  TapeAlphabet alphabet;
  ResourceBound q_overhead = q_overhead_preset("identity");
  ResourceBound class_bound = class_bound_preset("linear");
  LearnerMode mode = LearnerMode::AlwaysConsistent;
  // capped mode: at most cap_coeff * (mass+1)^cap_exp simulated steps per observe()
  std::uint64_t cap_coeff = 1000;
  int cap_exp = 2;
};

struct Hypothesis {
  std::uint64_t index = 0;  // 1-based enumeration index; 0 = none yet
  bool validated = false;   // passed the full validity check this step
};

// Enumeration learner over the canonical machine enumeration.  Keeps a
// counter C; a candidate i is valid at (t, C) if i <= C and it reproduces
// every seen example within the per-example budget: q(C, C*Q(C,|x|)) on the
// identity channel, q(C, C*bound) on the time-bound channel.  Returns the
// least valid index, raising C while none exists.  Wrong-output discards
// are permanent; too-slow candidates are retried as C grows.  Simulations
// are resumed, never restarted, which leaves verdicts unchanged.
class EnumTmLearner {
 public:
  EnumTmLearner(EnumTmLearnerConfig cfg, bool time_bounded);

  Hypothesis observe(const Example& ex);
  // adds to the seen set without running the scan (checkpoint resume)
  void ingest_silent(const Example& ex);

  bool time_bounded() const { return time_bounded_; }
  std::uint64_t counter() const { return counter_; }
  Hypothesis current() const { return current_; }
  const std::map<std::uint64_t, DiscardReason>& discarded() const { return discarded_; }
  const ExampleSet& seen() const { return seen_; }
  const TuringMachine& machine(std::uint64_t index);

  std::string checkpoint() const;
  static EnumTmLearner restore(EnumTmLearnerConfig cfg, bool time_bounded,
                               const std::string& text);

 private:
  std::uint64_t example_budget(const Example& ex) const;
  // 1 = valid, 0 = invalid, -1 = compute cap exhausted mid-check
  int candidate_valid(std::uint64_t index, std::uint64_t* spent, std::uint64_t cap);

  EnumTmLearnerConfig cfg_;
  bool time_bounded_;
  std::uint64_t counter_ = 1;
  Hypothesis current_;
  ExampleSet seen_;
  std::map<std::uint64_t, DiscardReason> discarded_;  // WrongOutput entries are permanent
  std::map<std::uint64_t, TuringMachine> machines_;
  std::map<std::pair<std::uint64_t, std::string>, ResumableRun> runs_;
};

Hypothesis enum_ioo_step(EnumTmLearner& learner, const Example& ex);
Hypothesis enum_tbo_step(EnumTmLearner& learner, const Example& ex);

// Canonical coder between (write symbol, move) pairs and the output
// alphabet of psi-images: pair (gamma[i], m) sits at pool position 3*i + m
// with moves ordered L, R, S.
class WriteMoveCoder {
 public:
  explicit WriteMoveCoder(const TapeAlphabet& alphabet);

  const TapeAlphabet& tape_alphabet() const { return alphabet_; }
  const SymbolSet& b() const { return b_; }
  char encode(char write, Move m) const;
  std::pair<char, Move> decode(char coded) const;
  std::string encode_actions(const std::vector<ActionTuple>& actions) const;

 private:
  TapeAlphabet alphabet_;
  SymbolSet b_;
};

// The transducer with the machine's transition diagram: reads scanned
// symbols, emits coded (write, move) pairs.  Halt-state rows are completed
// with self-loops emitting the coded (blank, stay) pair.
struct PsiImage {
  Transducer machine;
  WriteMoveCoder coder;
};
PsiImage psi(const TuringMachine& tm);

// Turns trajectory observations into transducer training pairs
// (scanned string, coded write-move string).  Empty trajectories impose no
// constraint and are dropped.
std::vector<std::pair<std::string, std::string>> pto_reduce(const ExampleSet& examples,
                                                            const WriteMoveCoder& coder);

// Enumeration learner over total transducers: least index consistent with
// every seen pair under seq_map.  Pairs must be prefix-consistent.
class RationalEnumLearner {
 public:
  RationalEnumLearner(SymbolSet a, SymbolSet b);

  std::uint64_t observe(const std::string& x, const std::string& y);
  std::uint64_t current_index() const { return candidate_; }
  const Transducer& machine(std::uint64_t index);
  const std::vector<std::pair<std::string, std::string>>& seen() const { return seen_; }

 private:
  bool consistent(std::uint64_t index);

  SymbolSet a_, b_;
  std::uint64_t candidate_ = 1;
  std::vector<std::pair<std::string, std::string>> seen_;
  std::map<std::string, char> forced_;  // input prefix -> forced output symbol
  std::map<std::uint64_t, Transducer> machines_;
};

struct PrefixConflictError : std::invalid_argument {
  std::string prefix;
  explicit PrefixConflictError(std::string prefix_);
};

// Trie-shaped partial machine over the pairs; states in BFS order.
struct ObservationTree {
  PartialTransducer machine;
  std::vector<std::string> state_prefix;  // input prefix reaching each state
  std::vector<int> created_by;            // pair index that created the state; -1 for the root
  std::vector<bool> is_leaf;
};

ObservationTree build_observation_tree(const std::vector<std::pair<std::string, std::string>>& pairs,
                                       const SymbolSet& a, const SymbolSet& b);

struct MergeOutcome {
  std::optional<PartialTransducer> machine;  // BFS order; absent when the merger is invalid
  int mergers = 0;                           // union operations performed

  bool valid() const { return machine.has_value(); }
};

// Merges two states and cascades the forced identifications until the
// quotient is deterministic; invalid when some cascade step equates
// transitions with different outputs.
MergeOutcome merge(const PartialTransducer& m, int p, int q);

// Similarity score: number of states saved by a valid merger, 0 otherwise.
int similarity(const PartialTransducer& m, int p, int q);

// Maximum-similarity merging: repeatedly merges the highest-scoring pair,
// breaking ties toward the smallest (BFS, BFS) index pair, until every
// merger is invalid.
PartialTransducer msm(const ObservationTree& tree);

// Runs a partial transducer as a tape-rewriting policy: each step scans a
// symbol, applies the emitted (write, move) pair, and ends when the state
// has no transition for the scanned symbol.
RunOutcome policy_run(const PartialTransducer& policy, const WriteMoveCoder& coder,
                      const std::string& input, std::uint64_t budget);

}  // namespace limitlab
