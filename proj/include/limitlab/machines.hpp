#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace limitlab {

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int line, int col, const std::string& msg);
};

enum class Move : std::uint8_t { Left, Right, Stay };

char to_char(Move m);
std::optional<Move> move_from_char(char c);

// One simulation step as seen from the tape: symbol read, symbol written,
// head move.  Equality is structural.
struct ActionTuple {
  char read{};
  char write{};
  Move move{Move::Stay};
  friend bool operator==(const ActionTuple&, const ActionTuple&) = default;
};

// Tape alphabet.  gamma()[0] is the blank; sigma() is the problem alphabet
// and never contains the blank.  Symbols are printable, non-space chars.
class TapeAlphabet {
 public:
  TapeAlphabet() : TapeAlphabet("_", "") {}  // blank-only placeholder
  TapeAlphabet(std::string gamma, std::string sigma);

  char blank() const { return gamma_[0]; }
  const std::string& gamma() const { return gamma_; }
  const std::string& sigma() const { return sigma_; }
  int size() const { return static_cast<int>(gamma_.size()); }

  // index into gamma(), -1 if absent
  int index_of(char c) const { return index_[static_cast<unsigned char>(c)]; }
  bool in_gamma(char c) const { return index_of(c) >= 0; }
  bool in_sigma(char c) const { return sigma_member_[static_cast<unsigned char>(c)]; }

  friend bool operator==(const TapeAlphabet& a, const TapeAlphabet& b) {
    return a.gamma_ == b.gamma_ && a.sigma_ == b.sigma_;
  }

 private:
  std::string gamma_;
  std::string sigma_;
  std::array<int, 256> index_{};
  std::array<bool, 256> sigma_member_{};
};

struct Transition {
  int next{};
  char write{};
  Move move{Move::Stay};
  friend bool operator==(const Transition&, const Transition&) = default;
};

// Deterministic single-tape machine in canonical form: states are
// 0..num_states()-1, the start state is 0 and the halt state is the last
// one.  The table is total on (Q \ {halt}) x Gamma; the halt state has no
// outgoing rows.
class TuringMachine {
 public:
  TuringMachine() : TuringMachine(1, TapeAlphabet(), {}) {}  // halts at once
  // table indexed by state * |gamma| + symbol_index, states 0..n-2
  TuringMachine(int num_states, TapeAlphabet alphabet, std::vector<Transition> table);

  int num_states() const { return num_states_; }
  int start_state() const { return 0; }
  int halt_state() const { return num_states_ - 1; }
  const TapeAlphabet& alphabet() const { return alphabet_; }

  const Transition& transition(int state, char symbol) const;
  const Transition& transition_at(int state, int symbol_index) const {
    return table_[static_cast<std::size_t>(state) * alphabet_.size() + symbol_index];
  }

  friend bool operator==(const TuringMachine&, const TuringMachine&) = default;

 private:
  int num_states_;
  TapeAlphabet alphabet_;
  std::vector<Transition> table_;
};

// Sparse tape: cells never written read as blank.  Cell indices may be
// negative; storage grows with the head's travel only.
class Tape {
 public:
  explicit Tape(char blank) : blank_(blank) {}
  Tape(std::string_view input, char blank)
      : blank_(blank), right_(input.begin(), input.end()) {}

  char blank() const { return blank_; }
  char read(std::int64_t pos) const;
  void write(std::int64_t pos, char sym);

  // [lo, hi] extent of non-blank cells; nullopt when the tape is all blank
  std::optional<std::pair<std::int64_t, std::int64_t>> support() const;

 private:
  char blank_;
  std::vector<char> right_;  // cells 0, 1, 2, ...
  std::vector<char> left_;   // cells -1, -2, ...
};

struct TapeConfiguration {
  Tape tape;
  std::int64_t head = 0;
  int state = 0;
};

TapeConfiguration initial_configuration(const TuringMachine& tm, const std::string& input);

// Applies one transition and reports it; nullopt signals the halt state.
std::optional<ActionTuple> step(const TuringMachine& tm, TapeConfiguration& cfg);

// Output convention: defined iff the final tape holds a single contiguous
// sigma-string (the all-blank tape yields the empty string).
std::optional<std::string> extract_output(const Tape& tape, const TapeAlphabet& alphabet);

struct RunOutcome {
  enum class Status { Halted, OutOfBudget };
  Status status{Status::OutOfBudget};
  std::optional<std::string> output;  // set on Halted; nullopt = undefined output
  std::uint64_t steps = 0;

  bool halted() const { return status == Status::Halted; }
};

// Runs at most `budget` steps from the standard initial configuration.
// Exceeding the budget is a value, not an error.
RunOutcome run_bounded(const TuringMachine& tm, const std::string& input, std::uint64_t budget);

// An in-flight bounded run that can be extended with a larger budget later
// without repeating earlier steps.  Verdicts are identical to a fresh
// run_bounded at the larger budget.
struct ResumableRun {
  TapeConfiguration cfg;
  std::uint64_t steps = 0;
  bool halted = false;
};

ResumableRun start_run(const TuringMachine& tm, const std::string& input);
void advance_run(const TuringMachine& tm, ResumableRun& run, std::uint64_t budget);

// T[x] (action tuples) and its read projection T{x}.
struct TapeBehavior {
  std::string scanned;               // T{x}
  std::vector<ActionTuple> actions;  // T[x]
};

std::optional<TapeBehavior> tape_behavior(const TuringMachine& tm, const std::string& input,
                                          std::uint64_t budget);

// Number of canonical machines with exactly `num_states` states over a
// tape alphabet of the given size; saturates at uint64 max.  Groups start
// at two states: one working state plus the halt state.
std::uint64_t machines_with_state_count(int num_states, int gamma_size);

// Bijective enumeration of all canonical machines over a fixed alphabet,
// grouped by ascending state count; index is 1-based.
TuringMachine enumerate_machine(std::uint64_t index, const TapeAlphabet& alphabet);

std::string serialize(const TuringMachine& tm);
TuringMachine parse_machine(const std::string& text);

}  // namespace limitlab
