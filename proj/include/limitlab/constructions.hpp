#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "limitlab/learners.hpp"

namespace limitlab {

// Expands every stay-move through an auxiliary bounce state (write, step
// right, step back left).  Machines already free of stay-moves come back
// unchanged.  Same function; step count at most doubles.
TuringMachine remove_stay_moves(const TuringMachine& tm);

// A machine whose every transition has been split in two: write a fresh
// marker symbol in place, then perform the original write and move from a
// dummy state.  Same function, exactly twice the steps on halting inputs.
struct DoubledMachine {
  TuringMachine original;
  TuringMachine doubled;
  struct Entry {
    int dummy_state;
    char fresh_symbol;
  };
  // keyed by (state, read symbol) of the original transition
  std::map<std::pair<int, char>, Entry> transition_index;
};

// Requires a stay-free machine (see remove_stay_moves).
DoubledMachine double_transitions(const TuringMachine& tm);

// Two machines that consume their input as a clock while simulating a fixed
// subject run in a separate tape region.  If the subject halts within |x|
// steps the yes-machine outputs 1 and the no-machine outputs 0; otherwise
// both halt with identical tape behavior.
struct HaltingGadgetPair {
  TuringMachine yes_machine;
  TuringMachine no_machine;
  TuringMachine subject;
  std::string subject_input;
};

HaltingGadgetPair halting_gadgets(const TuringMachine& subject, const std::string& w);

// Brute-force search for a smallest input set whose examples pin the
// enumeration learner onto the target function, stably under supersets.
struct CharsetRequest {
  TuringMachine tm;
  InputSource source;            // must be finite
  Channel channel;               // ioo or tbo
  EnumTmLearnerConfig learner;
  std::size_t max_subset_size = 3;
  std::size_t verify_depth = 4;  // agreement checked on inputs up to this length
  std::uint64_t example_budget = 100000;
  std::uint64_t verify_budget = 100000;
  std::size_t exhaustive_cap = 12;  // served size above this switches to sampling
  std::size_t sample_count = 64;    // sampled supersets per candidate
  std::uint64_t seed = 1;
};

struct CharsetResult {
  bool found = false;               // false = not found within bounds
  std::vector<std::string> inputs;  // length-lex order
  std::size_t size = 0;
  std::uint64_t mass = 0;
  bool exhaustive = true;           // verification regime actually used
  std::size_t supersets_checked = 0;
  std::size_t served = 0;           // source members that produced examples
};

CharsetResult characteristic_set_search(const CharsetRequest& req);

// Re-checks one subset under the same regime the search would use.  Inputs
// must be served source members.
bool charset_qualifies(const CharsetRequest& req, const std::vector<std::string>& subset);

// First input (canonical order) whose example differs between the two
// machines: different halting status, output, or payload.
std::optional<std::string> distinguishing_input(const TuringMachine& a, const TuringMachine& b,
                                                const std::vector<std::string>& inputs,
                                                const Channel& channel, std::uint64_t budget);

}  // namespace limitlab
