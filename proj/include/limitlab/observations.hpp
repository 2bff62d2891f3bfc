#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "limitlab/machines.hpp"

namespace limitlab {

// Canonical string order: by length, then lexicographic.
struct LengthLexLess {
  bool operator()(const std::string& a, const std::string& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

// A set of inputs the teacher may draw from.  Explicit finite sets,
// bounded-length languages, and decidable predicates over sigma* are
// supported; enumeration order is always by length then lexicographic.
class InputSource {
 public:
  InputSource() = default;  // empty finite set
  static InputSource explicit_set(std::vector<std::string> members, std::string sigma);
  static InputSource length_bounded(std::string sigma, int max_len, int min_len = 1);
  static InputSource predicate(std::string sigma, std::function<bool(const std::string&)> pred,
                               std::uint64_t scan_cap = 1'000'000);

  bool finite() const { return finite_; }
  std::size_t size() const;  // finite sources only
  bool contains(const std::string& x) const;
  std::string member(std::size_t idx) const;
  std::vector<std::string> members_up_to_length(std::size_t max_len) const;
  const std::string& sigma() const { return sigma_; }

 private:
  std::string sigma_;
  bool finite_ = true;
  std::vector<std::string> members_;  // explicit / materialized bounded
  std::function<bool(const std::string&)> pred_;
  std::uint64_t scan_cap_ = 0;
  bool is_predicate_ = false;
};

// Observation channels.  IOO carries nothing beyond the pair; TBO carries
// ceil(steps / scale) plus optional seeded slack; PTO carries the whole
// action-tuple trajectory.
struct IooChannel {
  friend bool operator==(const IooChannel&, const IooChannel&) = default;
};
struct TboChannel {
  std::uint64_t scale = 1;
  std::uint64_t slack_max = 0;
  std::uint64_t seed = 0;
  friend bool operator==(const TboChannel&, const TboChannel&) = default;
};
struct PtoChannel {
  friend bool operator==(const PtoChannel&, const PtoChannel&) = default;
};
using Channel = std::variant<IooChannel, TboChannel, PtoChannel>;

struct IooPayload {
  friend bool operator==(const IooPayload&, const IooPayload&) = default;
};
struct TboPayload {
  std::uint64_t bound = 0;
  friend bool operator==(const TboPayload&, const TboPayload&) = default;
};
struct PtoPayload {
  std::vector<ActionTuple> trace;
  friend bool operator==(const PtoPayload&, const PtoPayload&) = default;
};
using Payload = std::variant<IooPayload, TboPayload, PtoPayload>;

struct Example {
  std::string x;
  std::optional<std::string> y;  // nullopt = undefined output
  Payload payload;
  friend bool operator==(const Example&, const Example&) = default;
};

// Pure in (tm, x, channel, budget); nullopt when the machine does not halt
// within the budget.
std::optional<Example> make_example(const TuringMachine& tm, const std::string& x,
                                    const Channel& channel, std::uint64_t budget);

// Record serializations.  The t-free record is the one whose byte length
// defines an example's mass, so mass is invariant under reordering; the
// stream record prefixes the arrival index.
std::string example_record(const Example& ex);
std::string stream_record(std::uint64_t t, const Example& ex);
Example parse_stream_record(const std::string& line, std::uint64_t* t_out = nullptr);
std::uint64_t example_mass(const Example& ex);

// Functional set of examples keyed by input, iterated in canonical order.
class ExampleSet {
 public:
  // re-inserting an input requires an identical record
  void insert(const Example& ex);
  bool contains(const std::string& x) const { return by_input_.count(x) > 0; }
  const Example* find(const std::string& x) const;
  std::size_t size() const { return by_input_.size(); }
  std::uint64_t mass() const;

  auto begin() const { return by_input_.begin(); }
  auto end() const { return by_input_.end(); }

  friend bool operator==(const ExampleSet&, const ExampleSet&) = default;

 private:
  std::map<std::string, Example, LengthLexLess> by_input_;
};

std::uint64_t mass(const ExampleSet& es);

// Ordering strategies; all are total indexed functions of t >= 1 and cover
// the whole source.
struct RoundRobinByLength {
  friend bool operator==(const RoundRobinByLength&, const RoundRobinByLength&) = default;
};
struct SeededShuffleCover {
  std::uint64_t seed = 0;
  friend bool operator==(const SeededShuffleCover&, const SeededShuffleCover&) = default;
};
struct AdversarialScript {
  std::vector<std::size_t> indices;  // into the source's canonical enumeration
  bool cycle = true;                 // false: fall back to round-robin after the script
  friend bool operator==(const AdversarialScript&, const AdversarialScript&) = default;
};
using OrderingStrategy = std::variant<RoundRobinByLength, SeededShuffleCover, AdversarialScript>;

class Ordering {
 public:
  Ordering(InputSource source, OrderingStrategy strategy);

  const InputSource& source() const { return source_; }
  const OrderingStrategy& strategy() const { return strategy_; }
  std::string next_input(std::uint64_t t) const;

 private:
  InputSource source_;
  OrderingStrategy strategy_;
};

}  // namespace limitlab
