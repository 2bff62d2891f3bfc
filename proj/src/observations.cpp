#include "limitlab/observations.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace limitlab {

namespace {

using ojson = nlohmann::ordered_json;

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void check_sigma(const std::string& sigma) {
  std::set<char> seen;
  if (sigma.empty()) throw std::invalid_argument("input source: sigma is empty");
  for (char c : sigma)
    if (!seen.insert(c).second)
      throw std::invalid_argument("input source: duplicate sigma symbol");
}

bool over_sigma(const std::string& x, const std::string& sigma) {
  return std::all_of(x.begin(), x.end(),
                     [&](char c) { return sigma.find(c) != std::string::npos; });
}

}  // namespace

InputSource InputSource::explicit_set(std::vector<std::string> members, std::string sigma) {
  check_sigma(sigma);
  for (const auto& m : members)
    if (!over_sigma(m, sigma))
      throw std::invalid_argument("input source: member '" + m + "' not over sigma");
  std::sort(members.begin(), members.end(), LengthLexLess{});
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.empty()) throw std::invalid_argument("input source: no members");
  InputSource src;
  src.sigma_ = std::move(sigma);
  src.finite_ = true;
  src.members_ = std::move(members);
  return src;
}

InputSource InputSource::length_bounded(std::string sigma, int max_len, int min_len) {
  check_sigma(sigma);
  if (min_len < 0 || max_len < min_len)
    throw std::invalid_argument("input source: bad length bounds");
  std::string order = sigma;
  std::sort(order.begin(), order.end());
  std::vector<std::string> members;
  std::vector<std::string> level{""};
  for (int len = 0; len <= max_len; ++len) {
    if (len >= min_len)
      for (const auto& s : level) members.push_back(s);
    if (len == max_len) break;
    std::vector<std::string> next;
    next.reserve(level.size() * order.size());
    for (const auto& s : level)
      for (char c : order) next.push_back(s + c);
    level = std::move(next);
    if (members.size() + level.size() > 2'000'000)
      throw std::invalid_argument("input source: length-bounded set too large");
  }
  InputSource src;
  src.sigma_ = std::move(sigma);
  src.finite_ = true;
  src.members_ = std::move(members);
  return src;
}

InputSource InputSource::predicate(std::string sigma, std::function<bool(const std::string&)> pred,
                                   std::uint64_t scan_cap) {
  check_sigma(sigma);
  if (!pred) throw std::invalid_argument("input source: null predicate");
  InputSource src;
  src.sigma_ = std::move(sigma);
  src.finite_ = false;
  src.pred_ = std::move(pred);
  src.scan_cap_ = scan_cap;
  src.is_predicate_ = true;
  return src;
}

std::size_t InputSource::size() const {
  if (!finite_) throw std::logic_error("input source: size() of an infinite source");
  return members_.size();
}

bool InputSource::contains(const std::string& x) const {
  if (!over_sigma(x, sigma_)) return false;
  if (is_predicate_) return pred_(x);
  return std::binary_search(members_.begin(), members_.end(), x, LengthLexLess{});
}

std::string InputSource::member(std::size_t idx) const {
  if (!is_predicate_) {
    if (idx >= members_.size()) throw std::out_of_range("input source: member index");
    return members_[idx];
  }
  // length-lex scan of sigma*, filtered by the predicate
  std::string order = sigma_;
  std::sort(order.begin(), order.end());
  std::uint64_t scanned = 0;
  std::size_t hits = 0;
  std::vector<std::string> level{""};
  for (;;) {
    for (const auto& s : level) {
      if (++scanned > scan_cap_)
        throw std::runtime_error("predicate source: scan cap exceeded");
      if (pred_(s)) {
        if (hits == idx) return s;
        ++hits;
      }
    }
    std::vector<std::string> next;
    next.reserve(level.size() * order.size());
    for (const auto& s : level)
      for (char c : order) next.push_back(s + c);
    level = std::move(next);
  }
}

std::vector<std::string> InputSource::members_up_to_length(std::size_t max_len) const {
  std::vector<std::string> out;
  if (!is_predicate_) {
    for (const auto& m : members_)
      if (m.size() <= max_len) out.push_back(m);
    return out;
  }
  std::string order = sigma_;
  std::sort(order.begin(), order.end());
  std::uint64_t scanned = 0;
  std::vector<std::string> level{""};
  for (std::size_t len = 0; len <= max_len; ++len) {
    for (const auto& s : level) {
      if (++scanned > scan_cap_)
        throw std::runtime_error("predicate source: scan cap exceeded");
      if (pred_(s)) out.push_back(s);
    }
    if (len == max_len) break;
    std::vector<std::string> next;
    next.reserve(level.size() * order.size());
    for (const auto& s : level)
      for (char c : order) next.push_back(s + c);
    level = std::move(next);
  }
  return out;
}

std::optional<Example> make_example(const TuringMachine& tm, const std::string& x,
                                    const Channel& channel, std::uint64_t budget) {
  RunOutcome rc = run_bounded(tm, x, budget);
  if (!rc.halted()) return std::nullopt;
  Example ex;
  ex.x = x;
  ex.y = rc.output;
  if (std::holds_alternative<IooChannel>(channel)) {
    ex.payload = IooPayload{};
  } else if (const auto* tbo = std::get_if<TboChannel>(&channel)) {
    if (tbo->scale == 0) throw std::invalid_argument("tbo channel: scale must be positive");
    std::uint64_t bound = (rc.steps + tbo->scale - 1) / tbo->scale;  // steps <= scale * bound
    if (bound == 0) bound = 1;  // zero-step truths still hand over a usable budget
    if (tbo->slack_max > 0) {
      std::mt19937_64 rng(tbo->seed ^ fnv1a64(x));
      bound += rng() % (tbo->slack_max + 1);
    }
    ex.payload = TboPayload{bound};
  } else {
    auto tb = tape_behavior(tm, x, budget);  // halts within budget, so present
    ex.payload = PtoPayload{tb->actions};
  }
  return ex;
}

namespace {

ojson payload_json(const Payload& p) {
  ojson a;
  if (std::holds_alternative<IooPayload>(p)) {
    a["kind"] = "ioo";
  } else if (const auto* tbo = std::get_if<TboPayload>(&p)) {
    a["kind"] = "tbo";
    a["bound"] = tbo->bound;
  } else {
    const auto& trace = std::get<PtoPayload>(p).trace;
    a["kind"] = "pto";
    ojson arr = ojson::array();
    for (const ActionTuple& t : trace)
      arr.push_back({std::string(1, t.read), std::string(1, t.write),
                     std::string(1, to_char(t.move))});
    a["trace"] = std::move(arr);
  }
  return a;
}

void fill_record(ojson& j, const Example& ex) {
  j["x"] = ex.x;
  if (ex.y)
    j["y"] = *ex.y;
  else
    j["y"] = nullptr;
  j["alpha"] = payload_json(ex.payload);
}

}  // namespace

std::string example_record(const Example& ex) {
  ojson j;
  fill_record(j, ex);
  return j.dump();
}

std::string stream_record(std::uint64_t t, const Example& ex) {
  ojson j;
  j["t"] = t;
  fill_record(j, ex);
  return j.dump();
}

Example parse_stream_record(const std::string& line, std::uint64_t* t_out) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("bad observation record: ") + e.what());
  }
  if (!j.is_object() || !j.contains("x") || !j.contains("y") || !j.contains("alpha"))
    throw std::runtime_error("bad observation record: missing fields");
  if (t_out) {
    if (!j.contains("t") || !j["t"].is_number_unsigned())
      throw std::runtime_error("bad observation record: missing t");
    *t_out = j["t"].get<std::uint64_t>();
  }
  Example ex;
  ex.x = j["x"].get<std::string>();
  if (j["y"].is_null())
    ex.y = std::nullopt;
  else
    ex.y = j["y"].get<std::string>();
  const auto& a = j["alpha"];
  std::string kind = a.at("kind").get<std::string>();
  if (kind == "ioo") {
    ex.payload = IooPayload{};
  } else if (kind == "tbo") {
    ex.payload = TboPayload{a.at("bound").get<std::uint64_t>()};
  } else if (kind == "pto") {
    PtoPayload p;
    for (const auto& item : a.at("trace")) {
      if (!item.is_array() || item.size() != 3)
        throw std::runtime_error("bad observation record: malformed trace entry");
      std::string r = item[0].get<std::string>(), w = item[1].get<std::string>(),
                  m = item[2].get<std::string>();
      auto mv = m.size() == 1 ? move_from_char(m[0]) : std::nullopt;
      if (r.size() != 1 || w.size() != 1 || !mv)
        throw std::runtime_error("bad observation record: malformed trace entry");
      p.trace.push_back(ActionTuple{r[0], w[0], *mv});
    }
    ex.payload = std::move(p);
  } else {
    throw std::runtime_error("bad observation record: unknown channel kind");
  }
  return ex;
}

std::uint64_t example_mass(const Example& ex) { return example_record(ex).size(); }

void ExampleSet::insert(const Example& ex) {
  auto it = by_input_.find(ex.x);
  if (it != by_input_.end()) {
    if (!(it->second == ex))
      throw std::invalid_argument("example set: conflicting record for input '" + ex.x + "'");
    return;
  }
  by_input_.emplace(ex.x, ex);
}

const Example* ExampleSet::find(const std::string& x) const {
  auto it = by_input_.find(x);
  return it == by_input_.end() ? nullptr : &it->second;
}

std::uint64_t ExampleSet::mass() const {
  std::uint64_t total = 0;
  for (const auto& [x, ex] : by_input_) total += example_mass(ex);
  return total;
}

std::uint64_t mass(const ExampleSet& es) { return es.mass(); }

Ordering::Ordering(InputSource source, OrderingStrategy strategy)
    : source_(std::move(source)), strategy_(std::move(strategy)) {
  if (std::holds_alternative<SeededShuffleCover>(strategy_) && !source_.finite())
    throw std::invalid_argument("ordering: seeded shuffle needs a finite source");
  if (const auto* script = std::get_if<AdversarialScript>(&strategy_)) {
    if (!source_.finite())
      throw std::invalid_argument("ordering: scripts need a finite source");
    std::size_t n = source_.size();
    for (std::size_t i : script->indices)
      if (i >= n) throw std::invalid_argument("ordering: script index out of range");
    if (script->cycle) {
      if (script->indices.empty())
        throw std::invalid_argument("ordering: empty cycled script");
      std::set<std::size_t> covered(script->indices.begin(), script->indices.end());
      if (covered.size() != n)
        throw std::invalid_argument("ordering: cycled script must cover the source");
    }
  }
}

namespace {

std::vector<std::size_t> epoch_permutation(std::size_t n, std::uint64_t seed,
                                           std::uint64_t epoch) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (epoch + 1)));
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

}  // namespace

std::string Ordering::next_input(std::uint64_t t) const {
  if (t == 0) throw std::invalid_argument("ordering: t is 1-based");
  std::uint64_t pos = t - 1;
  if (std::holds_alternative<RoundRobinByLength>(strategy_)) {
    if (!source_.finite()) return source_.member(pos);
    return source_.member(pos % source_.size());
  }
  if (const auto* sh = std::get_if<SeededShuffleCover>(&strategy_)) {
    std::size_t n = source_.size();
    auto perm = epoch_permutation(n, sh->seed, pos / n);
    return source_.member(perm[pos % n]);
  }
  const auto& script = std::get<AdversarialScript>(strategy_);
  if (pos < script.indices.size()) return source_.member(script.indices[pos]);
  if (script.cycle) return source_.member(script.indices[pos % script.indices.size()]);
  return source_.member((pos - script.indices.size()) % source_.size());
}

}  // namespace limitlab
