#include "limitlab/machines.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace limitlab {

ParseError::ParseError(int line, int col, const std::string& msg)
    : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(col) +
                         ": " + msg),
      line(line),
      col(col) {}

char to_char(Move m) {
  switch (m) {
    case Move::Left: return 'L';
    case Move::Right: return 'R';
    case Move::Stay: return 'S';
  }
  return '?';
}

std::optional<Move> move_from_char(char c) {
  switch (c) {
    case 'L': return Move::Left;
    case 'R': return Move::Right;
    case 'S': return Move::Stay;
    default: return std::nullopt;
  }
}

static bool printable_symbol(char c) {
  return std::isprint(static_cast<unsigned char>(c)) && !std::isspace(static_cast<unsigned char>(c));
}

TapeAlphabet::TapeAlphabet(std::string gamma, std::string sigma)
    : gamma_(std::move(gamma)), sigma_(std::move(sigma)) {
  if (gamma_.empty()) throw std::invalid_argument("tape alphabet: gamma is empty");
  // sigma may be empty: a machine over {blank} alone accepts only the empty input
  index_.fill(-1);
  for (std::size_t i = 0; i < gamma_.size(); ++i) {
    char c = gamma_[i];
    if (!printable_symbol(c))
      throw std::invalid_argument("tape alphabet: unprintable symbol");
    if (index_[static_cast<unsigned char>(c)] >= 0)
      throw std::invalid_argument(std::string("tape alphabet: duplicate symbol '") + c + "'");
    index_[static_cast<unsigned char>(c)] = static_cast<int>(i);
  }
  for (char c : sigma_) {
    if (!in_gamma(c))
      throw std::invalid_argument(std::string("tape alphabet: sigma symbol '") + c +
                                  "' not in gamma");
    if (c == blank())
      throw std::invalid_argument("tape alphabet: sigma contains the blank");
    if (sigma_member_[static_cast<unsigned char>(c)])
      throw std::invalid_argument(std::string("tape alphabet: duplicate sigma symbol '") + c + "'");
    sigma_member_[static_cast<unsigned char>(c)] = true;
  }
}

TuringMachine::TuringMachine(int num_states, TapeAlphabet alphabet, std::vector<Transition> table)
    : num_states_(num_states), alphabet_(std::move(alphabet)), table_(std::move(table)) {
  if (num_states_ < 1) throw std::invalid_argument("machine: needs at least one state");
  std::size_t want = static_cast<std::size_t>(num_states_ - 1) * alphabet_.size();
  if (table_.size() != want)
    throw std::invalid_argument("machine: table must be total on (Q \\ {halt}) x gamma");
  for (const Transition& t : table_) {
    if (t.next < 0 || t.next >= num_states_)
      throw std::invalid_argument("machine: transition target out of range");
    if (!alphabet_.in_gamma(t.write))
      throw std::invalid_argument("machine: transition writes a symbol outside gamma");
  }
}

const Transition& TuringMachine::transition(int state, char symbol) const {
  int idx = alphabet_.index_of(symbol);
  if (state < 0 || state >= halt_state() || idx < 0)
    throw std::invalid_argument("machine: no transition for that state/symbol");
  return transition_at(state, idx);
}

char Tape::read(std::int64_t pos) const {
  if (pos >= 0) {
    auto i = static_cast<std::size_t>(pos);
    return i < right_.size() ? right_[i] : blank_;
  }
  auto i = static_cast<std::size_t>(-pos) - 1;
  return i < left_.size() ? left_[i] : blank_;
}

void Tape::write(std::int64_t pos, char sym) {
  std::vector<char>* side;
  std::size_t i;
  if (pos >= 0) {
    side = &right_;
    i = static_cast<std::size_t>(pos);
  } else {
    side = &left_;
    i = static_cast<std::size_t>(-pos) - 1;
  }
  if (i >= side->size()) {
    if (sym == blank_) return;  // writing blank beyond the touched region is a no-op
    side->resize(i + 1, blank_);
  }
  (*side)[i] = sym;
}

std::optional<std::pair<std::int64_t, std::int64_t>> Tape::support() const {
  std::int64_t lo = 0, hi = -1;
  bool seen = false;
  for (std::size_t i = 0; i < left_.size(); ++i) {
    if (left_[i] != blank_) {
      std::int64_t pos = -static_cast<std::int64_t>(i) - 1;
      if (!seen || pos < lo) lo = pos;
      if (!seen || pos > hi) hi = pos;
      seen = true;
    }
  }
  for (std::size_t i = 0; i < right_.size(); ++i) {
    if (right_[i] != blank_) {
      std::int64_t pos = static_cast<std::int64_t>(i);
      if (!seen || pos < lo) lo = pos;
      if (!seen || pos > hi) hi = pos;
      seen = true;
    }
  }
  if (!seen) return std::nullopt;
  return std::make_pair(lo, hi);
}

TapeConfiguration initial_configuration(const TuringMachine& tm, const std::string& input) {
  for (char c : input)
    if (!tm.alphabet().in_sigma(c))
      throw std::invalid_argument(std::string("input symbol '") + c + "' not in sigma");
  return TapeConfiguration{Tape(input, tm.alphabet().blank()), 0, tm.start_state()};
}

std::optional<ActionTuple> step(const TuringMachine& tm, TapeConfiguration& cfg) {
  if (cfg.state == tm.halt_state()) return std::nullopt;
  char read = cfg.tape.read(cfg.head);
  const Transition& tr = tm.transition_at(cfg.state, tm.alphabet().index_of(read));
  cfg.tape.write(cfg.head, tr.write);
  switch (tr.move) {
    case Move::Left: --cfg.head; break;
    case Move::Right: ++cfg.head; break;
    case Move::Stay: break;
  }
  cfg.state = tr.next;
  return ActionTuple{read, tr.write, tr.move};
}

std::optional<std::string> extract_output(const Tape& tape, const TapeAlphabet& alphabet) {
  auto sup = tape.support();
  if (!sup) return std::string{};
  auto [lo, hi] = *sup;
  std::string out;
  out.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t p = lo; p <= hi; ++p) {
    char c = tape.read(p);
    if (!alphabet.in_sigma(c)) return std::nullopt;  // gap or non-problem symbol
    out.push_back(c);
  }
  return out;
}

RunOutcome run_bounded(const TuringMachine& tm, const std::string& input, std::uint64_t budget) {
  ResumableRun run = start_run(tm, input);
  advance_run(tm, run, budget);
  if (!run.halted) return RunOutcome{RunOutcome::Status::OutOfBudget, std::nullopt, run.steps};
  return RunOutcome{RunOutcome::Status::Halted, extract_output(run.cfg.tape, tm.alphabet()),
                    run.steps};
}

ResumableRun start_run(const TuringMachine& tm, const std::string& input) {
  ResumableRun run{initial_configuration(tm, input), 0, false};
  run.halted = (run.cfg.state == tm.halt_state());
  return run;
}

void advance_run(const TuringMachine& tm, ResumableRun& run, std::uint64_t budget) {
  while (!run.halted && run.steps < budget) {
    step(tm, run.cfg);
    ++run.steps;
    run.halted = (run.cfg.state == tm.halt_state());
  }
}

std::optional<TapeBehavior> tape_behavior(const TuringMachine& tm, const std::string& input,
                                          std::uint64_t budget) {
  TapeConfiguration cfg = initial_configuration(tm, input);
  TapeBehavior tb;
  std::uint64_t steps = 0;
  while (cfg.state != tm.halt_state()) {
    if (steps == budget) return std::nullopt;
    ActionTuple t = *step(tm, cfg);
    tb.scanned.push_back(t.read);
    tb.actions.push_back(t);
    ++steps;
  }
  return tb;
}

std::uint64_t machines_with_state_count(int num_states, int gamma_size) {
  if (num_states < 2 || gamma_size < 1) return 0;
  unsigned __int128 radix =
      static_cast<unsigned __int128>(3) * gamma_size * num_states;
  unsigned __int128 total = 1;
  long entries = static_cast<long>(num_states - 1) * gamma_size;
  for (long i = 0; i < entries; ++i) {
    total *= radix;
    if (total > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(total);
}

TuringMachine enumerate_machine(std::uint64_t index, const TapeAlphabet& alphabet) {
  if (index == 0) throw std::invalid_argument("enumerate_machine: index is 1-based");
  int g = alphabet.size();
  unsigned __int128 before = 0;
  int k = 2;
  for (;; ++k) {
    std::uint64_t group = machines_with_state_count(k, g);
    if (group == UINT64_MAX || index <= before + group) break;
    before += group;
  }
  std::uint64_t offset = static_cast<std::uint64_t>(index - before - 1);

  // Mixed-radix table: entries ordered by (state, symbol), last entry least
  // significant.  Digit d encodes (next, write, move) with moves L,R,S.
  int entries = (k - 1) * g;
  std::uint64_t radix = static_cast<std::uint64_t>(3) * g * k;
  std::vector<std::uint64_t> digits(static_cast<std::size_t>(entries));
  for (int e = entries - 1; e >= 0; --e) {
    digits[static_cast<std::size_t>(e)] = offset % radix;
    offset /= radix;
  }
  std::vector<Transition> table;
  table.reserve(static_cast<std::size_t>(entries));
  for (std::uint64_t d : digits) {
    Transition t;
    t.next = static_cast<int>(d / (3 * static_cast<std::uint64_t>(g)));
    std::uint64_t rem = d % (3 * static_cast<std::uint64_t>(g));
    t.write = alphabet.gamma()[static_cast<std::size_t>(rem / 3)];
    t.move = static_cast<Move>(rem % 3 == 0 ? Move::Left
                               : rem % 3 == 1 ? Move::Right
                                              : Move::Stay);
    table.push_back(t);
  }
  return TuringMachine(k, alphabet, std::move(table));
}

std::string serialize(const TuringMachine& tm) {
  std::ostringstream out;
  out << "tm states=" << tm.num_states() << " gamma=" << tm.alphabet().gamma()
      << " sigma=" << tm.alphabet().sigma() << "\n";
  for (int q = 0; q < tm.halt_state(); ++q) {
    for (int s = 0; s < tm.alphabet().size(); ++s) {
      const Transition& t = tm.transition_at(q, s);
      out << 'q' << q << ' ' << tm.alphabet().gamma()[static_cast<std::size_t>(s)] << " -> q"
          << t.next << ' ' << t.write << ' ' << to_char(t.move) << "\n";
    }
  }
  return out.str();
}

namespace {

struct LineScanner {
  std::istringstream in;
  int line_no = 0;
  std::string line;

  explicit LineScanner(const std::string& text) : in(text) {}

  bool next() {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  }
};

std::vector<std::pair<std::string, int>> tokenize(const std::string& line) {
  std::vector<std::pair<std::string, int>> tokens;  // (token, 1-based col)
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

// "key=value" with the exact key expected
std::string expect_kv(const std::pair<std::string, int>& tok, const std::string& key, int line) {
  const std::string& s = tok.first;
  if (s.size() < key.size() + 1 || s.compare(0, key.size(), key) != 0 || s[key.size()] != '=')
    throw ParseError(line, tok.second, "expected " + key + "=...");
  return s.substr(key.size() + 1);
}

int parse_state_token(const std::pair<std::string, int>& tok, int line) {
  const std::string& s = tok.first;
  if (s.size() < 2 || s[0] != 'q' ||
      s.find_first_not_of("0123456789", 1) != std::string::npos)
    throw ParseError(line, tok.second, "expected a state like q0");
  return std::stoi(s.substr(1));
}

char parse_symbol_token(const std::pair<std::string, int>& tok, const TapeAlphabet& ab, int line) {
  if (tok.first.size() != 1 || !ab.in_gamma(tok.first[0]))
    throw ParseError(line, tok.second, "expected a gamma symbol, got '" + tok.first + "'");
  return tok.first[0];
}

}  // namespace

TuringMachine parse_machine(const std::string& text) {
  LineScanner sc(text);
  if (!sc.next()) throw ParseError(1, 1, "empty machine description");
  auto header = tokenize(sc.line);
  if (header.empty() || header[0].first != "tm")
    throw ParseError(sc.line_no, header.empty() ? 1 : header[0].second, "expected 'tm' header");
  if (header.size() != 4)
    throw ParseError(sc.line_no, 1, "header needs states=, gamma=, sigma=");
  int n;
  try {
    n = std::stoi(expect_kv(header[1], "states", sc.line_no));
  } catch (const std::logic_error&) {
    throw ParseError(sc.line_no, header[1].second, "bad state count");
  }
  if (n < 1) throw ParseError(sc.line_no, header[1].second, "state count must be positive");
  std::string gamma = expect_kv(header[2], "gamma", sc.line_no);
  std::string sigma = expect_kv(header[3], "sigma", sc.line_no);
  TapeAlphabet alphabet = [&] {
    try {
      return TapeAlphabet(gamma, sigma);
    } catch (const std::invalid_argument& e) {
      throw ParseError(sc.line_no, header[2].second, e.what());
    }
  }();

  int g = alphabet.size();
  std::vector<Transition> table(static_cast<std::size_t>(n - 1) * g);
  std::vector<bool> seen(table.size(), false);

  while (sc.next()) {
    auto toks = tokenize(sc.line);
    if (toks.size() != 6 || toks[2].first != "->")
      throw ParseError(sc.line_no, toks.empty() ? 1 : toks[0].second,
                       "expected 'q<i> <sym> -> q<j> <sym> <L|R|S>'");
    int from = parse_state_token(toks[0], sc.line_no);
    if (from >= n) throw ParseError(sc.line_no, toks[0].second, "state out of range");
    if (from == n - 1)
      throw ParseError(sc.line_no, toks[0].second, "halt state cannot carry transitions");
    char read = parse_symbol_token(toks[1], alphabet, sc.line_no);
    int to = parse_state_token(toks[3], sc.line_no);
    if (to >= n) throw ParseError(sc.line_no, toks[3].second, "state out of range");
    char write = parse_symbol_token(toks[4], alphabet, sc.line_no);
    if (toks[5].first.size() != 1 || !move_from_char(toks[5].first[0]))
      throw ParseError(sc.line_no, toks[5].second, "expected move L, R or S");
    std::size_t slot = static_cast<std::size_t>(from) * g + alphabet.index_of(read);
    if (seen[slot])
      throw ParseError(sc.line_no, toks[0].second, "duplicate transition row");
    seen[slot] = true;
    table[slot] = Transition{to, write, *move_from_char(toks[5].first[0])};
  }

  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      int q = static_cast<int>(i) / g;
      char s = alphabet.gamma()[i % g];
      throw ParseError(sc.line_no + 1, 1,
                       std::string("missing transition for q") + std::to_string(q) + " '" + s +
                           "'");
    }
  }
  return TuringMachine(n, std::move(alphabet), std::move(table));
}

}  // namespace limitlab
