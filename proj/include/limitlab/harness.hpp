#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "limitlab/constructions.hpp"

namespace limitlab {

std::uint64_t fnv1a64(const std::string& s);

enum class LearnerKind { EnumIoo, EnumTbo, EnumRational, Msm };

const char* learner_kind_name(LearnerKind k);

// One learning episode: a teacher serving one source, one learner, a finite
// horizon.  The starting example budget doubles every time an input is
// blocked (non-halting within the current budget).
struct EpisodeConfig {
  std::variant<TuringMachine, Transducer> ground_truth;
  Channel channel;  // ignored by the rational learner
  InputSource source;
  OrderingStrategy ordering;
  LearnerKind learner = LearnerKind::EnumIoo;
  EnumTmLearnerConfig enum_config;  // enum learners only
  int horizon = 100;
  std::uint64_t budget0 = 1000;
  std::size_t verify_depth = 4;
  std::uint64_t verify_budget = 100000;
  std::uint64_t seed = 0;
};

struct VerifyResult {
  enum class Verdict { Agree, Disagree, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  std::optional<std::string> witness;            // least disagreeing input
  std::vector<std::string> inconclusive_inputs;  // budget ran out on these
};

const char* verdict_name(VerifyResult::Verdict v);

// Agree iff outputs match on every source member up to the depth where both
// halt within budget.  A definite mismatch anywhere beats Inconclusive.
VerifyResult verify_hypothesis(const TuringMachine& hypothesis, const TuringMachine& truth,
                               const InputSource& source, std::size_t depth,
                               std::uint64_t budget);
// Transducer agreement is judged on per-step output strings.
VerifyResult verify_hypothesis(const Transducer& hypothesis, const Transducer& truth,
                               const InputSource& source, std::size_t depth);
// A merged policy played back as a tape machine against the truth.
VerifyResult verify_hypothesis(const PartialTransducer& policy, const WriteMoveCoder& coder,
                               const TuringMachine& truth, const InputSource& source,
                               std::size_t depth, std::uint64_t budget);

struct StepRecord {
  int t = 0;
  std::string x;
  bool served = true;  // false = blocked, budget doubled instead
  std::uint64_t hyp_index = 0;
  std::uint64_t hyp_hash = 0;  // 0 = no hypothesis yet
  bool validated = false;
};

struct EpisodeReport {
  std::vector<StepRecord> steps;
  std::vector<std::pair<int, std::string>> blocked;
  // least t with a stable hypothesis hash through the horizon, t < horizon;
  // witnessed within the horizon, never proven
  std::optional<int> convergence_step;
  VerifyResult verification;
  std::size_t samples = 0;  // served steps
  std::uint64_t mass = 0;   // of the distinct examples seen
  std::uint64_t final_index = 0;
  std::uint64_t final_hash = 0;
  double wall_ms = 0.0;
};

EpisodeReport run_episode(const EpisodeConfig& cfg);

// Line-oriented key=value episode configs.  `truth` names a machine file,
// resolved against base_dir.
EpisodeConfig parse_episode_config(const std::string& text, const std::string& base_dir);

// CSV with header config_id,seed,ordering,channel,converged_at,verified,
// samples,mass,wall_ms; one row per job, sorted by config_id.  Episodes run
// in parallel.
std::string sweep_csv(const std::vector<std::pair<std::string, EpisodeConfig>>& jobs);

const char* ordering_name(const OrderingStrategy& s);
const char* channel_name(const Channel& c);

}  // namespace limitlab
