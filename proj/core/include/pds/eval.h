#ifndef PDS_EVAL_H_
#define PDS_EVAL_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "pds/cba.h"
#include "pds/message.h"
#include "pds/monitor.h"

namespace pds {

// Exact ratio; percent() truncates to two decimals ("94.17%").
struct Rate {
  std::int64_t numerator = 0;
  std::int64_t denominator = 0;

  bool defined() const { return denominator > 0; }
  double value() const;
  // Hundredths of a percent, truncated: 97/103 -> 9417.
  std::int64_t basis_points() const;
  std::string percent() const;  // "undefined" when not defined
};

struct Metrics {
  Rate precision;
  Rate recall;
};

// precision = tp / (tp + fp), recall = tp / (tp + fn). Throws
// ValidationError on negative counts.
Metrics metrics(std::int64_t tp, std::int64_t fp, std::int64_t fn);

// (session_id, seq, keyword) -> expected label
using TruthKey = std::tuple<std::string, std::int64_t, std::string>;

struct LabeledTranscript {
  std::vector<ChatMessage> messages;
  std::map<TruthKey, PhishLabel> ground_truth;
};

struct EvalReport {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t suspicious_count = 0;  // all SPC findings
  std::int64_t suspicious_phish = 0;  // SPC findings whose truth is YES
  std::int64_t messages = 0;
  std::int64_t findings = 0;
  std::int64_t degraded = 0;
  Metrics metrics;

  bool operator==(const EvalReport &other) const;
};

struct ReplayResult {
  EvalReport report;
  std::vector<Alert> alerts;
  std::vector<DetectionResult> results;
};

// Feeds the transcript through `monitor` in order and scores YES findings
// against the ground truth (absent truth counts as not phish). SPC findings
// on phish truth count as false negatives. Throws ValidationError when a
// ground-truth key names no message.
ReplayResult replay(const LabeledTranscript &transcript, Monitor &monitor, const Canonicalizer &canon);

// JSON lines {session_id, seq, sender, text, ts}.
std::vector<ChatMessage> parse_transcript(std::istream &in);
std::vector<ChatMessage> load_transcript(const std::filesystem::path &path);

// {"<session>": {"<seq>": {"<keyword>": "YES"|"NO"|"SPC"}}}
std::map<TruthKey, PhishLabel> parse_ground_truth(const nlohmann::json &doc);
std::map<TruthKey, PhishLabel> load_ground_truth(const std::filesystem::path &path);

nlohmann::json to_json(const EvalReport &report);
std::string format_report(const EvalReport &report);

nlohmann::json to_json(const Alert &alert);

}  // namespace pds

#endif  // PDS_EVAL_H_
