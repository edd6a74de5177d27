#ifndef PDS_MONITOR_H_
#define PDS_MONITOR_H_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pds/cba.h"
#include "pds/chunker.h"
#include "pds/message.h"
#include "pds/obie.h"
#include "pds/preprocess.h"
#include "pds/store.h"

namespace pds {

enum class AlertColor { kRed, kOrange, kBlack };

std::string_view to_string(AlertColor color);

// YES -> RED, SPC -> ORANGE, NO -> BLACK.
AlertColor color_for(PhishLabel label);

struct Finding {
  std::string keyword;  // normalized surface, e.g. "lucky no"
  std::string stem;
  std::string domain;
  Context context = Context::kHarmless;
  int threshold = 1;
  PhishLabel label = PhishLabel::kNo;
  std::optional<int> rule_id;
};

struct DetectionResult {
  MessageRef message_ref;
  std::vector<Finding> findings;
  bool degraded = false;  // a store failed; findings are empty
  std::string relay_text;  // original text, shown unmarked
  std::optional<std::string> theme;
  std::string message_domain{kNotDefined};
  std::vector<std::string> learned_terms;
};

struct Alert {
  MessageRef message_ref;
  std::string keyword;
  PhishLabel label = PhishLabel::kYes;
  AlertColor color = AlertColor::kRed;
  std::string recipient;
};

// Builds the alert for a YES or SPC finding. Throws ContractError for NO.
Alert raise_alert(const MessageRef &ref, const Finding &finding, std::string recipient);

// Runs the per-message detection pipeline against the stores:
//   MDB append, preprocessing, triplets/theme/domain/context, lexicon
//   learning for new non-phishing domains, FWDB append with threshold bump,
//   CBA classification, PWDB append + alerts.
// Sessions are independent lanes; messages of one session are serialized.
class Monitor {
 public:
  Monitor(const Preprocessor &pre, const PosTagger &tagger, Stores &stores, CbaClassifier classifier);

  // Declares the two chatters of a session. Alerts go to the counterpart of
  // the sender, and threshold counters are shared by every session of the
  // same pair.
  void set_participants(const std::string &session_id, const std::string &a, const std::string &b);

  struct Outcome {
    DetectionResult result;
    std::vector<Alert> alerts;
  };

  // Throws ValidationError for an empty message or a non-increasing seq.
  // Store failures do not throw: the outcome is marked degraded instead.
  Outcome process_message(const ChatMessage &msg);

  std::shared_ptr<const OntologyLexicon> lexicon() const { return lexicon_.snapshot(); }
  const CbaClassifier &classifier() const { return classifier_; }

  // Counterpart of `sender` in the session, or empty when unknown.
  std::string counterpart(const std::string &session_id, const std::string &sender) const;

 private:
  struct Session {
    std::mutex lane;
    std::vector<std::string> participants;
    std::optional<std::int64_t> last_seq;
    TripletSet window;  // concept counts over the session
  };

  Session &session(const std::string &session_id);
  std::string scope_of(const std::string &session_id) const;
  std::string keyword_domain(std::string_view stem, const DomainResolution &message_domain,
                             const OntologyLexicon &lexicon) const;
  Outcome run(const ChatMessage &msg, Session &session);

  const Preprocessor *pre_;
  const PosTagger *tagger_;
  Stores *stores_;
  CbaClassifier classifier_;
  TripletExtractor extractor_;
  SharedLexicon lexicon_;

  mutable std::mutex sessions_mu_;
  std::map<std::string, std::unique_ptr<Session>, std::less<>> sessions_;
};

}  // namespace pds

#endif  // PDS_MONITOR_H_
