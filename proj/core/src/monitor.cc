#include "pds/monitor.h"

#include <algorithm>
#include <cctype>
#include <set>

#include "pds/errors.h"

namespace pds {
namespace {

using nlohmann::json;

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

}  // namespace

std::string_view to_string(AlertColor color) {
  switch (color) {
    case AlertColor::kRed:
      return "RED";
    case AlertColor::kOrange:
      return "ORANGE";
    case AlertColor::kBlack:
      return "BLACK";
  }
  return "BLACK";
}

AlertColor color_for(PhishLabel label) {
  switch (label) {
    case PhishLabel::kYes:
      return AlertColor::kRed;
    case PhishLabel::kSpc:
      return AlertColor::kOrange;
    case PhishLabel::kNo:
      return AlertColor::kBlack;
  }
  return AlertColor::kBlack;
}

Alert raise_alert(const MessageRef &ref, const Finding &finding, std::string recipient) {
  if (finding.label == PhishLabel::kNo) {
    throw ContractError("no alert for a NO finding ('" + finding.keyword + "')");
  }
  return Alert{ref, finding.keyword, finding.label, color_for(finding.label), std::move(recipient)};
}

Monitor::Monitor(const Preprocessor &pre, const PosTagger &tagger, Stores &stores, CbaClassifier classifier)
    : pre_(&pre),
      tagger_(&tagger),
      stores_(&stores),
      classifier_(std::move(classifier)),
      extractor_(pre, tagger),
      lexicon_(stores.lexicon()) {}

Monitor::Session &Monitor::session(const std::string &session_id) {
  std::lock_guard lock(sessions_mu_);
  auto &slot = sessions_[session_id];
  if (!slot) slot = std::make_unique<Session>();
  return *slot;
}

void Monitor::set_participants(const std::string &session_id, const std::string &a, const std::string &b) {
  if (session_id.empty() || a.empty() || b.empty() || a == b) {
    throw ValidationError("a session needs two distinct, non-empty participants");
  }
  Session &s = session(session_id);
  std::lock_guard lane(s.lane);
  s.participants = {a, b};
}

std::string Monitor::counterpart(const std::string &session_id, const std::string &sender) const {
  std::lock_guard lock(sessions_mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) return {};
  const auto &p = it->second->participants;
  if (p.size() != 2) return {};
  if (p[0] == sender) return p[1];
  if (p[1] == sender) return p[0];
  return {};
}

std::string Monitor::scope_of(const std::string &session_id) const {
  std::lock_guard lock(sessions_mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end() || it->second->participants.size() != 2) return session_id;
  auto p = it->second->participants;
  std::sort(p.begin(), p.end());
  return p[0] + "|" + p[1];
}

std::string Monitor::keyword_domain(std::string_view stem, const DomainResolution &message_domain,
                                    const OntologyLexicon &lexicon) const {
  auto owners = lexicon.domains_of(stem);
  if (owners.size() == 1) return owners.front();
  if (owners.size() > 1 && std::find(owners.begin(), owners.end(), message_domain.domain) != owners.end()) {
    return message_domain.domain;
  }
  return std::string(kNotDefined);
}

Monitor::Outcome Monitor::process_message(const ChatMessage &msg) {
  if (msg.session_id.empty()) throw ValidationError("message has no session id");
  if (msg.sender.empty()) throw ValidationError("message has no sender");
  if (blank(msg.text)) throw ValidationError("message text is empty");
  Session &s = session(msg.session_id);
  std::lock_guard lane(s.lane);
  if (s.last_seq && msg.seq <= *s.last_seq) {
    throw ValidationError("seq " + std::to_string(msg.seq) + " does not follow " + std::to_string(*s.last_seq) +
                          " in session " + msg.session_id);
  }
  s.last_seq = msg.seq;
  if (s.participants.size() < 2 &&
      std::find(s.participants.begin(), s.participants.end(), msg.sender) == s.participants.end()) {
    s.participants.push_back(msg.sender);
  }
  return run(msg, s);
}

Monitor::Outcome Monitor::run(const ChatMessage &msg, Session &s) {
  Outcome out;
  DetectionResult &res = out.result;
  res.message_ref = ref_of(msg);
  res.relay_text = msg.text;
  try {
    stores_->append(StoreKind::kMdb, json{{"session_id", msg.session_id},
                                          {"seq", msg.seq},
                                          {"sender", msg.sender},
                                          {"text", msg.text},
                                          {"ts", msg.timestamp_ms}});

    std::vector<Keyword> keywords;
    std::set<std::string> seen;
    for (auto &k : pre_->extract_keywords(msg)) {
      if (seen.insert(k.stem).second) keywords.push_back(std::move(k));
    }

    MessageAnalysis analysis = extractor_.analyze(msg.text);
    for (const auto &c : analysis.concepts) s.window.add_concept(c);
    TripletSet view;
    view.occurrence_counts = s.window.occurrence_counts;
    view.subject_list = analysis.subjects;
    view.predicate_list = analysis.predicates;
    view.object_list = analysis.objects;
    res.theme = theme_concept(view);

    auto lex = lexicon_.snapshot();
    DomainResolution resolution = identify_domain(res.theme, *lex, analysis.vocabulary());
    res.message_domain = resolution.domain;

    if (resolution.rule == DomainRule::kImplicit && !harmful_domains().contains(resolution.domain)) {
      std::set<std::string> terms;
      for (const auto &p : analysis.predicates) {
        auto it = analysis.surfaces.find(p);
        if (it != analysis.surfaces.end() && !pre_->is_stop_word(it->second)) terms.insert(p);
      }
      if (res.theme) terms.insert(*res.theme);
      if (!terms.empty()) {
        res.learned_terms = lexicon_.learn(resolution.domain, terms);
        for (const auto &t : res.learned_terms) {
          stores_->append(StoreKind::kOdb, json{{"domain", resolution.domain}, {"term", t}});
        }
        lex = lexicon_.snapshot();
      }
    }

    const std::string scope = scope_of(msg.session_id);
    const std::string recipient = counterpart(msg.session_id, msg.sender);
    for (const auto &k : keywords) {
      Finding f;
      f.keyword = k.surface;
      f.stem = k.stem;
      f.domain = keyword_domain(k.stem, resolution, *lex);
      f.context = identify_context(f.domain);
      f.threshold = stores_->bump_threshold(scope, k.stem);
      stores_->append(StoreKind::kFwdb, json{{"session_id", msg.session_id},
                                             {"seq", msg.seq},
                                             {"sender", msg.sender},
                                             {"keyword", f.keyword},
                                             {"stem", f.stem},
                                             {"domain", f.domain},
                                             {"context", std::string(to_string(f.context))},
                                             {"threshold", f.threshold},
                                             {"scope", scope}});
      Classification c = classifier_.classify({f.stem, f.domain, f.context, f.threshold});
      f.label = c.label;
      f.rule_id = c.rule_id;
      if (f.label == PhishLabel::kYes) {
        stores_->append(StoreKind::kPwdb, json{{"stem", f.stem},
                                               {"keyword", f.keyword},
                                               {"domain", f.domain},
                                               {"session_id", msg.session_id},
                                               {"seq", msg.seq},
                                               {"sender", msg.sender}});
      }
      if (f.label != PhishLabel::kNo) out.alerts.push_back(raise_alert(res.message_ref, f, recipient));
      res.findings.push_back(std::move(f));
    }
  } catch (const IoError &) {
    res.degraded = true;
    res.findings.clear();
    res.learned_terms.clear();
    out.alerts.clear();
  }
  return out;
}

}  // namespace pds
