#include "pds/eval.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "pds/errors.h"

namespace pds {
namespace {

using nlohmann::json;

json rate_json(const Rate &r) {
  return json{{"numerator", r.numerator}, {"denominator", r.denominator}, {"percent", r.percent()}};
}

}  // namespace

double Rate::value() const {
  return defined() ? static_cast<double>(numerator) / static_cast<double>(denominator) : 0.0;
}

std::int64_t Rate::basis_points() const { return defined() ? numerator * 10000 / denominator : 0; }

std::string Rate::percent() const {
  if (!defined()) return "undefined";
  std::int64_t bp = basis_points();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld.%02lld%%", static_cast<long long>(bp / 100), static_cast<long long>(bp % 100));
  return buf;
}

Metrics metrics(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  if (tp < 0 || fp < 0 || fn < 0) throw ValidationError("metric counts must be non-negative");
  return Metrics{Rate{tp, tp + fp}, Rate{tp, tp + fn}};
}

bool EvalReport::operator==(const EvalReport &o) const {
  auto same = [](const Rate &a, const Rate &b) { return a.numerator == b.numerator && a.denominator == b.denominator; };
  return tp == o.tp && fp == o.fp && fn == o.fn && suspicious_count == o.suspicious_count &&
         suspicious_phish == o.suspicious_phish && messages == o.messages && findings == o.findings &&
         degraded == o.degraded && same(metrics.precision, o.metrics.precision) &&
         same(metrics.recall, o.metrics.recall);
}

ReplayResult replay(const LabeledTranscript &transcript, Monitor &monitor, const Canonicalizer &canon) {
  std::set<std::pair<std::string, std::int64_t>> present;
  std::map<std::string, std::vector<std::string>> senders;
  for (const auto &m : transcript.messages) {
    present.emplace(m.session_id, m.seq);
    auto &who = senders[m.session_id];
    if (std::find(who.begin(), who.end(), m.sender) == who.end()) who.push_back(m.sender);
  }
  std::map<TruthKey, PhishLabel> truth;
  for (const auto &[key, label] : transcript.ground_truth) {
    const auto &[session, seq, keyword] = key;
    if (!present.contains({session, seq})) {
      throw ValidationError("ground truth names missing message " + session + "#" + std::to_string(seq));
    }
    truth[{session, seq, canon(keyword)}] = label;
  }
  for (const auto &[session, who] : senders) {
    if (who.size() == 2) monitor.set_participants(session, who[0], who[1]);
  }

  ReplayResult out;
  EvalReport &r = out.report;
  std::set<TruthKey> seen;
  for (const auto &m : transcript.messages) {
    auto outcome = monitor.process_message(m);
    ++r.messages;
    if (outcome.result.degraded) ++r.degraded;
    for (const auto &f : outcome.result.findings) {
      ++r.findings;
      TruthKey key{m.session_id, m.seq, f.stem};
      seen.insert(key);
      auto it = truth.find(key);
      bool phish = it != truth.end() && it->second == PhishLabel::kYes;
      switch (f.label) {
        case PhishLabel::kYes:
          ++(phish ? r.tp : r.fp);
          break;
        case PhishLabel::kSpc:
          ++r.suspicious_count;
          if (phish) {
            ++r.suspicious_phish;
            ++r.fn;
          }
          break;
        case PhishLabel::kNo:
          if (phish) ++r.fn;
          break;
      }
    }
    for (auto &a : outcome.alerts) out.alerts.push_back(std::move(a));
    out.results.push_back(std::move(outcome.result));
  }
  // Phish words the pipeline never surfaced as keywords are misses too.
  for (const auto &[key, label] : truth) {
    if (label == PhishLabel::kYes && !seen.contains(key)) ++r.fn;
  }
  r.metrics = metrics(r.tp, r.fp, r.fn);
  return out;
}

std::vector<ChatMessage> parse_transcript(std::istream &in) {
  std::vector<ChatMessage> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string where = "transcript line " + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error &e) {
      throw ValidationError(where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("session_id") || !j["session_id"].is_string() || !j.contains("seq") ||
        !j["seq"].is_number_integer() || !j.contains("sender") || !j["sender"].is_string() ||
        !j.contains("text") || !j["text"].is_string()) {
      throw ValidationError(where + ": needs session_id, seq, sender, text");
    }
    ChatMessage m;
    m.session_id = j["session_id"].get<std::string>();
    m.seq = j["seq"].get<std::int64_t>();
    m.sender = j["sender"].get<std::string>();
    m.text = j["text"].get<std::string>();
    if (j.contains("ts") && j["ts"].is_number_integer()) m.timestamp_ms = j["ts"].get<std::int64_t>();
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<ChatMessage> load_transcript(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_transcript(in);
}

std::map<TruthKey, PhishLabel> parse_ground_truth(const json &doc) {
  if (!doc.is_object()) throw ValidationError("ground truth: expected an object keyed by session");
  std::map<TruthKey, PhishLabel> out;
  for (const auto &[session, seqs] : doc.items()) {
    if (!seqs.is_object()) throw ValidationError("ground truth: session " + session + " must map seq -> keywords");
    for (const auto &[seq_text, words] : seqs.items()) {
      std::int64_t seq = 0;
      try {
        std::size_t used = 0;
        seq = std::stoll(seq_text, &used);
        if (used != seq_text.size()) throw std::invalid_argument(seq_text);
      } catch (const std::exception &) {
        throw ValidationError("ground truth: bad seq '" + seq_text + "' in session " + session);
      }
      if (!words.is_object()) throw ValidationError("ground truth: seq entry must map keyword -> label");
      for (const auto &[keyword, label] : words.items()) {
        auto parsed = label.is_string() ? parse_label(label.get<std::string>()) : std::nullopt;
        if (!parsed) throw ValidationError("ground truth: bad label for '" + keyword + "'");
        out[{session, seq, keyword}] = *parsed;
      }
    }
  }
  return out;
}

std::map<TruthKey, PhishLabel> load_ground_truth(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return parse_ground_truth(json::parse(in));
  } catch (const json::parse_error &e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

json to_json(const EvalReport &r) {
  return json{{"tp", r.tp},
              {"fp", r.fp},
              {"fn", r.fn},
              {"suspicious_count", r.suspicious_count},
              {"suspicious_phish", r.suspicious_phish},
              {"messages", r.messages},
              {"findings", r.findings},
              {"degraded", r.degraded},
              {"precision", rate_json(r.metrics.precision)},
              {"recall", rate_json(r.metrics.recall)}};
}

std::string format_report(const EvalReport &r) {
  std::ostringstream out;
  auto row = [&](const char *name, const std::string &value) {
    out << "  " << name;
    for (std::size_t i = std::string_view(name).size(); i < 18; ++i) out << ' ';
    out << value << '\n';
  };
  auto ratio = [](const Rate &rate) {
    return rate.percent() + "  (" + std::to_string(rate.numerator) + "/" + std::to_string(rate.denominator) + ")";
  };
  out << "replay report\n";
  row("messages", std::to_string(r.messages));
  row("findings", std::to_string(r.findings));
  row("degraded", std::to_string(r.degraded));
  row("true positives", std::to_string(r.tp));
  row("false positives", std::to_string(r.fp));
  row("false negatives", std::to_string(r.fn));
  row("suspicious", std::to_string(r.suspicious_count) + " (" + std::to_string(r.suspicious_phish) + " phish)");
  row("precision", ratio(r.metrics.precision));
  row("recall", ratio(r.metrics.recall));
  return out.str();
}

json to_json(const Alert &a) {
  return json{{"session_id", a.message_ref.session_id},
              {"seq", a.message_ref.seq},
              {"keyword", a.keyword},
              {"label", std::string(to_string(a.label))},
              {"color", std::string(to_string(a.color))},
              {"recipient", a.recipient}};
}

}  // namespace pds
