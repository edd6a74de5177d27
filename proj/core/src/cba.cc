#include "pds/cba.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "pds/errors.h"
#include "pds/preprocess.h"

namespace pds {
namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Comma-separated fields; double quotes may wrap a field containing commas.
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

std::string csv_field(const std::string &v) {
  if (v.find_first_of(",\"") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

int parse_threshold(std::string_view text, const std::string &where) {
  int v = 0;
  std::string t = trim(text);
  std::size_t used = 0;
  try {
    v = std::stoi(t, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != t.size() || v < 1 || v > 5) {
    throw ValidationError(where + ": threshold must be an integer in 1..5, got '" + t + "'");
  }
  return v;
}

Context parse_context_or_throw(std::string_view text, const std::string &where) {
  auto c = parse_context(trim(text));
  if (!c) throw ValidationError(where + ": context must be harmful or harmless");
  return *c;
}

std::string required_text(const std::string &v, const std::string &what, const std::string &where) {
  if (v.empty()) throw ValidationError(where + ": empty " + what);
  return v;
}

// Reads a CSV with the given header; calls `row` with the fields and a
// location prefix for messages.
template <typename F>
void read_csv(std::istream &in, const std::vector<std::string> &header, F row) {
  std::string line;
  int lineno = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    std::string where = "line " + std::to_string(lineno);
    if (!seen_header) {
      for (auto &f : fields) f = to_lower(f);
      if (fields != header) throw ValidationError(where + ": unexpected CSV header");
      seen_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      throw ValidationError(where + ": expected " + std::to_string(header.size()) + " fields");
    }
    row(fields, where);
  }
  if (!seen_header) throw ValidationError("CSV has no header");
}

double round4(double v) { return std::round(v * 10000.0) / 10000.0; }

}  // namespace

std::string_view to_string(PhishLabel label) {
  switch (label) {
    case PhishLabel::kYes:
      return "YES";
    case PhishLabel::kNo:
      return "NO";
    case PhishLabel::kSpc:
      return "SPC";
  }
  return "NO";
}

std::optional<PhishLabel> parse_label(std::string_view text) {
  std::string t = to_lower(trim(text));
  if (t == "yes") return PhishLabel::kYes;
  if (t == "no") return PhishLabel::kNo;
  if (t == "spc") return PhishLabel::kSpc;
  return std::nullopt;
}

std::string default_canonical(std::string_view keyword) { return stem_phrase(to_lower(trim(keyword))); }

std::string_view to_string(Attribute attribute) {
  switch (attribute) {
    case Attribute::kKeyword:
      return "keyword";
    case Attribute::kDomain:
      return "domain";
    case Attribute::kContext:
      return "context";
    case Attribute::kThreshold:
      return "threshold";
    case Attribute::kLabel:
      return "label";
  }
  return "keyword";
}

std::string to_string(const Itemset &itemset) {
  std::string out = "{";
  for (std::size_t i = 0; i < itemset.size(); ++i) {
    if (i > 0) out += ", ";
    out += to_string(itemset[i].attribute);
    out += '=';
    out += itemset[i].value;
  }
  return out + "}";
}

Itemset transaction_of(const TrainingRecord &r) {
  Itemset t{{Attribute::kKeyword, r.keyword},
            {Attribute::kDomain, r.domain},
            {Attribute::kContext, std::string(to_string(r.context))},
            {Attribute::kThreshold, std::to_string(r.threshold)},
            {Attribute::kLabel, std::string(to_string(r.label))}};
  std::sort(t.begin(), t.end());
  return t;
}

Itemset items_of(const TestInstance &x) {
  Itemset t{{Attribute::kKeyword, x.keyword},
            {Attribute::kDomain, x.domain},
            {Attribute::kContext, std::string(to_string(x.context))},
            {Attribute::kThreshold, std::to_string(x.threshold)}};
  std::sort(t.begin(), t.end());
  return t;
}

// --- Apriori ------------------------------------------------------------------

FrequentItemsets apriori(std::span<const Itemset> transactions, double min_supp) {
  if (!(min_supp > 0.0 && min_supp <= 1.0)) throw ValidationError("min_supp must be in (0, 1]");
  FrequentItemsets out;
  if (transactions.empty()) return out;

  std::vector<Itemset> txs;
  txs.reserve(transactions.size());
  for (const auto &t : transactions) {
    Itemset s = t;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    txs.push_back(std::move(s));
  }
  const double n = static_cast<double>(txs.size());
  // Smallest count whose ratio reaches min_supp; the epsilon absorbs
  // representation error in products like 0.02 * 50.
  const int min_count = std::max(1, static_cast<int>(std::ceil(min_supp * n - 1e-9)));

  std::map<Item, int> singles;
  for (const auto &t : txs) {
    for (const auto &item : t) ++singles[item];
  }
  std::vector<Itemset> level;
  for (const auto &[item, count] : singles) {
    if (count >= min_count) {
      level.push_back({item});
      out.emplace(Itemset{item}, ItemsetSupport{count, count / n});
    }
  }

  while (!level.empty()) {
    std::set<Itemset> prev(level.begin(), level.end());
    std::vector<Itemset> candidates;
    for (std::size_t i = 0; i < level.size(); ++i) {
      for (std::size_t j = i + 1; j < level.size(); ++j) {
        const Itemset &a = level[i];
        const Itemset &b = level[j];
        if (!std::equal(a.begin(), a.end() - 1, b.begin())) break;  // level is sorted
        Itemset c = a;
        c.push_back(b.back());
        if (c[c.size() - 2].attribute == c.back().attribute) continue;  // one value per attribute
        bool closed = true;
        for (std::size_t drop = 0; drop + 2 < c.size() && closed; ++drop) {
          Itemset sub;
          for (std::size_t k = 0; k < c.size(); ++k) {
            if (k != drop) sub.push_back(c[k]);
          }
          closed = prev.contains(sub);
        }
        if (closed) candidates.push_back(std::move(c));
      }
    }
    std::vector<int> counts(candidates.size(), 0);
    for (const auto &t : txs) {
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (std::includes(t.begin(), t.end(), candidates[i].begin(), candidates[i].end())) ++counts[i];
      }
    }
    level.clear();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (counts[i] >= min_count) {
        out.emplace(candidates[i], ItemsetSupport{counts[i], counts[i] / n});
        level.push_back(std::move(candidates[i]));
      }
    }
    std::sort(level.begin(), level.end());
  }
  return out;
}

FrequentItemsets mine_frequent_itemsets(std::span<const TrainingRecord> records, double min_supp) {
  if (records.empty()) throw ValidationError("training table is empty");
  if (!(min_supp > 0.0 && min_supp <= 1.0)) throw ValidationError("min_supp must be in (0, 1]");
  std::vector<Itemset> txs;
  txs.reserve(records.size());
  for (const auto &r : records) txs.push_back(transaction_of(r));
  return apriori(txs, min_supp);
}

// --- Rules ----------------------------------------------------------------

std::vector<PhishRule> generate_cars(const FrequentItemsets &itemsets, double min_conf, int first_rule_id) {
  if (!(min_conf > 0.0 && min_conf <= 1.0)) throw ValidationError("min_conf must be in (0, 1]");
  std::vector<PhishRule> rules;
  int next_id = first_rule_id;
  for (const auto &[itemset, supp] : itemsets) {
    Itemset antecedent;
    std::optional<PhishLabel> label;
    for (const auto &item : itemset) {
      if (item.attribute == Attribute::kLabel) {
        label = parse_label(item.value);
      } else {
        antecedent.push_back(item);
      }
    }
    if (!label || antecedent.empty() || *label == PhishLabel::kSpc) continue;
    auto ant = itemsets.find(antecedent);
    if (ant == itemsets.end()) continue;  // impossible for a downward-closed input
    double confidence = static_cast<double>(supp.count) / ant->second.count;
    if (confidence + 1e-12 < min_conf) continue;
    rules.push_back({std::move(antecedent), *label, supp.support, confidence, RuleOrigin::kMined, next_id++});
  }
  return rules;
}

bool rule_matches(const PhishRule &rule, const TestInstance &x) {
  for (const auto &item : rule.antecedent) {
    switch (item.attribute) {
      case Attribute::kKeyword:
        if (item.value != x.keyword) return false;
        break;
      case Attribute::kDomain:
        if (item.value != x.domain) return false;
        break;
      case Attribute::kContext:
        if (item.value != to_string(x.context)) return false;
        break;
      case Attribute::kThreshold:
        if (x.threshold < std::stoi(item.value)) return false;
        break;
      case Attribute::kLabel:
        return false;
    }
  }
  return true;
}

bool rule_precedes(const PhishRule &a, const PhishRule &b) {
  bool sa = a.origin == RuleOrigin::kSeeded;
  bool sb = b.origin == RuleOrigin::kSeeded;
  if (sa != sb) return sa;
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.support != b.support) return a.support > b.support;
  if (a.antecedent.size() != b.antecedent.size()) return a.antecedent.size() > b.antecedent.size();
  return a.rule_id < b.rule_id;
}

CbaClassifier::CbaClassifier(std::vector<PhishRule> ordered_rules, CbaOptions options)
    : rules_(std::move(ordered_rules)), options_(options) {
  if (!(options_.min_supp > 0.0 && options_.min_supp <= 1.0)) throw ValidationError("min_supp must be in (0, 1]");
  if (!(options_.min_conf > 0.0 && options_.min_conf <= 1.0)) throw ValidationError("min_conf must be in (0, 1]");
}

Classification CbaClassifier::classify(const TestInstance &x) const {
  Classification c;
  for (const auto &rule : rules_) {
    if (rule_matches(rule, x)) {
      c.base_label = rule.consequent;
      c.rule_id = rule.rule_id;
      break;
    }
  }
  c.label = c.base_label;
  if (c.base_label == PhishLabel::kNo && x.threshold >= options_.spc_threshold) c.label = PhishLabel::kSpc;
  return c;
}

CbaClassifier build_classifier(std::vector<PhishRule> mined, std::vector<PhishRule> seeded, CbaOptions options) {
  std::vector<PhishRule> all = std::move(seeded);
  for (auto &r : all) r.origin = RuleOrigin::kSeeded;
  for (auto &r : mined) all.push_back(std::move(r));
  std::set<int> ids;
  for (const auto &r : all) {
    if (!ids.insert(r.rule_id).second) throw ValidationError("duplicate rule id " + std::to_string(r.rule_id));
  }
  std::sort(all.begin(), all.end(), rule_precedes);
  return CbaClassifier(std::move(all), options);
}

CbaClassifier train_classifier(std::span<const TrainingRecord> records, std::vector<PhishRule> seeded,
                               CbaOptions options) {
  auto itemsets = mine_frequent_itemsets(records, options.min_supp);
  return build_classifier(generate_cars(itemsets, options.min_conf), std::move(seeded), options);
}

// --- File formats -------------------------------------------------------------

std::vector<TrainingRecord> parse_training_csv(std::istream &in, const Canonicalizer &canon) {
  std::vector<TrainingRecord> out;
  read_csv(in, {"keyword", "domain", "context", "threshold", "label"}, [&](const auto &f, const std::string &where) {
    TrainingRecord r;
    r.keyword = required_text(canon(f[0]), "keyword", where);
    r.domain = required_text(canonical_domain(f[1]), "domain", where);
    r.context = parse_context_or_throw(f[2], where);
    r.threshold = parse_threshold(f[3], where);
    auto label = parse_label(f[4]);
    if (!label || *label == PhishLabel::kSpc) throw ValidationError(where + ": label must be yes or no");
    r.label = *label;
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<TrainingRecord> load_training_csv(const std::filesystem::path &path, const Canonicalizer &canon) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_training_csv(in, canon);
}

std::vector<TestInstance> parse_instances_csv(std::istream &in, const Canonicalizer &canon) {
  std::vector<TestInstance> out;
  read_csv(in, {"keyword", "domain", "context", "threshold"}, [&](const auto &f, const std::string &where) {
    TestInstance x;
    x.keyword = required_text(canon(f[0]), "keyword", where);
    x.domain = required_text(canonical_domain(f[1]), "domain", where);
    x.context = parse_context_or_throw(f[2], where);
    x.threshold = parse_threshold(f[3], where);
    out.push_back(std::move(x));
  });
  return out;
}

std::vector<TestInstance> load_instances_csv(const std::filesystem::path &path, const Canonicalizer &canon) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_instances_csv(in, canon);
}

std::string training_csv_header() { return "keyword,domain,context,threshold,label"; }

std::string to_csv_row(const TrainingRecord &r) {
  std::string label = to_lower(to_string(r.label));
  return csv_field(r.keyword) + ',' + csv_field(r.domain) + ',' + std::string(to_string(r.context)) + ',' +
         std::to_string(r.threshold) + ',' + label;
}

std::vector<PhishRule> parse_seeded_rules(const json &doc, const Canonicalizer &canon) {
  if (!doc.is_array()) throw ValidationError("seeded rules: expected a JSON array");
  std::vector<PhishRule> rules;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json &r = doc[i];
    std::string where = "seeded rule #" + std::to_string(i);
    if (!r.is_object() || !r.contains("rule_id") || !r["rule_id"].is_number_integer() ||
        !r.contains("antecedent") || !r["antecedent"].is_object() || !r.contains("consequent") ||
        !r["consequent"].is_string()) {
      throw ValidationError(where + ": needs integer rule_id, object antecedent, string consequent");
    }
    PhishRule rule;
    rule.rule_id = r["rule_id"].get<int>();
    rule.origin = RuleOrigin::kSeeded;
    rule.confidence = 1.0;
    rule.support = 0.0;
    auto label = parse_label(r["consequent"].get<std::string>());
    if (!label || *label == PhishLabel::kSpc) throw ValidationError(where + ": consequent must be YES or NO");
    rule.consequent = *label;
    for (const auto &[key, value] : r["antecedent"].items()) {
      if (key == "keyword" && value.is_string()) {
        rule.antecedent.push_back({Attribute::kKeyword, required_text(canon(value.get<std::string>()), key, where)});
      } else if (key == "domain" && value.is_string()) {
        rule.antecedent.push_back({Attribute::kDomain, canonical_domain(value.get<std::string>())});
      } else if (key == "context" && value.is_string()) {
        rule.antecedent.push_back(
            {Attribute::kContext, std::string(to_string(parse_context_or_throw(value.get<std::string>(), where)))});
      } else if (key == "threshold" && (value.is_number_integer() || value.is_string())) {
        std::string t = value.is_string() ? value.get<std::string>() : std::to_string(value.get<int>());
        rule.antecedent.push_back({Attribute::kThreshold, std::to_string(parse_threshold(t, where))});
      } else {
        throw ValidationError(where + ": bad antecedent field '" + key + "'");
      }
    }
    if (rule.antecedent.empty()) throw ValidationError(where + ": empty antecedent");
    std::sort(rule.antecedent.begin(), rule.antecedent.end());
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::vector<PhishRule> load_seeded_rules(const std::filesystem::path &path, const Canonicalizer &canon) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error &e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return parse_seeded_rules(doc, canon);
}

json to_json(const PhishRule &rule) {
  json ant = json::object();
  for (const auto &item : rule.antecedent) {
    if (item.attribute == Attribute::kThreshold) {
      ant[std::string(to_string(item.attribute))] = std::stoi(item.value);
    } else {
      ant[std::string(to_string(item.attribute))] = item.value;
    }
  }
  return json{{"rule_id", rule.rule_id},
              {"antecedent", ant},
              {"consequent", std::string(to_string(rule.consequent))},
              {"support", round4(rule.support)},
              {"confidence", round4(rule.confidence)},
              {"origin", rule.origin == RuleOrigin::kSeeded ? "seeded" : "mined"}};
}

json rules_to_json(std::span<const PhishRule> rules) {
  json out = json::array();
  for (const auto &r : rules) out.push_back(to_json(r));
  return out;
}

}  // namespace pds
