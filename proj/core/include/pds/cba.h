#ifndef PDS_CBA_H_
#define PDS_CBA_H_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pds/domain.h"

namespace pds {

enum class PhishLabel { kYes, kNo, kSpc };

std::string_view to_string(PhishLabel label);  // "YES" / "NO" / "SPC"
std::optional<PhishLabel> parse_label(std::string_view text);

// Maps a raw keyword to its match key. The default stems each word.
using Canonicalizer = std::function<std::string(std::string_view)>;
std::string default_canonical(std::string_view keyword);

struct TrainingRecord {
  std::string keyword;  // canonical key
  std::string domain;   // canonical domain name
  Context context = Context::kHarmless;
  int threshold = 1;    // 1..5
  PhishLabel label = PhishLabel::kNo;  // YES or NO
};

struct TestInstance {
  std::string keyword;
  std::string domain;
  Context context = Context::kHarmless;
  int threshold = 1;
};

// --- Items and itemsets -------------------------------------------------------

enum class Attribute : std::uint8_t { kKeyword, kDomain, kContext, kThreshold, kLabel };

std::string_view to_string(Attribute attribute);

struct Item {
  Attribute attribute = Attribute::kKeyword;
  std::string value;

  auto operator<=>(const Item &) const = default;
};

// Sorted, duplicate-free.
using Itemset = std::vector<Item>;

std::string to_string(const Itemset &itemset);  // "{context=harmful, domain=...}"

// keyword, domain, context, threshold and label items of one record.
Itemset transaction_of(const TrainingRecord &record);
Itemset items_of(const TestInstance &instance);

struct ItemsetSupport {
  int count = 0;
  double support = 0.0;  // count / number of transactions

  bool operator==(const ItemsetSupport &) const = default;
};

using FrequentItemsets = std::map<Itemset, ItemsetSupport>;

// Level-wise Apriori over arbitrary transactions. Returns every non-empty
// itemset whose support reaches `min_supp`.
FrequentItemsets apriori(std::span<const Itemset> transactions, double min_supp);

// Apriori over the training table, each record encoded by transaction_of().
// Throws ValidationError for an empty table or min_supp outside (0, 1].
FrequentItemsets mine_frequent_itemsets(std::span<const TrainingRecord> records, double min_supp);

// --- Rules ----------------------------------------------------------------

enum class RuleOrigin { kMined, kSeeded };

struct PhishRule {
  Itemset antecedent;
  PhishLabel consequent = PhishLabel::kNo;
  double support = 0.0;
  double confidence = 0.0;
  RuleOrigin origin = RuleOrigin::kMined;
  int rule_id = 0;
};

// Mined rule ids start here so they never collide with seeded ids.
inline constexpr int kFirstMinedRuleId = 1001;

// One rule per frequent itemset that holds a label item and a non-empty
// remainder, kept when count(itemset) / count(remainder) >= min_conf. Ids are
// assigned in itemset order starting at `first_rule_id`.
std::vector<PhishRule> generate_cars(const FrequentItemsets &itemsets, double min_conf,
                                     int first_rule_id = kFirstMinedRuleId);

// True when every antecedent item holds for the instance. Threshold items
// hold when the instance threshold is >= the rule's value.
bool rule_matches(const PhishRule &rule, const TestInstance &instance);

// Classifier ordering: seeded first, then higher confidence, higher support,
// larger antecedent, lower rule id.
bool rule_precedes(const PhishRule &a, const PhishRule &b);

struct CbaOptions {
  double min_supp = 0.02;
  double min_conf = 0.60;
  int spc_threshold = 3;
};

struct Classification {
  PhishLabel label = PhishLabel::kNo;       // after the SPC post-rule
  PhishLabel base_label = PhishLabel::kNo;  // first matching rule, or default
  std::optional<int> rule_id;
};

class CbaClassifier {
 public:
  CbaClassifier() = default;
  CbaClassifier(std::vector<PhishRule> ordered_rules, CbaOptions options);

  // First matching rule decides YES/NO (default NO). A NO becomes SPC once the
  // instance threshold reaches spc_threshold.
  Classification classify(const TestInstance &instance) const;

  const std::vector<PhishRule> &rules() const { return rules_; }
  const CbaOptions &options() const { return options_; }
  PhishLabel default_label() const { return PhishLabel::kNo; }

 private:
  std::vector<PhishRule> rules_;
  CbaOptions options_;
};

// Sorts seeded + mined into classifier order.
CbaClassifier build_classifier(std::vector<PhishRule> mined, std::vector<PhishRule> seeded,
                               CbaOptions options = {});

// mine -> generate_cars -> build_classifier.
CbaClassifier train_classifier(std::span<const TrainingRecord> records,
                               std::vector<PhishRule> seeded, CbaOptions options = {});

// --- File formats -------------------------------------------------------------

// Header `keyword,domain,context,threshold,label`.
std::vector<TrainingRecord> parse_training_csv(std::istream &in, const Canonicalizer &canon);
std::vector<TrainingRecord> load_training_csv(const std::filesystem::path &path,
                                              const Canonicalizer &canon = default_canonical);

// Header `keyword,domain,context,threshold`.
std::vector<TestInstance> parse_instances_csv(std::istream &in, const Canonicalizer &canon);
std::vector<TestInstance> load_instances_csv(const std::filesystem::path &path,
                                             const Canonicalizer &canon = default_canonical);

std::string training_csv_header();
std::string to_csv_row(const TrainingRecord &record);

// JSON array of {antecedent: {...}, consequent, rule_id}.
std::vector<PhishRule> parse_seeded_rules(const nlohmann::json &doc, const Canonicalizer &canon);
std::vector<PhishRule> load_seeded_rules(const std::filesystem::path &path,
                                         const Canonicalizer &canon = default_canonical);

nlohmann::json to_json(const PhishRule &rule);  // support/confidence at 4 decimals
nlohmann::json rules_to_json(std::span<const PhishRule> rules);

}  // namespace pds

#endif  // PDS_CBA_H_
