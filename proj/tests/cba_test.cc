#include "pds/cba.h"

#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "mining_oracle.h"
#include "pds/errors.h"
#include "test_support.h"

namespace pds {
namespace {

using testing::brute_force_itemsets;
using testing::recount;
using testing::with_label;

std::vector<TrainingRecord> table() { return load_training_csv(testing::data_dir() / "prdb/prdb.csv", testing::canon()); }

std::vector<Itemset> transactions(const std::vector<TrainingRecord> &records) {
  std::vector<Itemset> txs;
  for (const auto &r : records) txs.push_back(transaction_of(r));
  return txs;
}

CbaClassifier shipped_classifier() {
  auto seeded = load_seeded_rules(testing::data_dir() / "prdb/prdb_rules.json", testing::canon());
  return train_classifier(table(), seeded);
}

std::vector<PhishLabel> expected_probe_labels() {
  std::ifstream in(testing::data_dir() / "prdb/probe_expected.json");
  std::vector<PhishLabel> out;
  for (const auto &s : nlohmann::json::parse(in)) out.push_back(*parse_label(s.get<std::string>()));
  return out;
}

TEST(Training, TableLoads) {
  auto records = table();
  ASSERT_EQ(records.size(), 13u);
  EXPECT_EQ(records[0].keyword, "account no");
  EXPECT_EQ(records[0].domain, "financial gain");
  EXPECT_EQ(records[0].threshold, 3);
  EXPECT_EQ(records[0].label, PhishLabel::kYes);
  EXPECT_EQ(records[4].keyword, testing::canon()("kid name"));
  EXPECT_EQ(records[8].domain, "fame and notoriety");
}

TEST(Mining, MatchesBruteForce) {
  auto records = table();
  auto mined = mine_frequent_itemsets(records, 0.02);
  auto oracle = brute_force_itemsets(transactions(records), 0.02);
  EXPECT_EQ(mined, oracle);
  for (const auto &[items, supp] : mined) EXPECT_LE(items.size(), 5u);
}

TEST(Mining, HigherSupportMatchesBruteForce) {
  auto records = table();
  for (double s : {0.1, 0.2, 0.3, 0.5, 0.7, 1.0}) {
    EXPECT_EQ(mine_frequent_itemsets(records, s), brute_force_itemsets(transactions(records), s)) << s;
  }
}

TEST(Mining, RejectsBadInput) {
  EXPECT_THROW(mine_frequent_itemsets({}, 0.02), ValidationError);
  auto records = table();
  EXPECT_THROW(mine_frequent_itemsets(records, 0.0), ValidationError);
  EXPECT_THROW(mine_frequent_itemsets(records, 1.5), ValidationError);
}

TEST(Cars, RecountSupportAndConfidence) {
  auto records = table();
  auto txs = transactions(records);
  auto rules = generate_cars(mine_frequent_itemsets(records, 0.02), 0.6);
  ASSERT_FALSE(rules.empty());
  int expected_id = kFirstMinedRuleId;
  for (const auto &r : rules) {
    EXPECT_EQ(r.rule_id, expected_id++);
    int both = recount(txs, with_label(r.antecedent, r.consequent));
    int ant = recount(txs, r.antecedent);
    EXPECT_NEAR(r.support, both / 13.0, 1e-12);
    EXPECT_NEAR(r.confidence, static_cast<double>(both) / ant, 1e-12);
    EXPECT_GE(r.confidence, 0.6);
  }
}

TEST(Cars, HarmlessContextImpliesNo) {
  auto rules = generate_cars(mine_frequent_itemsets(table(), 0.02), 0.6);
  auto it = std::find_if(rules.begin(), rules.end(), [](const PhishRule &r) {
    return r.antecedent == Itemset{{Attribute::kContext, "harmless"}} && r.consequent == PhishLabel::kNo;
  });
  ASSERT_NE(it, rules.end());
  EXPECT_NEAR(it->confidence, 0.75, 1e-12);
  EXPECT_NEAR(it->support, 6.0 / 13.0, 1e-12);
}

TEST(Cars, EveryQualifyingItemsetBecomesARule) {
  auto records = table();
  auto txs = transactions(records);
  auto itemsets = brute_force_itemsets(txs, 0.02);
  std::size_t expected = 0;
  for (const auto &[items, supp] : itemsets) {
    Itemset ant;
    bool labelled = false;
    for (const auto &i : items) {
      if (i.attribute == Attribute::kLabel) labelled = true;
      else ant.push_back(i);
    }
    if (labelled && !ant.empty() && supp.count >= 0.6 * recount(txs, ant) - 1e-9) ++expected;
  }
  EXPECT_EQ(generate_cars(mine_frequent_itemsets(records, 0.02), 0.6).size(), expected);
}

TEST(Classifier, ProbeInstanceLabels) {
  auto clf = shipped_classifier();
  auto instances = load_instances_csv(testing::data_dir() / "prdb/probe_instances.csv", testing::canon());
  auto expected = expected_probe_labels();
  ASSERT_EQ(instances.size(), 12u);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    EXPECT_EQ(clf.classify(instances[i]).label, expected[i]) << instances[i].keyword;
  }
}

TEST(Classifier, OrderingPutsSeededFirst) {
  auto clf = shipped_classifier();
  const auto &rules = clf.rules();
  for (std::size_t i = 1; i < rules.size(); ++i) {
    EXPECT_FALSE(rule_precedes(rules[i], rules[i - 1])) << i;
  }
  auto first_mined = std::find_if(rules.begin(), rules.end(),
                                  [](const PhishRule &r) { return r.origin == RuleOrigin::kMined; });
  for (auto it = first_mined; it != rules.end(); ++it) EXPECT_EQ(it->origin, RuleOrigin::kMined);
}

TEST(Classifier, PrecedenceTieBreaks) {
  PhishRule a{{{Attribute::kContext, "harmful"}}, PhishLabel::kYes, 0.5, 0.9, RuleOrigin::kMined, 1001};
  PhishRule b = a;
  b.rule_id = 1002;
  EXPECT_TRUE(rule_precedes(a, b));
  b.antecedent.push_back({Attribute::kThreshold, "1"});
  EXPECT_TRUE(rule_precedes(b, a));
  b.support = 0.4;
  EXPECT_TRUE(rule_precedes(a, b));
  b.confidence = 0.95;
  EXPECT_TRUE(rule_precedes(b, a));
  a.origin = RuleOrigin::kSeeded;
  EXPECT_TRUE(rule_precedes(a, b));
}

TEST(Classifier, ThresholdItemsMatchAtOrAbove) {
  PhishRule r{{{Attribute::kThreshold, "3"}}, PhishLabel::kYes, 0, 1, RuleOrigin::kSeeded, 1};
  TestInstance x{"k", "d", Context::kHarmful, 2};
  EXPECT_FALSE(rule_matches(r, x));
  x.threshold = 3;
  EXPECT_TRUE(rule_matches(r, x));
  x.threshold = 5;
  EXPECT_TRUE(rule_matches(r, x));
}

TEST(Classifier, DefaultIsNoAndSpcGate) {
  CbaClassifier empty({}, {});
  TestInstance x{"pizza", "not defined", Context::kHarmless, 1};
  EXPECT_EQ(empty.classify(x).label, PhishLabel::kNo);
  EXPECT_FALSE(empty.classify(x).rule_id.has_value());
  x.threshold = 2;
  EXPECT_EQ(empty.classify(x).label, PhishLabel::kNo);
  x.threshold = 3;
  EXPECT_EQ(empty.classify(x).label, PhishLabel::kSpc);
  EXPECT_EQ(empty.classify(x).base_label, PhishLabel::kNo);
}

TEST(Classifier, DuplicateIdsRejected) {
  PhishRule r{{{Attribute::kContext, "harmful"}}, PhishLabel::kYes, 0, 1, RuleOrigin::kSeeded, 7};
  EXPECT_THROW(build_classifier({r}, {r}), ValidationError);
}

TEST(Csv, QuotedFieldsAndErrors) {
  std::istringstream ok("keyword,domain,context,threshold,label\n\"bank, card\",financial gain,harmful,2,YES\n");
  auto rows = parse_training_csv(ok, default_canonical);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].keyword, default_canonical("bank, card"));

  std::istringstream bad_header("word,domain,context,threshold,label\n");
  EXPECT_THROW(parse_training_csv(bad_header, default_canonical), ValidationError);
  std::istringstream bad_threshold("keyword,domain,context,threshold,label\nx,d,harmful,9,yes\n");
  EXPECT_THROW(parse_training_csv(bad_threshold, default_canonical), ValidationError);
  std::istringstream bad_label("keyword,domain,context,threshold,label\nx,d,harmful,1,SPC\n");
  EXPECT_THROW(parse_training_csv(bad_label, default_canonical), ValidationError);
  std::istringstream bad_context("keyword,domain,context\n");
  EXPECT_THROW(parse_instances_csv(bad_context, default_canonical), ValidationError);
  EXPECT_THROW(load_training_csv("/nonexistent/prdb.csv"), IoError);
}

TEST(Csv, RowRoundTrip) {
  for (const auto &r : table()) {
    std::istringstream in(training_csv_header() + "\n" + to_csv_row(r) + "\n");
    auto back = parse_training_csv(in, [](std::string_view s) { return std::string(s); });
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].keyword, r.keyword);
    EXPECT_EQ(back[0].domain, r.domain);
    EXPECT_EQ(back[0].threshold, r.threshold);
    EXPECT_EQ(back[0].label, r.label);
  }
}

TEST(SeededRules, ParseAndReject) {
  auto rules = load_seeded_rules(testing::data_dir() / "prdb/prdb_rules.json", testing::canon());
  ASSERT_FALSE(rules.empty());
  for (const auto &r : rules) {
    EXPECT_EQ(r.origin, RuleOrigin::kSeeded);
    EXPECT_EQ(r.confidence, 1.0);
    EXPECT_TRUE(std::is_sorted(r.antecedent.begin(), r.antecedent.end()));
  }
  using nlohmann::json;
  EXPECT_THROW(parse_seeded_rules(json::object(), default_canonical), ValidationError);
  EXPECT_THROW(parse_seeded_rules(json::parse(R"([{"rule_id":1,"antecedent":{},"consequent":"YES"}])"),
                                  default_canonical),
               ValidationError);
  EXPECT_THROW(parse_seeded_rules(json::parse(R"([{"rule_id":1,"antecedent":{"keyword":"x"},"consequent":"SPC"}])"),
                                  default_canonical),
               ValidationError);
  EXPECT_THROW(parse_seeded_rules(json::parse(R"([{"rule_id":1,"antecedent":{"colour":"x"},"consequent":"NO"}])"),
                                  default_canonical),
               ValidationError);
}

TEST(SeededRules, JsonCarriesOrigin) {
  PhishRule r{{{Attribute::kContext, "harmless"}}, PhishLabel::kNo, 6.0 / 13.0, 0.75, RuleOrigin::kMined, 1144};
  auto j = to_json(r);
  EXPECT_EQ(j["origin"], "mined");
  EXPECT_EQ(j["rule_id"], 1144);
  EXPECT_DOUBLE_EQ(j["support"].get<double>(), 0.4615);
  EXPECT_EQ(j["consequent"], "NO");
}

TEST(Domains, Canonical) {
  EXPECT_EQ(canonical_domain("acc_creation_tips"), "account creation tips");
  EXPECT_EQ(canonical_domain("fame_noteriety"), "fame and notoriety");
  EXPECT_EQ(canonical_domain("Identity  Access"), "identity access");
  EXPECT_EQ(prdb_domains().size(), 8u);
  EXPECT_EQ(harmful_domains().size(), 7u);
  EXPECT_FALSE(harmful_domains().contains(std::string(kNotDefined)));
}

// --- properties ---------------------------------------------------------------

std::vector<Itemset> random_transactions(std::mt19937 &rng, int n) {
  std::uniform_int_distribution<int> v(0, 3);
  std::vector<Itemset> txs;
  for (int i = 0; i < n; ++i) {
    Itemset t;
    for (Attribute a : {Attribute::kKeyword, Attribute::kDomain, Attribute::kContext, Attribute::kThreshold,
                        Attribute::kLabel}) {
      if (v(rng) != 0) t.push_back({a, std::to_string(v(rng))});
    }
    std::sort(t.begin(), t.end());
    txs.push_back(std::move(t));
  }
  return txs;
}

TEST(CbaProperty, AprioriEqualsBruteForceOnRandomData) {
  std::mt19937 rng(101);
  std::uniform_int_distribution<int> n(1, 40);
  std::uniform_real_distribution<double> supp(0.01, 0.6);
  for (int iter = 0; iter < 150; ++iter) {
    auto txs = random_transactions(rng, n(rng));
    double s = supp(rng);
    ASSERT_EQ(apriori(txs, s), brute_force_itemsets(txs, s)) << iter;
  }
}

TEST(CbaProperty, SupportIsAntiMonotone) {
  std::mt19937 rng(103);
  for (int iter = 0; iter < 50; ++iter) {
    auto found = apriori(random_transactions(rng, 30), 0.05);
    for (const auto &[items, supp] : found) {
      for (std::size_t drop = 0; items.size() > 1 && drop < items.size(); ++drop) {
        Itemset sub = items;
        sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(drop));
        auto it = found.find(sub);
        ASSERT_NE(it, found.end());
        ASSERT_GE(it->second.count, supp.count);
      }
    }
  }
}

TEST(CbaProperty, LabelClosureAndSpcGate) {
  auto clf = shipped_classifier();
  auto records = table();
  std::mt19937 rng(107);
  std::vector<std::string> keywords;
  for (const auto &r : records) keywords.push_back(r.keyword);
  keywords.push_back("pizza");
  std::uniform_int_distribution<std::size_t> k(0, keywords.size() - 1);
  std::uniform_int_distribution<std::size_t> d(0, prdb_domains().size() - 1);
  std::uniform_int_distribution<int> t(1, 5);
  std::uniform_int_distribution<int> c(0, 1);
  for (int iter = 0; iter < 5000; ++iter) {
    TestInstance x{keywords[k(rng)], prdb_domains()[d(rng)], c(rng) ? Context::kHarmful : Context::kHarmless, t(rng)};
    auto out = clf.classify(x);
    ASSERT_TRUE(out.label == PhishLabel::kYes || out.label == PhishLabel::kNo || out.label == PhishLabel::kSpc);
    ASSERT_NE(out.base_label, PhishLabel::kSpc);
    bool gate = out.base_label == PhishLabel::kNo && x.threshold >= 3;
    ASSERT_EQ(out.label == PhishLabel::kSpc, gate);
    if (out.base_label == PhishLabel::kYes) ASSERT_EQ(out.label, PhishLabel::kYes);
    if (out.rule_id) {
      auto rule = std::find_if(clf.rules().begin(), clf.rules().end(),
                               [&](const PhishRule &r) { return r.rule_id == *out.rule_id; });
      ASSERT_TRUE(rule_matches(*rule, x));
      for (auto it = clf.rules().begin(); it != rule; ++it) ASSERT_FALSE(rule_matches(*it, x));
    }
  }
}

}  // namespace
}  // namespace pds
