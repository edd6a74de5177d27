// Acceptance gate: one PASS/FAIL line per primary criterion. Exit status is
// the number of failing criteria.
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "mining_oracle.h"
#include "pds/eval.h"
#include "pds/obie.h"
#include "pds/stemmer.h"
#include "test_support.h"

namespace {

using namespace pds;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool ok = true;
  std::vector<std::string> notes;

  void check(bool cond, const std::string &what) {
    if (!cond) {
      ok = false;
      notes.push_back(what);
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::filesystem::path data(const std::string &rel) { return testing::data_dir() / rel; }

Verdict probe_labels() {
  Verdict v;
  auto t0 = Clock::now();
  auto canon = testing::canon();
  auto clf = train_classifier(load_training_csv(data("prdb/prdb.csv"), canon),
                              load_seeded_rules(data("prdb/prdb_rules.json"), canon));
  auto instances = load_instances_csv(data("prdb/probe_instances.csv"), canon);
  std::vector<PhishLabel> got;
  for (const auto &x : instances) got.push_back(clf.classify(x).label);
  double elapsed = seconds_since(t0);

  std::ifstream in(data("prdb/probe_expected.json"));
  auto expected = json::parse(in);
  int match = 0;
  for (std::size_t i = 0; i < expected.size() && i < got.size(); ++i) {
    if (to_string(got[i]) == expected[i].get<std::string>()) {
      ++match;
    } else {
      v.check(false, instances[i].keyword + ": got " + std::string(to_string(got[i])));
    }
  }
  v.check(expected.size() == 12 && got.size() == 12, "expected 12 instances");
  v.check(elapsed < 1.0, "runtime " + std::to_string(elapsed) + " s");
  v.notes.insert(v.notes.begin(), std::to_string(match) + "/12 labels, " + std::to_string(elapsed) + " s");
  return v;
}

Verdict desk_replay() {
  Verdict v;
  testing::TempDir dir;
  auto pipe = Pipeline::open(testing::data_dir(), dir.path());
  LabeledTranscript t{load_transcript(data("corpus/desk_transcript.jsonl")),
                      load_ground_truth(data("corpus/desk_truth.json"))};
  auto r = replay(t, pipe->monitor(), testing::canon());
  std::ifstream in(data("corpus/desk_expected_alerts.json"));
  auto expected = json::parse(in)["alerts"];
  using Key = std::tuple<std::string, std::int64_t, std::string, std::string, std::string>;
  std::set<Key> want, got;
  for (const auto &a : expected) want.emplace(a["session_id"], a["seq"], a["keyword"], a["color"], a["recipient"]);
  for (const auto &a : r.alerts) {
    got.emplace(a.message_ref.session_id, a.message_ref.seq, a.keyword, std::string(to_string(a.color)),
                a.recipient);
  }
  for (const auto &k : want) v.check(got.contains(k), "missing alert " + std::get<2>(k));
  for (const auto &k : got) v.check(want.contains(k), "unexpected alert " + std::get<2>(k));
  for (const auto &a : r.alerts) {
    for (const char *quiet : {"pizza", "school", "kill", "name"}) {
      v.check(a.keyword != quiet, std::string("alert on ") + quiet);
    }
  }
  v.notes.insert(v.notes.begin(), std::to_string(got.size()) + " alerts vs " + std::to_string(want.size()) +
                                      " expected");
  return v;
}

Verdict metrics_arithmetic() {
  Verdict v;
  auto m = metrics(97, 6, 4);
  v.check(std::fabs(m.precision.value() * 100.0 - 94.17) <= 0.01, "precision " + m.precision.percent());
  v.check(std::fabs(m.recall.value() * 100.0 - 96.03) <= 0.01, "recall " + m.recall.percent());
  v.check(m.precision.percent() == "94.17%" && m.recall.percent() == "96.03%", "formatting");
  v.notes.insert(v.notes.begin(), "precision " + m.precision.percent() + ", recall " + m.recall.percent());
  return v;
}

Verdict miner_oracle() {
  Verdict v;
  auto t0 = Clock::now();
  auto records = load_training_csv(data("prdb/prdb.csv"), testing::canon());
  std::vector<Itemset> txs;
  for (const auto &r : records) txs.push_back(transaction_of(r));
  auto mined = mine_frequent_itemsets(records, 0.02);
  auto oracle = testing::brute_force_itemsets(txs, 0.02);
  v.check(records.size() == 13, "table has " + std::to_string(records.size()) + " rows");
  v.check(mined == oracle, "itemsets differ from exhaustive enumeration");
  auto cars = generate_cars(mined, 0.6);
  for (const auto &c : cars) {
    int both = testing::recount(txs, testing::with_label(c.antecedent, c.consequent));
    int ant = testing::recount(txs, c.antecedent);
    v.check(std::fabs(c.support - both / static_cast<double>(txs.size())) < 1e-12, "support of " +
                                                                                          std::to_string(c.rule_id));
    v.check(ant > 0 && std::fabs(c.confidence - static_cast<double>(both) / ant) < 1e-12,
            "confidence of " + std::to_string(c.rule_id));
  }
  double elapsed = seconds_since(t0);
  v.check(elapsed < 5.0, "runtime " + std::to_string(elapsed) + " s");
  v.notes.insert(v.notes.begin(), std::to_string(mined.size()) + " itemsets, " + std::to_string(cars.size()) +
                                      " rules recounted, " + std::to_string(elapsed) + " s");
  return v;
}

Verdict triplet_oracle() {
  Verdict v;
  const auto &res = testing::resources();
  TripletExtractor ex(res.pre, res.tagger);
  auto lex = OntologyLexicon::load(data("odb"));

  auto tree = ex.parse_clause("Novotel is located in Hyderabad");
  v.check(extract_subject(tree) == "novotel", "subject of the Novotel sentence");
  v.check(extract_predicate(tree) == "located", "predicate of the Novotel sentence");
  v.check(extract_object(tree) == "hyderabad", "object of the Novotel sentence");

  auto theme_of = [&](const std::string &text, MessageAnalysis &a) {
    a = ex.analyze(text);
    TripletSet t;
    for (const auto &c : a.concepts) t.add_concept(c);
    t.subject_list = a.subjects;
    return theme_concept(t);
  };

  MessageAnalysis hotel;
  auto hotel_theme = theme_of(
      "Hotel Taj Banjara at Banjara Hills offers excellent facilities and accommodation. "
      "Comprising of 4 blocks and 68 deluxe rooms, Taj Banjara offers a pleasant stay.",
      hotel);
  v.check(hotel_theme == "taj banjara", "hotel passage theme");
  v.check(identify_domain(hotel_theme, lex, hotel.vocabulary()).domain == "hotel", "hotel passage domain");

  MessageAnalysis choc;
  auto choc_theme =
      theme_of("Joe is so fond of chocolates. He would kill anybody for a bar of chocolate.", choc);
  v.check(choc_theme == stem("chocolate"),
          "chocolate passage theme: got " + choc_theme.value_or("<none>") + " (subjects: " +
              [&] {
                std::string s;
                for (const auto &x : choc.subjects) s += (s.empty() ? "" : ",") + x;
                return s;
              }() +
              ")");
  auto choc_domain = identify_domain(choc_theme, lex, choc.vocabulary());
  v.check(choc_domain.domain == "eatables", "chocolate passage domain: got " + choc_domain.domain);
  v.check(choc_domain.rule == DomainRule::kImplicit, "chocolate passage domain rule is not implicit");
  v.check(identify_context(choc_domain.domain) == Context::kHarmless, "chocolate passage context");
  bool has_kill = std::find(choc.predicates.begin(), choc.predicates.end(), "kill") != choc.predicates.end();
  v.check(has_kill, "predicate kill not extracted");
  return v;
}

// Compact re-runs of each law; the unit suites hold the full versions.
Verdict property_suites() {
  Verdict v;
  std::mt19937 rng(7);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyzeeeiiossy";
  std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(1, 14);
  int stem_bad = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string w;
    for (int k = len(rng); k > 0; --k) w += alphabet[ch(rng)];
    auto s = stem(w);
    if (stem(s) != s) ++stem_bad;
  }
  v.check(stem_bad == 0, "stemmer idempotence: " + std::to_string(stem_bad) + " of 10000");

  const auto &pre = testing::resources().pre;
  const std::vector<std::string> words = {"what", "is", "ur", "the", "lucky", "no", "a", "pizza", "of", "bank",
                                          "card", "my", "favorite", "teacher", "hotel", "and", "kill", "u"};
  std::uniform_int_distribution<std::size_t> wp(0, words.size() - 1);
  int subseq_bad = 0;
  for (int i = 0; i < 2000; ++i) {
    std::string text;
    for (int k = len(rng); k > 0; --k) text += words[wp(rng)] + " ";
    auto toks = pre.tokenize(text);
    auto kept = pre.remove_stop_words(toks);
    std::size_t j = 0;
    for (const auto &t : toks) {
      if (j < kept.size() && kept[j].position == t.position && kept[j].surface == t.surface) ++j;
      else if (!pre.is_stop_word(t.surface)) ++subseq_bad;
    }
    for (const auto &k : kept) subseq_bad += pre.is_stop_word(k.surface) ? 1 : 0;
    if (j != kept.size()) ++subseq_bad;
  }
  v.check(subseq_bad == 0, "stop-word subsequence law");

  int theme_bad = 0;
  const std::vector<std::string> pool = {"a", "b", "c", "d"};
  std::uniform_int_distribution<std::size_t> pp(0, pool.size() - 1);
  std::uniform_int_distribution<int> cnt(1, 3);
  for (int i = 0; i < 3000; ++i) {
    TripletSet t;
    for (int k = cnt(rng) + 1; k > 0; --k) t.add_concept(pool[pp(rng)], cnt(rng));
    for (int k = cnt(rng); k > 0; --k) t.subject_list.push_back(pool[pp(rng)]);
    auto th = theme_concept(t);
    auto top = t.max_occur_concepts();
    std::optional<std::string> want;
    for (const auto &s : t.subject_list) {
      if (top.contains(s)) {
        want = s;
        break;
      }
    }
    if (th != want) ++theme_bad;
  }
  v.check(theme_bad == 0, "theme-concept intersection law");

  auto canon = testing::canon();
  auto clf = train_classifier(load_training_csv(data("prdb/prdb.csv"), canon),
                              load_seeded_rules(data("prdb/prdb_rules.json"), canon));
  int gate_bad = 0;
  std::uniform_int_distribution<int> thr(1, 5);
  std::uniform_int_distribution<std::size_t> dom(0, prdb_domains().size() - 1);
  for (int i = 0; i < 3000; ++i) {
    TestInstance x{canon(words[wp(rng)]), prdb_domains()[dom(rng)],
                   thr(rng) % 2 ? Context::kHarmful : Context::kHarmless, thr(rng)};
    auto c = clf.classify(x);
    bool closed = c.label == PhishLabel::kYes || c.label == PhishLabel::kNo || c.label == PhishLabel::kSpc;
    bool gate = (c.label == PhishLabel::kSpc) == (c.base_label == PhishLabel::kNo && x.threshold >= 3);
    if (!closed || !gate) ++gate_bad;
  }
  v.check(gate_bad == 0, "classifier label closure and SPC gate");

  {
    testing::TempDir dir;
    std::vector<json> written;
    bool durable = true;
    for (int round = 0; round < 5 && durable; ++round) {
      auto s = Stores::open(dir.path());
      auto rows = s->scan(StoreKind::kMdb);
      durable = rows.size() == written.size();
      for (std::size_t i = 0; durable && i < rows.size(); ++i) durable = rows[i].payload == written[i];
      for (int k = 0; k < 10; ++k) {
        written.push_back(json{{"session_id", "p"}, {"seq", written.size()}, {"sender", "a"},
                               {"text", std::to_string(rng())}});
        s->append(StoreKind::kMdb, written.back());
      }
    }
    v.check(durable, "store append-only durability across restart");
  }

  std::set<AlertColor> colors;
  for (auto l : {PhishLabel::kYes, PhishLabel::kNo, PhishLabel::kSpc}) colors.insert(color_for(l));
  v.check(colors.size() == 3 && color_for(PhishLabel::kYes) == AlertColor::kRed &&
              color_for(PhishLabel::kSpc) == AlertColor::kOrange && color_for(PhishLabel::kNo) == AlertColor::kBlack,
          "alert color bijection");
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, Verdict (*)()>> criteria = {
      {"rule-output oracle (probe instance labels)", probe_labels},
      {"transcript replay alert set", desk_replay},
      {"metrics arithmetic", metrics_arithmetic},
      {"miner oracle equivalence", miner_oracle},
      {"triplet oracle", triplet_oracle},
      {"property suites", property_suites},
  };
  int failed = 0;
  for (const auto &[name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception &e) {
      v.check(false, std::string("threw: ") + e.what());
    }
    std::cout << (v.ok ? "PASS " : "FAIL ") << name;
    if (!v.notes.empty()) {
      std::cout << "  [";
      for (std::size_t i = 0; i < v.notes.size(); ++i) std::cout << (i ? "; " : "") << v.notes[i];
      std::cout << "]";
    }
    std::cout << "\n";
    failed += v.ok ? 0 : 1;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria pass\n";
  return failed;
}
