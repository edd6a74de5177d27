// pdsctl: train, mine, classify, replay and serve from the command line.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pds/cba.h"
#include "pds/errors.h"
#include "pds/eval.h"
#include "pds/net.h"
#include "pds/pipeline.h"
#include "pds/relay.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string data_dir = PDS_DEFAULT_DATA_DIR;
  double min_supp = 0.02;
  double min_conf = 0.60;

  pds::CbaOptions options() const {
    pds::CbaOptions o;
    o.min_supp = min_supp;
    o.min_conf = min_conf;
    return o;
  }
};

// Temporary stores directory removed on scope exit.
class ScratchDir {
 public:
  ScratchDir() {
    std::string tmpl = (fs::temp_directory_path() / "pds-stores-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) throw pds::IoError("cannot create a temporary stores directory");
    path_ = tmpl;
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path &path() const { return path_; }

 private:
  fs::path path_;
};

pds::Canonicalizer canon_of(const pds::Preprocessor &pre) {
  return [&pre](std::string_view k) { return pre.canonical(k); };
}

void add_training_options(CLI::App *cmd, Common &c, std::string &prdb, std::string &rules) {
  cmd->add_option("--prdb", prdb, "training table CSV (keyword,domain,context,threshold,label)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--rules", rules, "seeded rules JSON")->check(CLI::ExistingFile);
  cmd->add_option("--min-supp", c.min_supp, "minimum support fraction")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--min-conf", c.min_conf, "minimum confidence fraction")->check(CLI::Range(0.0, 1.0));
}

pds::CbaClassifier train(const Common &c, const pds::Preprocessor &pre, const std::string &prdb,
                         const std::string &rules) {
  auto canon = canon_of(pre);
  auto records = pds::load_training_csv(prdb, canon);
  std::vector<pds::PhishRule> seeded;
  if (!rules.empty()) seeded = pds::load_seeded_rules(rules, canon);
  return pds::train_classifier(records, std::move(seeded), c.options());
}

std::string default_file(const Common &c, const char *name) {
  return (fs::path(c.data_dir) / "prdb" / name).string();
}

pds::RelayServer *g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

int run(int argc, char **argv) {
  CLI::App app{"Phishing detection for instant messaging: rule mining, replay and relay"};
  app.require_subcommand(1);
  Common c;
  if (const char *env = std::getenv("PDS_DATA_DIR"); env != nullptr && *env != '\0') c.data_dir = env;
  app.add_option("--data-dir", c.data_dir, "directory holding text/, lexicon/, odb/ and prdb/ (env PDS_DATA_DIR)")
      ->check(CLI::ExistingDirectory);

  std::string prdb;
  std::string rules;

  auto *train_cmd = app.add_subcommand("train", "mine rules and print the ordered classifier as JSON");
  add_training_options(train_cmd, c, prdb, rules);
  std::string out_path;
  train_cmd->add_option("--out", out_path, "write the rules JSON here instead of stdout");

  auto *mine_cmd = app.add_subcommand("mine", "print the mined classification rules");
  add_training_options(mine_cmd, c, prdb, rules);
  bool show_itemsets = false;
  mine_cmd->add_flag("--itemsets", show_itemsets, "print the frequent itemsets too");

  auto *classify_cmd = app.add_subcommand("classify", "label test instances");
  add_training_options(classify_cmd, c, prdb, rules);
  std::string instances;
  classify_cmd->add_option("--instances", instances, "CSV keyword,domain,context,threshold")
      ->required()
      ->check(CLI::ExistingFile);
  bool as_json = false;
  classify_cmd->add_flag("--json", as_json, "emit JSON instead of CSV");

  auto *replay_cmd = app.add_subcommand("replay", "replay a labeled transcript and report precision/recall");
  std::string transcript;
  std::string truth;
  std::string stores_dir;
  replay_cmd->add_option("--transcript", transcript, "JSON lines {session_id, seq, sender, text, ts}")
      ->required()
      ->check(CLI::ExistingFile);
  replay_cmd->add_option("--truth", truth, "ground truth JSON")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--stores-dir", stores_dir, "stores directory (default: a fresh temporary one)");
  replay_cmd->add_option("--min-supp", c.min_supp)->check(CLI::Range(0.0, 1.0));
  replay_cmd->add_option("--min-conf", c.min_conf)->check(CLI::Range(0.0, 1.0));

  auto *serve_cmd = app.add_subcommand("serve", "run the relay (raw NDJSON and WebSocket on one port)");
  int port = 7070;
  std::string address = "0.0.0.0";
  serve_cmd->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--address", address, "listen address");
  serve_cmd->add_option("--stores-dir", stores_dir, "stores directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (prdb.empty()) prdb = default_file(c, "prdb.csv");
  if (rules.empty()) rules = default_file(c, "prdb_rules.json");

  if (*train_cmd || *mine_cmd || *classify_cmd) {
    auto pre = pds::Preprocessor::load(fs::path(c.data_dir) / "text");
    if (*mine_cmd) {
      auto records = pds::load_training_csv(prdb, canon_of(pre));
      auto itemsets = pds::mine_frequent_itemsets(records, c.min_supp);
      json out;
      if (show_itemsets) {
        json sets = json::array();
        for (const auto &[items, supp] : itemsets) {
          sets.push_back({{"itemset", pds::to_string(items)}, {"count", supp.count}, {"support", supp.support}});
        }
        out["itemsets"] = sets;
      }
      auto cars = pds::generate_cars(itemsets, c.min_conf);
      out["rules"] = pds::rules_to_json(cars);
      std::cout << out.dump(2) << '\n';
      return 0;
    }
    auto classifier = train(c, pre, prdb, rules);
    if (*train_cmd) {
      std::string doc = pds::rules_to_json(classifier.rules()).dump(2) + "\n";
      if (out_path.empty()) {
        std::cout << doc;
      } else {
        std::ofstream out(out_path);
        out << doc;
        if (!out) throw pds::IoError("cannot write " + out_path);
      }
      return 0;
    }
    auto xs = pds::load_instances_csv(instances, canon_of(pre));
    json rows = json::array();
    if (!as_json) std::cout << "keyword,domain,context,threshold,label,rule_id\n";
    for (const auto &x : xs) {
      auto r = classifier.classify(x);
      std::string label(pds::to_string(r.label));
      if (as_json) {
        rows.push_back({{"keyword", x.keyword},
                        {"domain", x.domain},
                        {"context", std::string(pds::to_string(x.context))},
                        {"threshold", x.threshold},
                        {"label", label},
                        {"rule_id", r.rule_id ? json(*r.rule_id) : json(nullptr)}});
      } else {
        std::cout << x.keyword << ',' << x.domain << ',' << pds::to_string(x.context) << ',' << x.threshold << ','
                  << label << ',' << (r.rule_id ? std::to_string(*r.rule_id) : "") << '\n';
      }
    }
    if (as_json) std::cout << rows.dump(2) << '\n';
    return 0;
  }

  if (*replay_cmd) {
    std::optional<ScratchDir> scratch;
    if (stores_dir.empty()) {
      scratch.emplace();
      stores_dir = scratch->path().string();
    }
    auto pipeline = pds::Pipeline::open(c.data_dir, stores_dir, c.options());
    pds::LabeledTranscript t{pds::load_transcript(transcript), pds::load_ground_truth(truth)};
    auto result = pds::replay(t, pipeline->monitor(), canon_of(pipeline->resources().pre));
    json alerts = json::array();
    for (const auto &a : result.alerts) alerts.push_back(pds::to_json(a));
    json doc{{"report", pds::to_json(result.report)}, {"alerts", alerts}};
    std::cout << doc.dump(2) << '\n' << pds::format_report(result.report);
    return 0;
  }

  // serve
  auto pipeline = pds::Pipeline::open(c.data_dir, stores_dir, c.options());
  pds::Relay relay(pipeline->monitor());
  pds::RelayServer server(relay, static_cast<std::uint16_t>(port), address);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "listening on " << address << ":" << server.port() << std::endl;
  server.run();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  try {
    return run(argc, argv);
  } catch (const pds::ValidationError &e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const pds::IoError &e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
