#include "pds/store.h"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pds/errors.h"

namespace pds {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string errno_text() { return std::strerror(errno); }

// Best effort: the caller is already failing with the original error.
void cut_back(int fd, off_t size) {
  if (::ftruncate(fd, size) != 0) return;
}

// Appends `bytes` to `path` and fsyncs. On a short or failed write the file
// is cut back to its previous length so no partial line survives.
void durable_append(const fs::path &path, const std::string &bytes) {
  int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw IoError("open " + path.string() + ": " + errno_text());
  struct stat st {};
  if (::fstat(fd, &st) != 0) {
    std::string err = errno_text();
    ::close(fd);
    throw IoError("stat " + path.string() + ": " + err);
  }
  std::size_t done = 0;
  while (done < bytes.size()) {
    ssize_t n = ::write(fd, bytes.data() + done, bytes.size() - done);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      std::string err = errno_text();
      cut_back(fd, st.st_size);
      ::close(fd);
      throw IoError("write " + path.string() + ": " + err);
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    std::string err = errno_text();
    cut_back(fd, st.st_size);
    ::close(fd);
    throw IoError("fsync " + path.string() + ": " + err);
  }
  ::close(fd);
}

// Writes a whole file through a temp file and rename.
void durable_replace(const fs::path &path, const std::string &bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw IoError("open " + tmp.string() + ": " + errno_text());
  std::size_t done = 0;
  bool ok = true;
  while (ok && done < bytes.size()) {
    ssize_t n = ::write(fd, bytes.data() + done, bytes.size() - done);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) ok = false;
    else done += static_cast<std::size_t>(n);
  }
  if (ok) ok = ::fsync(fd) == 0;
  std::string err = ok ? "" : errno_text();
  ::close(fd);
  if (!ok || ::rename(tmp.c_str(), path.c_str()) != 0) {
    if (err.empty()) err = errno_text();
    ::unlink(tmp.c_str());
    throw IoError("replace " + path.string() + ": " + err);
  }
}

std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_text(const json &p, const char *key) {
  return p.contains(key) && p[key].is_string() && !p[key].get<std::string>().empty();
}

bool is_int(const json &p, const char *key) { return p.contains(key) && p[key].is_number_integer(); }

void require(bool ok, StoreKind kind, const std::string &what) {
  if (!ok) throw ValidationError(std::string(to_string(kind)) + " payload: " + what);
}

bool is_rule_payload(const json &p) { return p.contains("rule_id"); }

TrainingRecord training_of(const json &p, const Canonicalizer &canon) {
  TrainingRecord r;
  r.keyword = canon(p["keyword"].get<std::string>());
  r.domain = canonical_domain(p["domain"].get<std::string>());
  r.context = *parse_context(p["context"].get<std::string>());
  r.threshold = p["threshold"].get<int>();
  r.label = *parse_label(p["label"].get<std::string>());
  return r;
}

}  // namespace

std::string_view to_string(StoreKind kind) {
  switch (kind) {
    case StoreKind::kMdb:
      return "MDB";
    case StoreKind::kFwdb:
      return "FWDB";
    case StoreKind::kOdb:
      return "ODB";
    case StoreKind::kPrdb:
      return "PRDB";
    case StoreKind::kPwdb:
      return "PWDB";
  }
  return "MDB";
}

std::optional<StoreKind> parse_store_kind(std::string_view name) {
  std::string upper;
  for (char c : name) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (auto k : kAllStores) {
    if (to_string(k) == upper) return k;
  }
  return std::nullopt;
}

void validate_payload(StoreKind store, const json &p) {
  require(p.is_object(), store, "expected an object");
  switch (store) {
    case StoreKind::kMdb:
      require(is_text(p, "session_id"), store, "session_id must be a non-empty string");
      require(is_int(p, "seq"), store, "seq must be an integer");
      require(is_text(p, "sender"), store, "sender must be a non-empty string");
      require(p.contains("text") && p["text"].is_string(), store, "text must be a string");
      break;
    case StoreKind::kFwdb:
      require(is_text(p, "stem"), store, "stem must be a non-empty string");
      require(is_text(p, "session_id"), store, "session_id must be a non-empty string");
      require(is_int(p, "seq"), store, "seq must be an integer");
      require(is_int(p, "threshold") && p["threshold"].get<int>() >= 1 &&
                  p["threshold"].get<int>() <= kThresholdCap,
              store, "threshold must be an integer in 1..5");
      if (p.contains("scope")) require(is_text(p, "scope"), store, "scope must be a non-empty string");
      break;
    case StoreKind::kOdb:
      require(is_text(p, "domain"), store, "domain must be a non-empty string");
      require(is_text(p, "term"), store, "term must be a non-empty string");
      require(p["domain"].get<std::string>().find('/') == std::string::npos, store, "domain may not contain '/'");
      require(p["term"].get<std::string>().find('\n') == std::string::npos, store, "term may not contain a newline");
      break;
    case StoreKind::kPrdb:
      if (is_rule_payload(p)) {
        parse_seeded_rules(json::array({p}), default_canonical);  // throws ValidationError
      } else {
        require(is_text(p, "keyword") && is_text(p, "domain"), store, "keyword and domain required");
        require(p.contains("context") && p["context"].is_string() &&
                    parse_context(p["context"].get<std::string>()).has_value(),
                store, "context must be harmful or harmless");
        require(is_int(p, "threshold") && p["threshold"].get<int>() >= 1 && p["threshold"].get<int>() <= 5,
                store, "threshold must be an integer in 1..5");
        require(p.contains("label") && p["label"].is_string(), store, "label must be yes or no");
        auto label = parse_label(p["label"].get<std::string>());
        require(label && *label != PhishLabel::kSpc, store, "label must be yes or no");
      }
      break;
    case StoreKind::kPwdb:
      require(is_text(p, "stem"), store, "stem must be a non-empty string");
      require(is_text(p, "domain"), store, "domain must be a non-empty string");
      break;
  }
}

Stores::Stores(fs::path dir) : dir_(std::move(dir)) {}

std::unique_ptr<Stores> Stores::open(const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::unique_ptr<Stores> s(new Stores(dir));
  s->load();
  return s;
}

void Stores::seed(const fs::path &stores_dir, const fs::path &data_dir) {
  std::error_code ec;
  fs::create_directories(stores_dir, ec);
  if (ec) throw IoError("cannot create " + stores_dir.string() + ": " + ec.message());
  if (!fs::exists(stores_dir / "odb")) {
    fs::copy(data_dir / "odb", stores_dir / "odb", fs::copy_options::recursive, ec);
    if (ec) throw IoError("cannot seed odb/: " + ec.message());
  }
  for (const char *name : {"prdb.csv", "prdb_rules.json"}) {
    if (fs::exists(stores_dir / name)) continue;
    fs::copy_file(data_dir / "prdb" / name, stores_dir / name, ec);
    if (ec) throw IoError(std::string("cannot seed ") + name + ": " + ec.message());
  }
}

fs::path Stores::jsonl_path(StoreKind kind) const {
  switch (kind) {
    case StoreKind::kMdb:
      return dir_ / "mdb.jsonl";
    case StoreKind::kFwdb:
      return dir_ / "fwdb.jsonl";
    case StoreKind::kPwdb:
      return dir_ / "pwdb.jsonl";
    default:
      throw ContractError("no jsonl file for " + std::string(to_string(kind)));
  }
}

void Stores::load() {
  for (auto k : {StoreKind::kMdb, StoreKind::kFwdb, StoreKind::kPwdb}) load_jsonl(k, jsonl_path(k));
  load_odb();
  load_prdb();
  for (const auto &r : table(StoreKind::kFwdb).records) {
    const auto &p = r.payload;
    std::string scope = p.contains("scope") ? p["scope"].get<std::string>() : p["session_id"].get<std::string>();
    auto key = std::make_pair(scope, p["stem"].get<std::string>());
    int &slot = thresholds_[key];
    slot = std::max(slot, p["threshold"].get<int>());
  }
}

void Stores::load_jsonl(StoreKind kind, const fs::path &path) {
  Table &t = table(kind);
  if (!fs::exists(path)) return;
  std::string bytes = read_file(path);
  std::size_t complete = bytes.rfind('\n');
  complete = complete == std::string::npos ? 0 : complete + 1;
  if (complete < bytes.size()) {
    // A crash mid-append left a partial line; it was never acknowledged.
    if (::truncate(path.c_str(), static_cast<off_t>(complete)) != 0) {
      throw IoError("cannot truncate partial record in " + path.string() + ": " + errno_text());
    }
    bytes.resize(complete);
  }
  std::istringstream in(bytes);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    StoreRecord r;
    try {
      json j = json::parse(line);
      r.store = kind;
      r.seq = j.at("seq").get<std::uint64_t>();
      r.written_at_ms = j.at("written_at").get<std::int64_t>();
      r.payload = j.at("payload");
      validate_payload(kind, r.payload);
    } catch (const std::exception &e) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": corrupt record: " + e.what());
    }
    if (r.seq < t.next_seq) throw IoError(path.string() + ": sequence numbers out of order");
    t.next_seq = r.seq + 1;
    t.records.push_back(std::move(r));
  }
}

void Stores::load_odb() {
  Table &t = table(StoreKind::kOdb);
  fs::path dir = dir_ / "odb";
  if (!fs::exists(dir)) return;
  OntologyLexicon lex = OntologyLexicon::load(dir);
  for (const auto &[domain, terms] : lex.domains()) {
    for (const auto &term : terms) {
      t.records.push_back({StoreKind::kOdb, t.next_seq++, 0, json{{"domain", domain}, {"term", term}}});
    }
  }
}

void Stores::load_prdb() {
  Table &t = table(StoreKind::kPrdb);
  fs::path csv = dir_ / "prdb.csv";
  if (fs::exists(csv)) {
    std::ifstream in(csv);
    // Keep raw keyword spellings; canonicalization happens on read-out.
    std::vector<TrainingRecord> rows;
    try {
      rows = parse_training_csv(in, [](std::string_view k) { return to_lower(k); });
    } catch (const ValidationError &e) {
      throw IoError(csv.string() + ": " + e.what());
    }
    for (const auto &r : rows) {
      json p{{"keyword", r.keyword},
             {"domain", r.domain},
             {"context", std::string(to_string(r.context))},
             {"threshold", r.threshold},
             {"label", to_lower(to_string(r.label))}};
      t.records.push_back({StoreKind::kPrdb, t.next_seq++, 0, std::move(p)});
    }
  }
  fs::path rules = dir_ / "prdb_rules.json";
  if (fs::exists(rules)) {
    json doc;
    try {
      doc = json::parse(read_file(rules));
      parse_seeded_rules(doc, default_canonical);
    } catch (const std::exception &e) {
      throw IoError(rules.string() + ": " + e.what());
    }
    for (const auto &r : doc) t.records.push_back({StoreKind::kPrdb, t.next_seq++, 0, r});
  }
}

std::uint64_t Stores::append(StoreKind store, json payload) {
  validate_payload(store, payload);
  Table &t = table(store);
  std::lock_guard lock(t.mu);
  return append_locked(t, store, std::move(payload));
}

std::uint64_t Stores::append_locked(Table &t, StoreKind kind, json payload) {
  StoreRecord r{kind, t.next_seq, now_ms(), std::move(payload)};
  switch (kind) {
    case StoreKind::kMdb:
    case StoreKind::kFwdb:
    case StoreKind::kPwdb: {
      json line{{"seq", r.seq}, {"written_at", r.written_at_ms}, {"payload", r.payload}};
      durable_append(jsonl_path(kind), line.dump() + "\n");
      break;
    }
    case StoreKind::kOdb: {
      fs::path dir = dir_ / "odb";
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
      durable_append(dir / r.payload["domain"].get<std::string>(), r.payload["term"].get<std::string>() + "\n");
      break;
    }
    case StoreKind::kPrdb: {
      if (is_rule_payload(r.payload)) {
        json doc = json::array();
        for (const auto &old : t.records) {
          if (is_rule_payload(old.payload)) doc.push_back(old.payload);
        }
        doc.push_back(r.payload);
        durable_replace(dir_ / "prdb_rules.json", doc.dump(2) + "\n");
      } else {
        fs::path csv = dir_ / "prdb.csv";
        std::string bytes;
        if (!fs::exists(csv)) bytes = training_csv_header() + "\n";
        TrainingRecord tr = training_of(r.payload, [](std::string_view k) { return to_lower(k); });
        bytes += to_csv_row(tr) + "\n";
        durable_append(csv, bytes);
      }
      break;
    }
  }
  t.next_seq = r.seq + 1;
  std::uint64_t seq = r.seq;
  t.records.push_back(std::move(r));
  return seq;
}

int Stores::bump_threshold(std::string_view scope, std::string_view stem) {
  std::lock_guard lock(threshold_mu_);
  int &slot = thresholds_[std::make_pair(std::string(scope), std::string(stem))];
  slot = std::min(slot + 1, kThresholdCap);
  return slot;
}

int Stores::threshold(std::string_view scope, std::string_view stem) const {
  std::lock_guard lock(threshold_mu_);
  auto it = thresholds_.find(std::make_pair(std::string(scope), std::string(stem)));
  return it == thresholds_.end() ? 0 : it->second;
}

std::vector<StoreRecord> Stores::scan(StoreKind store, const ScanFilter &filter) const {
  const Table &t = table(store);
  std::lock_guard lock(t.mu);
  std::vector<StoreRecord> out;
  for (const auto &r : t.records) {
    bool ok = std::all_of(filter.begin(), filter.end(), [&](const auto &kv) {
      return r.payload.contains(kv.first) && r.payload[kv.first] == kv.second;
    });
    if (ok) out.push_back(r);
  }
  return out;
}

std::vector<StoreRecord> Stores::scan(std::string_view store_name, const ScanFilter &filter) const {
  auto kind = parse_store_kind(store_name);
  if (!kind) throw ValidationError("unknown store '" + std::string(store_name) + "'");
  return scan(*kind, filter);
}

OntologyLexicon Stores::lexicon() const {
  std::map<std::string, OntologyLexicon::TermSet> domains;
  for (const auto &r : scan(StoreKind::kOdb)) {
    domains[r.payload["domain"].get<std::string>()].insert(r.payload["term"].get<std::string>());
  }
  return OntologyLexicon(std::move(domains));
}

std::vector<TrainingRecord> Stores::training_records(const Canonicalizer &canon) const {
  std::vector<TrainingRecord> out;
  for (const auto &r : scan(StoreKind::kPrdb)) {
    if (!is_rule_payload(r.payload)) out.push_back(training_of(r.payload, canon));
  }
  return out;
}

std::vector<PhishRule> Stores::seeded_rules(const Canonicalizer &canon) const {
  json doc = json::array();
  for (const auto &r : scan(StoreKind::kPrdb)) {
    if (is_rule_payload(r.payload)) doc.push_back(r.payload);
  }
  return parse_seeded_rules(doc, canon);
}

}  // namespace pds
