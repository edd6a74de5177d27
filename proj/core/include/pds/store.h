#ifndef PDS_STORE_H_
#define PDS_STORE_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pds/cba.h"
#include "pds/obie.h"

namespace pds {

// MDB messages, FWDB filtered keywords, ODB ontology lexicons, PRDB training
// table + seeded rules, PWDB detected phish words.
enum class StoreKind { kMdb, kFwdb, kOdb, kPrdb, kPwdb };

inline constexpr std::array<StoreKind, 5> kAllStores = {StoreKind::kMdb, StoreKind::kFwdb, StoreKind::kOdb,
                                                       StoreKind::kPrdb, StoreKind::kPwdb};

std::string_view to_string(StoreKind kind);  // "MDB", ...
std::optional<StoreKind> parse_store_kind(std::string_view name);  // case-insensitive

struct StoreRecord {
  StoreKind store = StoreKind::kMdb;
  std::uint64_t seq = 0;
  std::int64_t written_at_ms = 0;
  nlohmann::json payload;
};

// Conjunctive equality on top-level payload fields.
using ScanFilter = std::map<std::string, nlohmann::json>;

inline constexpr int kThresholdCap = 5;

// Append-only, file-backed stores under one directory:
//   mdb.jsonl  fwdb.jsonl  pwdb.jsonl   one {seq, written_at, payload} per line
//   odb/<domain>                        one term per line
//   prdb.csv  prdb_rules.json           training table, seeded rules
// Every append is fsync'ed before it returns. Indexes are rebuilt on open.
class Stores {
 public:
  static std::unique_ptr<Stores> open(const std::filesystem::path &dir);

  // Copies odb/, prdb.csv and prdb_rules.json from `data_dir` into
  // `stores_dir` when they are missing there.
  static void seed(const std::filesystem::path &stores_dir, const std::filesystem::path &data_dir);

  Stores(const Stores &) = delete;
  Stores &operator=(const Stores &) = delete;

  // Validates the payload for `store` and makes it durable. Returns the new
  // record's sequence number. Throws ValidationError or IoError; on IoError
  // no record becomes visible.
  std::uint64_t append(StoreKind store, nlohmann::json payload);

  // Occurrence counter for (scope, stem), capped at kThresholdCap. The count
  // is persisted through the FWDB record the caller writes next.
  int bump_threshold(std::string_view scope, std::string_view stem);
  int threshold(std::string_view scope, std::string_view stem) const;

  std::vector<StoreRecord> scan(StoreKind store, const ScanFilter &filter = {}) const;
  // Throws ValidationError for an unknown store name.
  std::vector<StoreRecord> scan(std::string_view store_name, const ScanFilter &filter = {}) const;

  OntologyLexicon lexicon() const;
  std::vector<TrainingRecord> training_records(const Canonicalizer &canon = default_canonical) const;
  std::vector<PhishRule> seeded_rules(const Canonicalizer &canon = default_canonical) const;

  const std::filesystem::path &dir() const { return dir_; }

 private:
  explicit Stores(std::filesystem::path dir);

  struct Table {
    mutable std::mutex mu;
    std::vector<StoreRecord> records;
    std::uint64_t next_seq = 1;
  };

  void load();
  void load_jsonl(StoreKind kind, const std::filesystem::path &path);
  void load_odb();
  void load_prdb();
  std::uint64_t append_locked(Table &table, StoreKind kind, nlohmann::json payload);
  std::filesystem::path jsonl_path(StoreKind kind) const;
  Table &table(StoreKind kind) { return tables_[static_cast<std::size_t>(kind)]; }
  const Table &table(StoreKind kind) const { return tables_[static_cast<std::size_t>(kind)]; }

  std::filesystem::path dir_;
  std::array<Table, 5> tables_;

  mutable std::mutex threshold_mu_;
  std::map<std::pair<std::string, std::string>, int, std::less<>> thresholds_;
};

// Throws ValidationError when `payload` does not fit `store`.
void validate_payload(StoreKind store, const nlohmann::json &payload);

}  // namespace pds

#endif  // PDS_STORE_H_
