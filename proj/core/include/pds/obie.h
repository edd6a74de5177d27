#ifndef PDS_OBIE_H_
#define PDS_OBIE_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pds/chunker.h"
#include "pds/domain.h"
#include "pds/preprocess.h"

namespace pds {

// --- Triplet algorithms -----------------------------------------------------

// First NOUN leaf, in breadth-first order, of the first NP subtree met by a
// breadth-first walk of the tree.
std::optional<std::string> extract_subject(const ParseNode &tree);

// Deepest VERB leaf over the VP subtrees (depth-first; ties go to the
// leftmost leaf).
std::optional<std::string> extract_predicate(const ParseNode &tree);

// First NOUN leaf inside a PP subtree; failing that, inside an ADJP subtree.
std::optional<std::string> extract_object(const ParseNode &tree);

struct Triplet {
  std::optional<std::string> subject;
  std::optional<std::string> predicate;
  std::optional<std::string> object;
};

// Concepts, subjects, predicates and objects gathered over a window. All
// entries are canonical keys (stemmed lowercase phrases).
struct TripletSet {
  std::map<std::string, int> occurrence_counts;  // concept -> count
  std::vector<std::string> subject_list;
  std::vector<std::string> predicate_list;
  std::vector<std::string> object_list;

  void add_concept(const std::string &concept_key, int count = 1);
  std::set<std::string> concepts() const;
  // Concepts whose count equals the maximum count.
  std::set<std::string> max_occur_concepts() const;
};

// concepts ∩ subject_list ∩ max_occur_concepts; when several qualify the one
// occurring first in subject_list wins.
std::optional<std::string> theme_concept(const TripletSet &set);

// Per-message extraction result. Keys are canonical; `surfaces` maps each key
// to the first surface form seen.
struct MessageAnalysis {
  std::vector<Triplet> triplets;  // one per clause, surface forms
  std::vector<std::string> concepts;
  std::vector<std::string> subjects;
  std::vector<std::string> predicates;
  std::vector<std::string> objects;
  std::map<std::string, std::string> surfaces;

  // concepts ∪ predicates, the vocabulary used by the implicit rule.
  std::set<std::string> vocabulary() const;
};

// Runs slang normalization, clause splitting, tagging, chunking and the three
// triplet algorithms over a message or passage.
class TripletExtractor {
 public:
  TripletExtractor(const Preprocessor &pre, const PosTagger &tagger)
      : pre_(&pre), tagger_(&tagger) {}

  MessageAnalysis analyze(std::string_view text) const;

  // Chunked tree for a single clause (already normalized).
  ParseNode parse_clause(std::string_view clause) const;

 private:
  const Preprocessor *pre_;
  const PosTagger *tagger_;
};

// --- Ontology lexicon ---------------------------------------------------------

// domain name -> set of lowercase terms. A term may appear in several
// domains. Lookups canonicalize with stem_phrase().
class OntologyLexicon {
 public:
  using TermSet = std::set<std::string>;

  OntologyLexicon() = default;
  explicit OntologyLexicon(std::map<std::string, TermSet> domains);

  // One file per domain; file name = domain name, one term per line.
  static OntologyLexicon load(const std::filesystem::path &dir);
  void save(const std::filesystem::path &dir) const;

  const std::map<std::string, TermSet> &domains() const { return domains_; }
  bool has_domain(std::string_view name) const;
  bool contains(std::string_view domain, std::string_view term) const;

  // Domains listing `key` (a canonical key) as a term, sorted by name.
  std::vector<std::string> domains_of(std::string_view key) const;

  // Number of `domain` terms matched by `vocabulary` (canonical keys). A
  // multiword term also matches through its last word.
  std::size_t overlap(std::string_view domain, const std::set<std::string> &vocabulary) const;

  // `domain<TAB>has_term<TAB>term` lines, sorted.
  std::string export_triples() const;

  std::size_t term_count() const;

 private:
  void rebuild_index();

  std::map<std::string, TermSet> domains_;
  std::unordered_map<std::string, std::vector<std::string>> domains_by_key_;
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> keys_;  // domain -> (key, head)
};

enum class DomainRule { kExplicit, kImplicit, kNone };

struct DomainResolution {
  std::string domain{kNotDefined};
  DomainRule rule = DomainRule::kNone;
};

// Explicit rule: the theme names a domain, or is a term of exactly one
// domain. Implicit rule: the domain whose terms overlap the vocabulary most;
// ties or zero overlap give "not defined".
DomainResolution identify_domain(const std::optional<std::string> &theme_key,
                                 const OntologyLexicon &lexicon,
                                 const std::set<std::string> &vocabulary);

std::string identify_domain(std::string_view theme, const OntologyLexicon &lexicon);

Context identify_context(std::string_view domain, const std::set<std::string> &harmful = harmful_domains());

// Returns `lexicon` plus `terms` under `domain`. Existing entries are kept.
// Throws ValidationError for an empty term set or domain name.
OntologyLexicon learn_lexicon(std::string_view domain, const std::set<std::string> &terms,
                              const OntologyLexicon &lexicon);

// Copy-on-write holder: readers take immutable snapshots, learn() swaps in a
// new lexicon under an exclusive lock.
class SharedLexicon {
 public:
  explicit SharedLexicon(OntologyLexicon initial);

  std::shared_ptr<const OntologyLexicon> snapshot() const;

  // Terms that were not yet present under `domain`, now added.
  std::vector<std::string> learn(std::string_view domain, const std::set<std::string> &terms);

 private:
  mutable std::shared_mutex mu_;
  std::shared_ptr<const OntologyLexicon> current_;
};

}  // namespace pds

#endif  // PDS_OBIE_H_
