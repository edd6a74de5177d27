#include "pds/obie.h"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <sstream>

#include "pds/errors.h"

namespace pds {
namespace {

bool is_numeric(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c));
  });
}

const ParseNode *first_noun_bfs(const ParseNode &root) {
  std::deque<const ParseNode *> queue{&root};
  while (!queue.empty()) {
    const ParseNode *n = queue.front();
    queue.pop_front();
    if (n->is_leaf()) {
      if (n->leaf->tag == PosTag::kNoun) return n;
      continue;
    }
    for (const auto &c : n->children) queue.push_back(&c);
  }
  return nullptr;
}

const ParseNode *first_noun_inorder(const ParseNode &n) {
  if (n.is_leaf()) return n.leaf->tag == PosTag::kNoun ? &n : nullptr;
  for (const auto &c : n.children) {
    if (const auto *hit = first_noun_inorder(c)) return hit;
  }
  return nullptr;
}

void deepest_verb(const ParseNode &n, int depth, bool in_vp, const ParseNode *&best, int &best_depth) {
  if (n.is_leaf()) {
    if (in_vp && n.leaf->tag == PosTag::kVerb && depth > best_depth) {
      best = &n;
      best_depth = depth;
    }
    return;
  }
  bool vp = in_vp || n.label == PhraseLabel::kVP;
  for (const auto &c : n.children) deepest_verb(c, depth + 1, vp, best, best_depth);
}

const ParseNode *first_noun_under(const ParseNode &n, PhraseLabel label) {
  if (n.is_leaf()) return nullptr;
  if (n.label == label) {
    if (const auto *hit = first_noun_inorder(n)) return hit;
  }
  for (const auto &c : n.children) {
    if (const auto *hit = first_noun_under(c, label)) return hit;
  }
  return nullptr;
}

std::string last_word(const std::string &key) {
  auto sp = key.rfind(' ');
  return sp == std::string::npos ? key : key.substr(sp + 1);
}

std::string trim_line(std::string line) {
  while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
  std::size_t b = 0;
  while (b < line.size() && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
  return line.substr(b);
}

}  // namespace

std::optional<std::string> extract_subject(const ParseNode &tree) {
  std::deque<const ParseNode *> queue{&tree};
  while (!queue.empty()) {
    const ParseNode *n = queue.front();
    queue.pop_front();
    if (n->is_leaf()) continue;
    if (n->label == PhraseLabel::kNP) {
      const ParseNode *noun = first_noun_bfs(*n);
      if (noun == nullptr) return std::nullopt;
      return noun->leaf->surface;
    }
    for (const auto &c : n->children) queue.push_back(&c);
  }
  return std::nullopt;
}

std::optional<std::string> extract_predicate(const ParseNode &tree) {
  const ParseNode *best = nullptr;
  int best_depth = -1;
  deepest_verb(tree, 0, false, best, best_depth);
  if (best == nullptr) return std::nullopt;
  return best->leaf->surface;
}

std::optional<std::string> extract_object(const ParseNode &tree) {
  for (auto label : {PhraseLabel::kPP, PhraseLabel::kADJP}) {
    if (const auto *hit = first_noun_under(tree, label)) return hit->leaf->surface;
  }
  return std::nullopt;
}

// --- TripletSet ---------------------------------------------------------------

void TripletSet::add_concept(const std::string &concept_key, int count) {
  if (count <= 0) throw ValidationError("concept count must be positive");
  occurrence_counts[concept_key] += count;
}

std::set<std::string> TripletSet::concepts() const {
  std::set<std::string> out;
  for (const auto &[k, n] : occurrence_counts) out.insert(k);
  return out;
}

std::set<std::string> TripletSet::max_occur_concepts() const {
  int top = 0;
  for (const auto &[k, n] : occurrence_counts) top = std::max(top, n);
  std::set<std::string> out;
  for (const auto &[k, n] : occurrence_counts) {
    if (n == top && top > 0) out.insert(k);
  }
  return out;
}

std::optional<std::string> theme_concept(const TripletSet &set) {
  auto top = set.max_occur_concepts();
  for (const auto &s : set.subject_list) {
    if (top.contains(s)) return s;  // max_occur_concepts ⊆ concepts
  }
  return std::nullopt;
}

std::set<std::string> MessageAnalysis::vocabulary() const {
  std::set<std::string> v(concepts.begin(), concepts.end());
  v.insert(predicates.begin(), predicates.end());
  return v;
}

// --- TripletExtractor ---------------------------------------------------------

ParseNode TripletExtractor::parse_clause(std::string_view clause) const {
  auto tokens = pre_->tokenize(clause);
  auto tagged = tagger_->tag(tokens);
  return chunk(tagged);
}

MessageAnalysis TripletExtractor::analyze(std::string_view text) const {
  MessageAnalysis out;
  auto usable = [&](const std::string &surface) {
    return !pre_->is_stop_word(surface) && !is_numeric(surface);
  };
  auto remember = [&](const std::string &key, const std::string &surface) { out.surfaces.emplace(key, surface); };

  for (const auto &clause : split_clauses(pre_->normalize_slang(text))) {
    ParseNode tree = parse_clause(clause);
    for (const auto &leaf : flatten(tree)) {
      if (leaf.tag != PosTag::kNoun || !usable(leaf.surface)) continue;
      std::string key = stem_phrase(leaf.surface);
      remember(key, leaf.surface);
      out.concepts.push_back(std::move(key));
    }
    Triplet t{extract_subject(tree), extract_predicate(tree), extract_object(tree)};
    if (t.subject && usable(*t.subject)) out.subjects.push_back(stem_phrase(*t.subject));
    if (t.predicate) {
      std::string key = stem_phrase(*t.predicate);
      remember(key, *t.predicate);
      out.predicates.push_back(std::move(key));
    }
    if (t.object && usable(*t.object)) out.objects.push_back(stem_phrase(*t.object));
    out.triplets.push_back(std::move(t));
  }
  return out;
}

// --- OntologyLexicon ----------------------------------------------------------

OntologyLexicon::OntologyLexicon(std::map<std::string, TermSet> domains) {
  for (auto &[name, terms] : domains) {
    TermSet &dst = domains_[to_lower(name)];
    for (const auto &t : terms) {
      std::string term = to_lower(t);
      if (!term.empty()) dst.insert(std::move(term));
    }
  }
  rebuild_index();
}

void OntologyLexicon::rebuild_index() {
  domains_by_key_.clear();
  keys_.clear();
  for (const auto &[domain, terms] : domains_) {
    auto &keys = keys_[domain];
    for (const auto &term : terms) {
      std::string key = stem_phrase(term);
      auto &owners = domains_by_key_[key];
      if (owners.empty() || owners.back() != domain) owners.push_back(domain);
      keys.emplace_back(key, last_word(key));
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  }
}

OntologyLexicon OntologyLexicon::load(const std::filesystem::path &dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw IoError("lexicon directory missing: " + dir.string());
  std::map<std::string, TermSet> domains;
  for (const auto &entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (name.empty() || name[0] == '.' || name.ends_with(".tmp")) continue;
    std::ifstream in(entry.path());
    if (!in) throw IoError("cannot read " + entry.path().string());
    TermSet &terms = domains[name];
    std::string line;
    while (std::getline(in, line)) {
      line = trim_line(line);
      if (!line.empty() && line[0] != '#') terms.insert(line);
    }
  }
  return OntologyLexicon(std::move(domains));
}

void OntologyLexicon::save(const std::filesystem::path &dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  for (const auto &[domain, terms] : domains_) {
    auto path = dir / domain;
    auto tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      for (const auto &t : terms) out << t << '\n';
      out.flush();
      if (!out) throw IoError("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot replace " + path.string() + ": " + ec.message());
  }
}

bool OntologyLexicon::has_domain(std::string_view name) const {
  return domains_.contains(std::string(name)) || domains_.contains(canonical_domain(name));
}

bool OntologyLexicon::contains(std::string_view domain, std::string_view term) const {
  auto it = keys_.find(std::string(domain));
  if (it == keys_.end()) it = keys_.find(canonical_domain(domain));
  if (it == keys_.end()) return false;
  std::string key = stem_phrase(term);
  return std::any_of(it->second.begin(), it->second.end(), [&](const auto &kh) { return kh.first == key; });
}

std::vector<std::string> OntologyLexicon::domains_of(std::string_view key) const {
  auto it = domains_by_key_.find(std::string(key));
  if (it == domains_by_key_.end()) return {};
  return it->second;
}

std::size_t OntologyLexicon::overlap(std::string_view domain, const std::set<std::string> &vocabulary) const {
  auto it = keys_.find(std::string(domain));
  if (it == keys_.end()) return 0;
  std::size_t n = 0;
  for (const auto &[key, head] : it->second) {
    if (vocabulary.contains(key) || vocabulary.contains(head)) ++n;
  }
  return n;
}

std::string OntologyLexicon::export_triples() const {
  std::ostringstream out;
  for (const auto &[domain, terms] : domains_) {
    for (const auto &t : terms) out << domain << "\thas_term\t" << t << '\n';
  }
  return out.str();
}

std::size_t OntologyLexicon::term_count() const {
  std::size_t n = 0;
  for (const auto &[d, terms] : domains_) n += terms.size();
  return n;
}

// --- Domain and context -------------------------------------------------------

DomainResolution identify_domain(const std::optional<std::string> &theme_key, const OntologyLexicon &lexicon,
                                 const std::set<std::string> &vocabulary) {
  if (theme_key && !theme_key->empty()) {
    for (const auto &[domain, terms] : lexicon.domains()) {
      if (stem_phrase(domain) == *theme_key) return {domain, DomainRule::kExplicit};
    }
    auto owners = lexicon.domains_of(*theme_key);
    if (owners.size() == 1) return {owners.front(), DomainRule::kExplicit};
  }
  std::string best;
  std::size_t best_n = 0;
  bool tied = false;
  for (const auto &[domain, terms] : lexicon.domains()) {
    std::size_t n = lexicon.overlap(domain, vocabulary);
    if (n > best_n) {
      best = domain;
      best_n = n;
      tied = false;
    } else if (n == best_n && n > 0) {
      tied = true;
    }
  }
  if (best_n == 0 || tied) return {};
  return {best, DomainRule::kImplicit};
}

std::string identify_domain(std::string_view theme, const OntologyLexicon &lexicon) {
  std::string key = stem_phrase(to_lower(theme));
  return identify_domain(std::optional<std::string>(key), lexicon, {key}).domain;
}

Context identify_context(std::string_view domain, const std::set<std::string> &harmful) {
  return harmful.contains(canonical_domain(domain)) ? Context::kHarmful : Context::kHarmless;
}

OntologyLexicon learn_lexicon(std::string_view domain, const std::set<std::string> &terms,
                              const OntologyLexicon &lexicon) {
  if (domain.empty()) throw ValidationError("learn_lexicon: empty domain");
  if (terms.empty()) throw ValidationError("learn_lexicon: empty term set");
  auto domains = lexicon.domains();
  auto &dst = domains[to_lower(domain)];
  for (const auto &t : terms) {
    if (t.empty()) throw ValidationError("learn_lexicon: empty term");
    dst.insert(to_lower(t));
  }
  return OntologyLexicon(std::move(domains));
}

SharedLexicon::SharedLexicon(OntologyLexicon initial)
    : current_(std::make_shared<const OntologyLexicon>(std::move(initial))) {}

std::shared_ptr<const OntologyLexicon> SharedLexicon::snapshot() const {
  std::shared_lock lock(mu_);
  return current_;
}

std::vector<std::string> SharedLexicon::learn(std::string_view domain, const std::set<std::string> &terms) {
  std::unique_lock lock(mu_);
  std::vector<std::string> fresh;
  for (const auto &t : terms) {
    if (!t.empty() && !current_->contains(domain, t)) fresh.push_back(t);
  }
  if (fresh.empty()) return fresh;
  current_ = std::make_shared<const OntologyLexicon>(
      learn_lexicon(domain, std::set<std::string>(fresh.begin(), fresh.end()), *current_));
  return fresh;
}

}  // namespace pds
