#include "pds/domain.h"

#include <cctype>
#include <map>

namespace pds {

std::string_view to_string(Context context) {
  return context == Context::kHarmful ? "harmful" : "harmless";
}

std::optional<Context> parse_context(std::string_view text) {
  std::string t;
  for (char c : text) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (t == "harmful") return Context::kHarmful;
  if (t == "harmless") return Context::kHarmless;
  return std::nullopt;
}

const std::vector<std::string> &prdb_domains() {
  static const auto *domains = new std::vector<std::string>{
      "financial gain",  "account creation tips", "fame and notoriety", "deceitful elicitation",
      "identity access", "life threatening",      "url related",        std::string(kNotDefined),
  };
  return *domains;
}

const std::set<std::string> &harmful_domains() {
  static const auto *domains = [] {
    auto *s = new std::set<std::string>(prdb_domains().begin(), prdb_domains().end());
    s->erase(std::string(kNotDefined));
    return s;
  }();
  return *domains;
}

std::string canonical_domain(std::string_view name) {
  static const auto *aliases = new std::map<std::string, std::string>{
      {"acc creation tips", "account creation tips"},
      {"account creation", "account creation tips"},
      {"fame noteriety", "fame and notoriety"},
      {"fame notoriety", "fame and notoriety"},
      {"fame and noteriety", "fame and notoriety"},
      {"identity", "identity access"},
      {"url", "url related"},
      {"not_defined", std::string(kNotDefined)},
      {"undefined", std::string(kNotDefined)},
  };
  std::string out;
  for (char c : name) {
    char ch = c == '_' ? ' ' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ch == ' ' && (out.empty() || out.back() == ' ')) continue;
    out += ch;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  if (auto it = aliases->find(out); it != aliases->end()) return it->second;
  return out;
}

}  // namespace pds
