#ifndef PDS_DOMAIN_H_
#define PDS_DOMAIN_H_

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pds {

// Fallback domain when no lexicon rule resolves one.
inline constexpr std::string_view kNotDefined = "not defined";

// Intent attached to a keyword's resolved domain.
enum class Context { kHarmful, kHarmless };

std::string_view to_string(Context context);  // "harmful" / "harmless"
std::optional<Context> parse_context(std::string_view text);

// The eight domain values of the phishing-rule training table.
const std::vector<std::string> &prdb_domains();

// The seven phishing domains (all PRDB domains except "not defined").
// A keyword resolved into one of these is HARMFUL.
const std::set<std::string> &harmful_domains();

// Lowercases, maps '_' to ' ', collapses spaces and resolves the spelling
// variants seen in rule listings ("acc_creation_tips", "fame_noteriety").
std::string canonical_domain(std::string_view name);

}  // namespace pds

#endif  // PDS_DOMAIN_H_
