#ifndef PDS_STEMMER_H_
#define PDS_STEMMER_H_

#include <string>
#include <string_view>

namespace pds {

// Reduces a lowercase word to its root. The result is a fixed point:
// stem(stem(w)) == stem(w) for every w.
//
// The Porter algorithm is applied repeatedly (together with a short table of
// exceptional forms such as "fisher" -> "fish") until the word stops
// changing. A single Porter pass is not idempotent ("agreed" -> "agre" ->
// "agr"), which is why the iteration exists.
std::string stem(std::string_view word);

namespace detail {

// One pass of the original Porter algorithm, no exceptions applied.
std::string porter_once(std::string_view word);

}  // namespace detail
}  // namespace pds

#endif  // PDS_STEMMER_H_
