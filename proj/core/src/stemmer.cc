#include "pds/stemmer.h"

#include <algorithm>
#include <string>
#include <unordered_map>
#include <vector>

namespace pds {
namespace {

// Original Porter (1980) suffix stripper. Works on b[0..k]; characters past
// k are dead.
class Porter {
 public:
  explicit Porter(std::string_view word) : b_(word) {}

  std::string run() {
    if (b_.size() <= 2) return b_;
    k_ = static_cast<int>(b_.size()) - 1;
    step1ab();
    if (k_ > 0) {
      step1c();
      step2();
      step3();
      step4();
      step5();
    }
    return b_.substr(0, k_ + 1);
  }

 private:
  bool cons(int i) const {
    switch (b_[i]) {
      case 'a':
      case 'e':
      case 'i':
      case 'o':
      case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !cons(i - 1);
      default:
        return true;
    }
  }

  // Number of VC sequences in b[0..j].
  int measure() const {
    int n = 0;
    int i = 0;
    for (;;) {
      if (i > j_) return n;
      if (!cons(i)) break;
      ++i;
    }
    ++i;
    for (;;) {
      for (;;) {
        if (i > j_) return n;
        if (cons(i)) break;
        ++i;
      }
      ++i;
      ++n;
      for (;;) {
        if (i > j_) return n;
        if (!cons(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool vowel_in_stem() const {
    for (int i = 0; i <= j_; ++i) {
      if (!cons(i)) return true;
    }
    return false;
  }

  bool double_consonant(int i) const {
    if (i < 1) return false;
    if (b_[i] != b_[i - 1]) return false;
    return cons(i);
  }

  // consonant-vowel-consonant ending at i, last consonant not w, x or y.
  bool cvc(int i) const {
    if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
    char ch = b_[i];
    return ch != 'w' && ch != 'x' && ch != 'y';
  }

  bool ends(std::string_view s) {
    int len = static_cast<int>(s.size());
    if (len > k_ + 1) return false;
    if (b_.compare(k_ - len + 1, len, s) != 0) return false;
    j_ = k_ - len;
    return true;
  }

  void set_to(std::string_view s) {
    b_.resize(j_ + 1);
    b_.append(s);
    k_ = j_ + static_cast<int>(s.size());
  }

  void replace_if_measured(std::string_view s) {
    if (measure() > 0) set_to(s);
  }

  void step1ab() {
    if (b_[k_] == 's') {
      if (ends("sses")) {
        k_ -= 2;
      } else if (ends("ies")) {
        set_to("i");
      } else if (b_[k_ - 1] != 's') {
        --k_;
      }
    }
    if (ends("eed")) {
      if (measure() > 0) --k_;
    } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
      k_ = j_;
      if (ends("at")) {
        set_to("ate");
      } else if (ends("bl")) {
        set_to("ble");
      } else if (ends("iz")) {
        set_to("ize");
      } else if (double_consonant(k_)) {
        --k_;
        char ch = b_[k_];
        if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
      } else if (measure() == 1 && cvc(k_)) {
        set_to("e");
      }
    }
  }

  void step1c() {
    if (ends("y") && vowel_in_stem()) b_[k_] = 'i';
  }

  // Tries each (suffix, replacement) pair; the first suffix that matches
  // ends the search whether or not the measure allows the replacement.
  void try_rules(std::initializer_list<std::pair<std::string_view, std::string_view>> rules) {
    for (const auto &[suffix, replacement] : rules) {
      if (ends(suffix)) {
        replace_if_measured(replacement);
        return;
      }
    }
  }

  void step2() {
    if (k_ < 1) return;
    switch (b_[k_ - 1]) {
      case 'a':
        try_rules({{"ational", "ate"}, {"tional", "tion"}});
        break;
      case 'c':
        try_rules({{"enci", "ence"}, {"anci", "ance"}});
        break;
      case 'e':
        try_rules({{"izer", "ize"}});
        break;
      case 'l':
        try_rules({{"abli", "able"}, {"alli", "al"}, {"entli", "ent"}, {"eli", "e"}, {"ousli", "ous"}});
        break;
      case 'o':
        try_rules({{"ization", "ize"}, {"ation", "ate"}, {"ator", "ate"}});
        break;
      case 's':
        try_rules({{"alism", "al"}, {"iveness", "ive"}, {"fulness", "ful"}, {"ousness", "ous"}});
        break;
      case 't':
        try_rules({{"aliti", "al"}, {"iviti", "ive"}, {"biliti", "ble"}});
        break;
      default:
        break;
    }
  }

  void step3() {
    switch (b_[k_]) {
      case 'e':
        try_rules({{"icate", "ic"}, {"ative", ""}, {"alize", "al"}});
        break;
      case 'i':
        try_rules({{"iciti", "ic"}});
        break;
      case 'l':
        try_rules({{"ical", "ic"}, {"ful", ""}});
        break;
      case 's':
        try_rules({{"ness", ""}});
        break;
      default:
        break;
    }
  }

  void step4() {
    if (k_ < 1) return;
    bool matched = false;
    auto any = [&](std::initializer_list<std::string_view> suffixes) {
      for (auto s : suffixes) {
        if (ends(s)) return true;
      }
      return false;
    };
    switch (b_[k_ - 1]) {
      case 'a':
        matched = any({"al"});
        break;
      case 'c':
        matched = any({"ance", "ence"});
        break;
      case 'e':
        matched = any({"er"});
        break;
      case 'i':
        matched = any({"ic"});
        break;
      case 'l':
        matched = any({"able", "ible"});
        break;
      case 'n':
        matched = any({"ant", "ement", "ment", "ent"});
        break;
      case 'o':
        if (ends("ion") && j_ >= 0 && (b_[j_] == 's' || b_[j_] == 't')) {
          matched = true;
        } else {
          matched = any({"ou"});
        }
        break;
      case 's':
        matched = any({"ism"});
        break;
      case 't':
        matched = any({"ate", "iti"});
        break;
      case 'u':
        matched = any({"ous"});
        break;
      case 'v':
        matched = any({"ive"});
        break;
      case 'z':
        matched = any({"ize"});
        break;
      default:
        break;
    }
    if (matched && measure() > 1) k_ = j_;
  }

  void step5() {
    j_ = k_;
    if (b_[k_] == 'e') {
      int a = measure();
      if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
    }
    if (b_[k_] == 'l' && double_consonant(k_) && measure() > 1) --k_;
  }

  std::string b_;
  int k_ = 0;
  int j_ = 0;
};

// Forms the suffix rules cannot reach.
const std::unordered_map<std::string, std::string> &exceptional_forms() {
  static const auto *forms = new std::unordered_map<std::string, std::string>{
      {"fisher", "fish"},  {"fishers", "fish"},  {"fishery", "fish"},
      {"fisheri", "fish"}, {"fisheries", "fish"},
  };
  return *forms;
}

std::string stem_step(const std::string &word) {
  const auto &forms = exceptional_forms();
  if (auto it = forms.find(word); it != forms.end()) return it->second;
  return Porter(word).run();
}

}  // namespace

namespace detail {

std::string porter_once(std::string_view word) { return Porter(word).run(); }

}  // namespace detail

std::string stem(std::string_view word) {
  std::vector<std::string> seen{std::string(word)};
  for (;;) {
    std::string next = stem_step(seen.back());
    if (next == seen.back()) return next;
    auto hit = std::find(seen.begin(), seen.end(), next);
    if (hit != seen.end()) {
      // A cycle: settle on its smallest member so every entry point agrees.
      return *std::min_element(hit, seen.end());
    }
    seen.push_back(std::move(next));
  }
}

}  // namespace pds
