#include "sublm/corpus/inventory.hpp"

#include "sublm/error.hpp"
#include "sublm/util/io.hpp"

namespace sublm::corpus {

const PhoneInventory& PhoneInventory::english() {
  static const PhoneInventory inv = [] {
    PhoneInventory v;
    v.vowel_order_ = {"aa", "ae", "ah", "ao", "aw", "ay", "eh", "er",
                      "ey", "ih", "iy", "ow", "oy", "uh", "uw", "ax"};
    v.vowels_.insert(v.vowel_order_.begin(), v.vowel_order_.end());
    v.consonants_ = {"b", "ch", "d",  "dh", "f", "g", "hh", "jh", "k", "l",  "m", "n",
                     "ng", "p", "r",  "s",  "sh", "t", "th", "v", "w", "y",  "z", "zh"};
    return v;
  }();
  return inv;
}

size_t PhoneInventory::vowel_id(const std::string& vowel) const {
  for (size_t i = 0; i < vowel_order_.size(); ++i)
    if (vowel_order_[i] == vowel) return i;
  throw ValidationError("'" + vowel + "' is not a vowel in the inventory");
}

namespace {
std::string key_of(const std::vector<std::string>& phones) {
  std::string key;
  for (const auto& p : phones) {
    key += p;
    key += '\x1f';
  }
  return key;
}
} // namespace

void StopWordLexicon::add(const std::string& word, const std::vector<std::string>& phones) {
  words_.insert(word);
  pronunciations_.insert(key_of(phones));
}

bool StopWordLexicon::matches(const std::vector<std::string>& word_phones) const {
  return pronunciations_.count(key_of(word_phones)) > 0;
}

const StopWordLexicon& StopWordLexicon::defaults() {
  static const StopWordLexicon lex = [] {
    StopWordLexicon l;
    l.add("the", {"dh", "ax"});
    l.add("the", {"dh", "iy"});
    l.add("a", {"ax"});
    l.add("a", {"ey"});
    l.add("an", {"ae", "n"});
    l.add("an", {"ax", "n"});
    l.add("of", {"ax", "v"});
    l.add("of", {"aa", "v"});
    l.add("to", {"t", "ax"});
    l.add("to", {"t", "uw"});
    l.add("in", {"ih", "n"});
    l.add("and", {"ae", "n", "d"});
    l.add("and", {"ax", "n", "d"});
    l.add("is", {"ih", "z"});
    l.add("it", {"ih", "t"});
    l.add("that", {"dh", "ae", "t"});
    l.add("for", {"f", "ao", "r"});
    l.add("for", {"f", "er"});
    l.add("on", {"aa", "n"});
    l.add("on", {"ao", "n"});
    l.add("with", {"w", "ih", "th"});
    l.add("with", {"w", "ih", "dh"});
    l.add("as", {"ae", "z"});
    l.add("as", {"ax", "z"});
    l.add("at", {"ae", "t"});
    l.add("by", {"b", "ay"});
    l.add("be", {"b", "iy"});
    l.add("this", {"dh", "ih", "s"});
    l.add("was", {"w", "aa", "z"});
    l.add("was", {"w", "ax", "z"});
    l.add("were", {"w", "er"});
    l.add("are", {"aa", "r"});
    l.add("or", {"ao", "r"});
    l.add("from", {"f", "r", "ax", "m"});
    l.add("from", {"f", "r", "aa", "m"});
    l.add("but", {"b", "ax", "t"});
    l.add("but", {"b", "ah", "t"});
    l.add("not", {"n", "aa", "t"});
    return l;
  }();
  return lex;
}

StopWordLexicon StopWordLexicon::load(const std::filesystem::path& path) {
  StopWordLexicon l;
  size_t line_no = 0;
  for (const auto& line : util::read_lines(path)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    for (const auto& f : util::split(line, ' '))
      if (!f.empty()) fields.push_back(f);
    // allow tab separation too
    if (fields.size() == 1) {
      fields.clear();
      for (const auto& f : util::split(line, '\t'))
        if (!f.empty()) fields.push_back(f);
    }
    if (fields.size() < 2)
      throw ValidationError(path.string() + " line " + std::to_string(line_no) +
                            ": expected `word phone phone ...`");
    l.add(fields[0], {fields.begin() + 1, fields.end()});
  }
  if (l.size() == 0) throw ValidationError(path.string() + ": empty stop-word file");
  return l;
}

} // namespace sublm::corpus
