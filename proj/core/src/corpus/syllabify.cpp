#include "sublm/corpus/syllabify.hpp"

#include <set>

#include "sublm/error.hpp"
#include "sublm/util/io.hpp"

namespace sublm::corpus {

namespace {

const std::set<std::string>& legal_onsets() {
  // Joined with '.'; singles cover every consonant except "ng", which never
  // starts an English syllable.
  static const std::set<std::string> onsets = [] {
    std::set<std::string> s;
    for (const auto& c : PhoneInventory::english().consonants())
      if (c != "ng") s.insert(c);
    const char* doubles[] = {
        "p.l", "p.r", "p.y", "b.l", "b.r", "b.y", "t.r", "t.w", "t.y", "d.r", "d.w", "d.y",
        "k.l", "k.r", "k.w", "k.y", "g.l", "g.r", "g.w", "g.y", "f.l", "f.r", "f.y", "v.y",
        "th.r", "th.w", "th.y", "sh.r", "s.l", "s.w", "s.m", "s.n", "s.p", "s.t", "s.k",
        "s.f", "m.y", "n.y", "hh.y", "hh.w"};
    const char* triples[] = {"s.p.l", "s.p.r", "s.p.y", "s.t.r", "s.t.y",
                             "s.k.l", "s.k.r", "s.k.w", "s.k.y"};
    for (const char* d : doubles) s.insert(d);
    for (const char* t : triples) s.insert(t);
    return s;
  }();
  return onsets;
}

std::string join_cluster(const std::vector<std::string>& cluster, size_t begin, size_t end) {
  std::string key;
  for (size_t i = begin; i < end; ++i) {
    if (i > begin) key += '.';
    key += cluster[i];
  }
  return key;
}

} // namespace

bool is_legal_onset(const std::vector<std::string>& cluster) {
  if (cluster.empty()) return true;
  return legal_onsets().count(join_cluster(cluster, 0, cluster.size())) > 0;
}

std::vector<SyllableParts> syllabify(const std::vector<std::string>& word_phones,
                                     const PhoneInventory& inv) {
  std::vector<size_t> vowel_pos;
  for (size_t i = 0; i < word_phones.size(); ++i) {
    const auto& p = word_phones[i];
    if (!inv.contains(p))
      throw ValidationError("syllabify: phone '" + p + "' not in inventory");
    if (inv.is_vowel(p)) vowel_pos.push_back(i);
  }
  if (vowel_pos.empty())
    throw NoNucleusError("syllabify: word has no vowel nucleus");

  std::vector<SyllableParts> syllables(vowel_pos.size());
  for (size_t s = 0; s < vowel_pos.size(); ++s) syllables[s].nucleus = word_phones[vowel_pos[s]];

  // word-initial consonants
  syllables.front().onset.assign(word_phones.begin(),
                                 word_phones.begin() + static_cast<ptrdiff_t>(vowel_pos.front()));
  // word-final consonants
  syllables.back().coda.assign(word_phones.begin() + static_cast<ptrdiff_t>(vowel_pos.back() + 1),
                               word_phones.end());

  // intervocalic clusters: longest legal-onset suffix goes right
  for (size_t s = 0; s + 1 < vowel_pos.size(); ++s) {
    std::vector<std::string> cluster(
        word_phones.begin() + static_cast<ptrdiff_t>(vowel_pos[s] + 1),
        word_phones.begin() + static_cast<ptrdiff_t>(vowel_pos[s + 1]));
    size_t cut = cluster.size(); // onset = cluster[cut:], coda = cluster[:cut]
    for (size_t start = 0; start < cluster.size(); ++start) {
      if (legal_onsets().count(join_cluster(cluster, start, cluster.size())) > 0) {
        cut = start;
        break;
      }
    }
    syllables[s].coda.assign(cluster.begin(), cluster.begin() + static_cast<ptrdiff_t>(cut));
    syllables[s + 1].onset.assign(cluster.begin() + static_cast<ptrdiff_t>(cut), cluster.end());
  }
  return syllables;
}

} // namespace sublm::corpus
