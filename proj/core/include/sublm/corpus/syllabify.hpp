#pragma once

#include <string>
#include <vector>

#include "sublm/corpus/inventory.hpp"

namespace sublm::corpus {

struct SyllableParts {
  std::vector<std::string> onset;
  std::string nucleus; // exactly one vowel
  std::vector<std::string> coda;

  std::vector<std::string> phones() const {
    std::vector<std::string> all = onset;
    all.push_back(nucleus);
    all.insert(all.end(), coda.begin(), coda.end());
    return all;
  }
};

// Splits a word's phones into syllables. Word-initial consonants join the
// first onset and word-final consonants the last coda; an intervocalic
// cluster is cut so that its longest suffix forming a legal English onset
// starts the next syllable and the remainder closes the previous one
// ("printing" -> p.r.ih.n | t.ih.n.g). Throws NoNucleusError for vowel-less
// words.
std::vector<SyllableParts> syllabify(const std::vector<std::string>& word_phones,
                                     const PhoneInventory& inv = PhoneInventory::english());

// True when the cluster can legally start an English syllable.
bool is_legal_onset(const std::vector<std::string>& cluster);

} // namespace sublm::corpus
