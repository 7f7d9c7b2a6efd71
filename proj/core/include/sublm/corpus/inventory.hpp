#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace sublm::corpus {

// English phone inventory: the CMU consonants plus 16 vowels (the usual 15
// and "ax", which transcripts here keep separate from "ah").
class PhoneInventory {
public:
  static const PhoneInventory& english();

  bool contains(const std::string& phone) const {
    return vowels_.count(phone) > 0 || consonants_.count(phone) > 0;
  }
  bool is_vowel(const std::string& phone) const { return vowels_.count(phone) > 0; }
  bool is_consonant(const std::string& phone) const { return consonants_.count(phone) > 0; }
  bool is_silence(const std::string& phone) const { return phone == "sil"; }

  const std::set<std::string>& vowels() const { return vowels_; }
  const std::set<std::string>& consonants() const { return consonants_; }

  // Vowel class ids for the 16-way probes; fixed, inventory-defined order.
  const std::vector<std::string>& vowel_order() const { return vowel_order_; }
  size_t vowel_id(const std::string& vowel) const;

private:
  std::set<std::string> vowels_;
  std::set<std::string> consonants_;
  std::vector<std::string> vowel_order_;
};

// Words removed during preprocessing, matched against a word's phone string.
// File format: one pronunciation per line, `word phone phone ...`; multiple
// lines per word are allowed.
class StopWordLexicon {
public:
  static const StopWordLexicon& defaults(); // 25 high-frequency function words
  static StopWordLexicon load(const std::filesystem::path& path);

  bool matches(const std::vector<std::string>& word_phones) const;
  size_t size() const { return words_.size(); }

private:
  void add(const std::string& word, const std::vector<std::string>& phones);
  std::set<std::string> words_;
  std::set<std::string> pronunciations_; // phones joined with '\x1f'
};

} // namespace sublm::corpus
