#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace sublm::textlm {

// Utterances of whitespace-separated unit labels, one utterance per line.
using TokenStream = std::vector<std::vector<std::string>>;

TokenStream read_token_stream(const std::filesystem::path& path);
void write_token_stream(const std::filesystem::path& path, const TokenStream& stream);

class SubwordVocab {
public:
  static constexpr size_t kUnk = 0;
  static constexpr size_t kBos = 1;

  // Built from a training corpus; labels below min_count map to UNK.
  static SubwordVocab build(const TokenStream& corpus, size_t min_count = 2);

  // One label per line, id = line number (specials included).
  static SubwordVocab load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  size_t size() const { return id_to_label_.size(); }
  size_t id(const std::string& label) const {
    auto it = label_to_id_.find(label);
    return it == label_to_id_.end() ? kUnk : it->second;
  }
  const std::string& label(size_t id) const;
  bool contains(const std::string& label) const { return label_to_id_.count(label) > 0; }

  std::vector<size_t> encode(const std::vector<std::string>& tokens) const;
  std::vector<std::vector<size_t>> encode_stream(const TokenStream& stream) const;

private:
  std::vector<std::string> id_to_label_;
  std::map<std::string, size_t> label_to_id_;
};

} // namespace sublm::textlm
