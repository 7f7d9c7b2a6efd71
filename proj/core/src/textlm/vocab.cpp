#include "sublm/textlm/vocab.hpp"

#include <sstream>

#include "sublm/error.hpp"
#include "sublm/util/io.hpp"

namespace sublm::textlm {

TokenStream read_token_stream(const std::filesystem::path& path) {
  TokenStream stream;
  for (const auto& line : util::read_lines(path)) {
    std::vector<std::string> tokens;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) tokens.push_back(tok);
    if (!tokens.empty()) stream.push_back(std::move(tokens));
  }
  return stream;
}

void write_token_stream(const std::filesystem::path& path, const TokenStream& stream) {
  std::ostringstream os;
  for (const auto& utt : stream) {
    for (size_t i = 0; i < utt.size(); ++i) os << (i ? " " : "") << utt[i];
    os << '\n';
  }
  util::write_text_file(path, os.str());
}

SubwordVocab SubwordVocab::build(const TokenStream& corpus, size_t min_count) {
  std::map<std::string, size_t> counts;
  for (const auto& utt : corpus)
    for (const auto& tok : utt) ++counts[tok];

  SubwordVocab v;
  v.id_to_label_ = {"<unk>", "<bos>"};
  for (const auto& [label, count] : counts)
    if (count >= min_count) v.id_to_label_.push_back(label);
  for (size_t i = 0; i < v.id_to_label_.size(); ++i) v.label_to_id_[v.id_to_label_[i]] = i;
  return v;
}

SubwordVocab SubwordVocab::load(const std::filesystem::path& path) {
  SubwordVocab v;
  for (const auto& line : util::read_lines(path))
    if (!line.empty()) v.id_to_label_.push_back(line);
  if (v.id_to_label_.size() < 2 || v.id_to_label_[kUnk] != "<unk>" ||
      v.id_to_label_[kBos] != "<bos>")
    throw IoError("vocab file must start with <unk> and <bos>: " + path.string());
  for (size_t i = 0; i < v.id_to_label_.size(); ++i) v.label_to_id_[v.id_to_label_[i]] = i;
  return v;
}

void SubwordVocab::save(const std::filesystem::path& path) const {
  std::ostringstream os;
  for (const auto& label : id_to_label_) os << label << '\n';
  util::write_text_file(path, os.str());
}

const std::string& SubwordVocab::label(size_t id) const {
  if (id >= id_to_label_.size()) throw ValidationError("vocab id out of range");
  return id_to_label_[id];
}

std::vector<size_t> SubwordVocab::encode(const std::vector<std::string>& tokens) const {
  std::vector<size_t> ids;
  ids.reserve(tokens.size());
  for (const auto& tok : tokens) ids.push_back(id(tok));
  return ids;
}

std::vector<std::vector<size_t>> SubwordVocab::encode_stream(const TokenStream& stream) const {
  std::vector<std::vector<size_t>> out;
  out.reserve(stream.size());
  for (const auto& utt : stream) out.push_back(encode(utt));
  return out;
}

} // namespace sublm::textlm
