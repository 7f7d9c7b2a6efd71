#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace sublm::artic {

inline constexpr size_t kNumFeatures = 22;
inline constexpr size_t kSyllableDim = 3 * kNumFeatures; // onset | nucleus | coda

// Feature order used throughout the project and in the CSV table.
const std::array<std::string, kNumFeatures>& feature_names();

using FeatureVector = std::array<int8_t, kNumFeatures>;   // values in {-1, 0, +1}
using BinaryVector = std::vector<float>;                  // values in {0, 1}

// Phone -> 22 ternary articulatory features. The default table is frozen into
// the binary (same content as data/artic_features.csv); a custom table can be
// loaded from a CSV with header `phone,<22 feature names>`.
class ArticTable {
public:
  static const ArticTable& builtin();
  static ArticTable load(const std::filesystem::path& csv_path);
  static ArticTable parse_csv(const std::string& text, const std::string& origin);

  const FeatureVector& features(const std::string& phone) const;
  bool contains(const std::string& phone) const { return table_.count(phone) > 0; }
  bool is_vowel(const std::string& phone) const; // syl == +1
  size_t size() const { return table_.size(); }
  size_t feature_index(const std::string& name) const;

private:
  std::map<std::string, FeatureVector> table_;
};

// Table lookup; unknown phone raises an inventory error.
const FeatureVector& phone_features(const std::string& phone, const ArticTable& table);

// Elementwise max over consonant feature vectors; empty cluster is all-zero.
FeatureVector pool_cluster(const std::vector<std::string>& phones, const ArticTable& table);

// [pool(onset) | features(nucleus) | pool(coda)], binarized +1 -> 1, else 0.
BinaryVector syllable_vector(const std::vector<std::string>& onset, const std::string& nucleus,
                             const std::vector<std::string>& coda, const ArticTable& table);

// Binarized 22-dim vector for a single phone (phoneme-level units).
BinaryVector phone_vector_binary(const std::string& phone, const ArticTable& table);

} // namespace sublm::artic
