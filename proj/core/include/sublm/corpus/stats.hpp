#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sublm/corpus/units.hpp"

namespace sublm::corpus {

// Unit-label frequency table, sorted by descending count (ties by label).
struct CorpusStats {
  std::vector<std::pair<std::string, size_t>> counts;
  size_t total = 0;

  // combined share of the k most frequent labels, in [0, 1]
  double top_share(size_t k) const;
};

CorpusStats corpus_stats(const std::vector<UnitSequence>& seqs);

// CSV `label,count`.
void write_stats_csv(const std::filesystem::path& path, const CorpusStats& stats);

} // namespace sublm::corpus
