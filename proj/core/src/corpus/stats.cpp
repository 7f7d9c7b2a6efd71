#include "sublm/corpus/stats.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "sublm/util/io.hpp"

namespace sublm::corpus {

double CorpusStats::top_share(size_t k) const {
  if (total == 0) return 0.0;
  size_t acc = 0;
  for (size_t i = 0; i < std::min(k, counts.size()); ++i) acc += counts[i].second;
  return static_cast<double>(acc) / static_cast<double>(total);
}

CorpusStats corpus_stats(const std::vector<UnitSequence>& seqs) {
  std::map<std::string, size_t> table;
  CorpusStats stats;
  for (const auto& seq : seqs)
    for (const auto& unit : seq.units) {
      ++table[unit.label];
      ++stats.total;
    }
  stats.counts.assign(table.begin(), table.end());
  std::sort(stats.counts.begin(), stats.counts.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return stats;
}

void write_stats_csv(const std::filesystem::path& path, const CorpusStats& stats) {
  std::ostringstream os;
  os << "label,count\n";
  for (const auto& [label, count] : stats.counts) os << label << ',' << count << '\n';
  util::write_text_file(path, os.str());
}

} // namespace sublm::corpus
