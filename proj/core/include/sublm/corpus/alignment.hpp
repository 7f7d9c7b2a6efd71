#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sublm/corpus/inventory.hpp"

namespace sublm::corpus {

struct PhoneEvent {
  std::string utt_id;
  std::string phone; // lowercase ARPAbet-style label, or "sil"
  double start = 0.0; // seconds
  double end = 0.0;
  int word_index = -1;
};

struct UtteranceAlignment {
  std::string utt_id;
  std::vector<PhoneEvent> events; // time-sorted, non-overlapping
};

// Parses a TSV with columns utt_id, phone, start, end, word_index. Events are
// grouped per utterance (in order of first appearance) and time-sorted;
// overlaps and unknown phone labels are rejected with the offending line.
std::vector<UtteranceAlignment> parse_alignment(const std::filesystem::path& path,
                                                const PhoneInventory& inv = PhoneInventory::english());

void write_alignment(const std::filesystem::path& path,
                     const std::vector<UtteranceAlignment>& alignments);

} // namespace sublm::corpus
