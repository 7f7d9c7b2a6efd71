#include "sublm/corpus/alignment.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "sublm/error.hpp"
#include "sublm/util/io.hpp"

namespace sublm::corpus {

std::vector<UtteranceAlignment> parse_alignment(const std::filesystem::path& path,
                                                const PhoneInventory& inv) {
  const auto lines = util::read_lines(path);
  std::vector<UtteranceAlignment> out;
  std::map<std::string, size_t> index_of;

  size_t line_no = 0;
  for (const auto& line : lines) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = util::split(line, '\t');
    if (fields.size() != 5)
      throw ValidationError(path.string() + " line " + std::to_string(line_no) +
                            ": expected 5 tab-separated fields");
    PhoneEvent ev;
    ev.utt_id = fields[0];
    ev.phone = fields[1];
    try {
      ev.start = std::stod(fields[2]);
      ev.end = std::stod(fields[3]);
      ev.word_index = std::stoi(fields[4]);
    } catch (const std::exception&) {
      throw ValidationError(path.string() + " line " + std::to_string(line_no) +
                            ": malformed numeric field");
    }
    if (!(ev.end > ev.start) || ev.start < 0.0)
      throw ValidationError(path.string() + " line " + std::to_string(line_no) +
                            ": need 0 <= start < end");
    if (!inv.contains(ev.phone) && !inv.is_silence(ev.phone))
      throw ValidationError(path.string() + " line " + std::to_string(line_no) +
                            ": phone '" + ev.phone + "' not in inventory (utt " + ev.utt_id + ")");

    auto [it, inserted] = index_of.try_emplace(ev.utt_id, out.size());
    if (inserted) out.push_back({ev.utt_id, {}});
    out[it->second].events.push_back(std::move(ev));
  }

  constexpr double kEps = 1e-9;
  for (auto& utt : out) {
    std::stable_sort(utt.events.begin(), utt.events.end(),
                     [](const PhoneEvent& a, const PhoneEvent& b) { return a.start < b.start; });
    for (size_t i = 1; i < utt.events.size(); ++i) {
      if (utt.events[i - 1].end > utt.events[i].start + kEps)
        throw ValidationError(path.string() + ": overlapping events in utterance '" + utt.utt_id +
                              "' around t=" + std::to_string(utt.events[i].start));
    }
  }
  return out;
}

void write_alignment(const std::filesystem::path& path,
                     const std::vector<UtteranceAlignment>& alignments) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed;
  for (const auto& utt : alignments)
    for (const auto& ev : utt.events)
      os << ev.utt_id << '\t' << ev.phone << '\t' << ev.start << '\t' << ev.end << '\t'
         << ev.word_index << '\n';
  util::write_text_file(path, os.str());
}

} // namespace sublm::corpus
