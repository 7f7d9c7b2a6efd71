#include "sublm/dsp/audio.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "sublm/error.hpp"
#include "sublm/util/io.hpp"

namespace sublm::dsp {

namespace {

uint16_t read_u16_le(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

} // namespace

AudioBuffer load_wav(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open wav file: " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw IoError("malformed wav header (not RIFF/WAVE): " + path.string());

  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  const unsigned char* data_ptr = nullptr;
  uint32_t data_len = 0;
  bool have_data = false;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* chunk_id = reinterpret_cast<const char*>(bytes.data() + pos);
    const uint32_t chunk_len = read_u32_le(bytes.data() + pos + 4);
    const size_t body = pos + 8;
    if (body + chunk_len > bytes.size())
      throw IoError("malformed wav (chunk overruns file): " + path.string());
    if (std::memcmp(chunk_id, "fmt ", 4) == 0) {
      if (chunk_len < 16) throw IoError("malformed wav fmt chunk: " + path.string());
      format = read_u16_le(bytes.data() + body);
      channels = read_u16_le(bytes.data() + body + 2);
      sample_rate = read_u32_le(bytes.data() + body + 4);
      bits = read_u16_le(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk_id, "data", 4) == 0) {
      data_ptr = bytes.data() + body;
      data_len = chunk_len;
      have_data = true;
    }
    pos = body + chunk_len + (chunk_len & 1); // chunks are word-aligned
  }

  if (!have_fmt || !have_data) throw IoError("malformed wav (missing chunk): " + path.string());
  if (format != 1 || channels != 1 || bits != 16)
    throw ValidationError("unsupported wav format (need PCM16 mono): " + path.string() +
                          " format=" + std::to_string(format) +
                          " channels=" + std::to_string(channels) + " bits=" + std::to_string(bits));

  AudioBuffer audio;
  audio.sample_rate = static_cast<int>(sample_rate);
  const size_t n = data_len / 2;
  audio.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const int16_t s = static_cast<int16_t>(read_u16_le(data_ptr + 2 * i));
    audio.samples[i] = static_cast<double>(s) / 32768.0;
  }
  return audio;
}

void save_wav(const std::filesystem::path& path, const AudioBuffer& audio) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write wav file: " + path.string());
  const uint32_t data_len = static_cast<uint32_t>(audio.samples.size() * 2);
  const uint32_t sr = static_cast<uint32_t>(audio.sample_rate);

  f.write("RIFF", 4);
  util::write_u32(f, 36 + data_len);
  f.write("WAVE", 4);
  f.write("fmt ", 4);
  util::write_u32(f, 16);
  const unsigned char fmt_tail[4] = {1, 0, 1, 0}; // PCM, mono
  f.write(reinterpret_cast<const char*>(fmt_tail), 4);
  util::write_u32(f, sr);
  util::write_u32(f, sr * 2); // byte rate
  const unsigned char align[4] = {2, 0, 16, 0}; // block align 2, 16 bits
  f.write(reinterpret_cast<const char*>(align), 4);
  f.write("data", 4);
  util::write_u32(f, data_len);

  for (double s : audio.samples) {
    const double clamped = std::max(-1.0, std::min(1.0, s));
    const int16_t q = static_cast<int16_t>(std::lrint(clamped * 32767.0));
    const unsigned char b[2] = {static_cast<unsigned char>(q & 0xff),
                                static_cast<unsigned char>((q >> 8) & 0xff)};
    f.write(reinterpret_cast<const char*>(b), 2);
  }
  if (!f) throw IoError("write failed: " + path.string());
}

} // namespace sublm::dsp
