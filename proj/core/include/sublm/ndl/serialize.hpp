#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sublm/ndl/params.hpp"
#include "sublm/util/io.hpp"

namespace sublm::ndl {

// Checkpoint file: magic "SBLM", u32 version=1, u32 header_len, UTF-8 header,
// then all tensors as little-endian f32 in manifest order. The header holds
// key=value fields followed by one "tensor <name> <d0> <d1> ..." line per
// tensor.
inline constexpr uint32_t kCheckpointVersion = 1;

struct CheckpointHeader {
  std::vector<std::pair<std::string, std::string>> fields;
  struct TensorInfo {
    std::string name;
    std::vector<size_t> dims;
  };
  std::vector<TensorInfo> tensors;

  std::string field(const std::string& key, const std::string& fallback = "") const {
    for (const auto& [k, v] : fields)
      if (k == key) return v;
    return fallback;
  }
  bool has_field(const std::string& key) const {
    for (const auto& [k, v] : fields)
      if (k == key) return true;
    return false;
  }
};

namespace detail {

inline std::string render_header(const CheckpointHeader& h) {
  std::ostringstream os;
  for (const auto& [k, v] : h.fields) os << k << "=" << v << "\n";
  for (const auto& t : h.tensors) {
    os << "tensor " << t.name;
    for (size_t d : t.dims) os << " " << d;
    os << "\n";
  }
  return os.str();
}

inline CheckpointHeader parse_header(const std::string& text) {
  CheckpointHeader h;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("tensor ", 0) == 0) {
      std::istringstream ls(line.substr(7));
      CheckpointHeader::TensorInfo info;
      ls >> info.name;
      size_t d;
      while (ls >> d) info.dims.push_back(d);
      if (info.name.empty() || info.dims.empty())
        throw IoError("corrupt checkpoint: bad tensor manifest line");
      h.tensors.push_back(std::move(info));
    } else {
      auto eq = line.find('=');
      if (eq == std::string::npos) throw IoError("corrupt checkpoint: bad header line");
      h.fields.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
  }
  return h;
}

inline CheckpointHeader read_header(std::istream& is, const std::filesystem::path& path) {
  char magic[4];
  is.read(magic, 4);
  if (is.gcount() != 4 || std::string(magic, 4) != "SBLM")
    throw IoError("corrupt checkpoint (bad magic): " + path.string());
  const uint32_t version = util::read_u32(is, "checkpoint version");
  if (version != kCheckpointVersion)
    throw IoError("unsupported checkpoint version " + std::to_string(version) + ": " +
                  path.string());
  const uint32_t header_len = util::read_u32(is, "checkpoint header length");
  std::string header(header_len, '\0');
  is.read(header.data(), header_len);
  if (static_cast<uint32_t>(is.gcount()) != header_len)
    throw IoError("corrupt checkpoint (truncated header): " + path.string());
  return parse_header(header);
}

} // namespace detail

template <typename T>
void save_checkpoint(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, std::string>>& fields,
                     const NamedParamList<T>& params) {
  CheckpointHeader h;
  h.fields = fields;
  for (const auto& p : params) h.tensors.push_back({p.name, p.value->shape});
  const std::string header = detail::render_header(h);

  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write checkpoint: " + path.string());
  os.write("SBLM", 4);
  util::write_u32(os, kCheckpointVersion);
  util::write_u32(os, static_cast<uint32_t>(header.size()));
  os.write(header.data(), static_cast<std::streamsize>(header.size()));
  std::vector<float> buf;
  for (const auto& p : params) {
    buf.resize(p.value->size());
    for (size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(p.value->data[i]);
    util::write_f32_array(os, buf.data(), buf.size());
  }
  if (!os) throw IoError("write failed: " + path.string());
}

// Header without tensor payload.
inline CheckpointHeader peek_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint: " + path.string());
  return detail::read_header(is, path);
}

// Loads into an existing parameter list; names, order and shapes must match
// the file's manifest exactly.
template <typename T>
CheckpointHeader load_checkpoint(const std::filesystem::path& path, NamedParamList<T>& params) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint: " + path.string());
  CheckpointHeader h = detail::read_header(is, path);

  if (h.tensors.size() != params.size())
    throw IoError("checkpoint manifest mismatch: expected " + std::to_string(params.size()) +
                  " tensors, file has " + std::to_string(h.tensors.size()));
  for (size_t k = 0; k < params.size(); ++k) {
    if (h.tensors[k].name != params[k].name || h.tensors[k].dims != params[k].value->shape)
      throw IoError("checkpoint manifest mismatch at tensor '" + h.tensors[k].name +
                    "' (model expects '" + params[k].name + "')");
  }
  std::vector<float> buf;
  for (auto& p : params) {
    buf.resize(p.value->size());
    util::read_f32_array(is, buf.data(), buf.size(), "checkpoint tensor data");
    for (size_t i = 0; i < buf.size(); ++i) p.value->data[i] = static_cast<T>(buf[i]);
  }
  return h;
}

} // namespace sublm::ndl
