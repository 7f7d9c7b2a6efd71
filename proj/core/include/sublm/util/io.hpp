#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace sublm::util {

// Little-endian binary primitives. The host is assumed little-endian for
// the fast path; byte-level writes keep the files portable regardless.
void write_u32(std::ostream& os, uint32_t v);
void write_f32(std::ostream& os, float v);
void write_f64(std::ostream& os, double v);
uint32_t read_u32(std::istream& is, const char* what);
float read_f32(std::istream& is, const char* what);
double read_f64(std::istream& is, const char* what);
void write_f32_array(std::ostream& os, const float* data, size_t n);
void read_f32_array(std::istream& is, float* data, size_t n, const char* what);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::vector<std::string> read_lines(const std::filesystem::path& path);

// Splits on a delimiter, keeping empty fields.
std::vector<std::string> split(const std::string& s, char delim);
std::string join(const std::vector<std::string>& parts, const std::string& sep);

// SHA-1 in git blob style ("blob <len>\0<content>"), hex-encoded.
// Used to stamp run directories with a content hash of their inputs.
std::string sha1_hex(const std::string& bytes);
std::string git_blob_hash(const std::filesystem::path& path);

} // namespace sublm::util
