#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tuplespec::util {

// ASCII case folding. Corpus tokens are English; full Unicode folding is not
// needed for modal/cue matching.
std::string lower_ascii(const std::string& s);

std::vector<std::string> split(const std::string& s, char sep);
std::vector<std::string> split_ws(const std::string& s);
std::string join(const std::vector<std::string>& parts, const std::string& sep);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// Hex-encoded SHA-256 digests (OpenSSL EVP).
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

uint64_t fnv1a64(const std::string& s);

std::string iso8601_now();

// Round to one decimal, half away from zero. Report convention for scores.
double round1(double x);

}  // namespace tuplespec::util
