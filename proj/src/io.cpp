#include "oqsim/io.hpp"

#include <charconv>
#include <system_error>

#include "oqsim/errors.hpp"

namespace oqsim {

std::string format_double(double value) {
  char buffer[64];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
  if (result.ec != std::errc()) throw NumericalError("format_double: conversion failed");
  return std::string(buffer, result.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  static const char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& meta,
                     const std::vector<std::string>& header)
    : out_(path, std::ios::binary) {
  if (!out_) throw ConfigError("cannot open output file " + path.string());
  if (!meta.empty()) out_ << "# " << meta << "\n";
  raw_row(header);
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

}  // namespace oqsim
