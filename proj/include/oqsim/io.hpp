#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace oqsim {

// 17 significant digits via std::to_chars: locale-independent, round-trip
// exact, byte-stable across reruns.
std::string format_double(double value);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

// Comma-separated, LF line endings, one optional '#' metadata comment line
// above the header row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& meta,
            const std::vector<std::string>& header);

  template <typename T>
  static std::string cell(const T& value) {
    if constexpr (std::is_same_v<T, double> || std::is_same_v<T, float>) {
      return format_double(value);
    } else if constexpr (std::is_integral_v<T>) {
      return std::to_string(value);
    } else {
      return std::string(value);
    }
  }

  template <typename... Ts>
  void row(const Ts&... cells) {
    raw_row({cell(cells)...});
  }

  void raw_row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
};

}  // namespace oqsim
