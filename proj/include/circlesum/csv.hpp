#pragma once

// CSV output with shortest round-trip numeric formatting, so identical runs
// produce byte-identical files.

#include <charconv>
#include <complex>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace circlesum {

inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc())
    throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

inline std::string format_long_double(long double v) {
  return format_double(static_cast<double>(v));
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open " + path);
  }

  void row(const std::vector<std::string>& fields) {
    bool first = true;
    for (const auto& f : fields) {
      if (!first) out_ << ',';
      first = false;
      out_ << f;
    }
    out_ << '\n';
  }

  void close() { out_.close(); }

 private:
  std::ofstream out_;
};

}  // namespace circlesum
