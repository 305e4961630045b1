#ifndef SYNCSIM_CSV_HPP
#define SYNCSIM_CSV_HPP

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace syncsim {

/// 12 significant digits, locale-independent.
inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

/// CSV with a one-line '#' header carrying provenance and the column schema.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& comment_header,
            const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    out_ << "# " << comment_header << "\n";
    for (size_t i = 0; i < columns.size(); ++i) {
      out_ << (i ? "," : "") << columns[i];
    }
    out_ << "\n";
  }

  void row(const std::vector<double>& values) {
    for (size_t i = 0; i < values.size(); ++i) {
      out_ << (i ? "," : "") << format_number(values[i]);
    }
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

}  // namespace syncsim

#endif
