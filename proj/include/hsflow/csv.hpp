#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "hsflow/config.hpp"

namespace hsflow {

/// Long-format CSV with a provenance header: '#'-prefixed lines carrying the
/// tool version and config hash, then one column-name row.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const ExperimentConfig& cfg, const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
    out_ << "# hsflow " << kVersion << " config_hash=" << config_hash(cfg) << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
  }

  CsvWriter& row(std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& c : cells) {
      out_ << (first ? "" : ",") << c;
      first = false;
    }
    out_ << "\n";
    return *this;
  }

 private:
  std::ofstream out_;
};

/// Fixed-format number for tables (%.10e; locale independent for these values).
inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

inline std::string num(std::size_t v) { return std::to_string(v); }
inline std::string num(int v) { return std::to_string(v); }
inline std::string flag(bool b) { return b ? "1" : "0"; }

}  // namespace hsflow
