#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "vdcsim/sim.hpp"

namespace vdcsim {

/// Append-only CSV sink. Values are printed with %.17g so traces round-trip
/// exactly and identical runs produce byte-identical files.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  bool is_open() const { return out_.is_open(); }

 private:
  std::ofstream out_;
  size_t columns_ = 0;
};

std::string summary_to_json(const RunSummary& summary);
void write_summary_json(const RunSummary& summary, const std::string& path);

}  // namespace vdcsim
