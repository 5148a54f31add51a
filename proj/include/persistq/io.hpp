#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "json.hpp"

namespace persistq::io {

/// Formats a double with 17 significant digits (round-trippable, diffable).
std::string format_value(double v);

/// Single-header-row CSV writer with fixed 17-significant-digit values.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void close();

 private:
  std::ofstream out_;
  std::string path_;
  std::size_t columns_ = 0;
};

/// Pretty-printed JSON with sorted keys written atomically enough for tests.
void write_json(const std::string& path, const nlohmann::json& j);

/// <outdir>/<name>-<stamp>.<ext>; creates outdir if missing.
std::string output_path(const std::string& outdir, const std::string& name,
                        const std::string& stamp, const std::string& ext);

/// UTC timestamp like 20260810T120000Z for default output names.
std::string utc_stamp();

}  // namespace persistq::io
