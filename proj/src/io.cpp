#include "persistq/io.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>

#include "persistq/errors.hpp"

namespace persistq::io {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path), path_(path) {
  if (!out_) throw IoError("cannot open " + path + " for writing");
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  columns_ = columns.size();
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (columns_ != 0 && values.size() != columns_)
    throw IoError("CSV row width does not match header in " + path_);
  for (std::size_t i = 0; i < values.size(); ++i)
    out_ << (i ? "," : "") << format_value(values[i]);
  out_ << "\n";
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw IoError("failed writing " + path_);
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing " + path);
}

std::string output_path(const std::string& outdir, const std::string& name,
                        const std::string& stamp, const std::string& ext) {
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw IoError("cannot create output directory " + outdir);
  return outdir + "/" + name + "-" + stamp + "." + ext;
}

std::string utc_stamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

}  // namespace persistq::io
