#include "quench/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "quench/error.hpp"

namespace quench::io {

namespace {

double parse_number(std::string_view field, std::size_t line) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw InvalidArgument(fmt::format("line {}: cannot parse number '{}'", line, field));
  }
  return x;
}

}  // namespace

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

std::string snapshot_csv(const RadialField& u) {
  std::string out(kSnapshotHeader);
  out += '\n';
  for (std::size_t i = 0; i < u.size(); ++i) {
    out += format_double(u.grid().node(i));
    out += ',';
    out += format_double(u[i]);
    out += '\n';
  }
  return out;
}

std::string trace_csv(std::span<const TraceRecord> trace) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const TraceRecord& r : trace) {
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.step, r.t, r.dt,
                       r.sup_u, r.gap, r.A, r.I, r.boundary_flux, r.A_running_min);
  }
  return out;
}

std::vector<std::pair<double, double>> parse_profile_csv(std::string_view text) {
  std::vector<std::pair<double, double>> rows;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kSnapshotHeader) throw InvalidArgument(fmt::format("line {}: expected header '{}'", line_no, kSnapshotHeader));
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) throw InvalidArgument(fmt::format("line {}: expected two columns", line_no));
    rows.emplace_back(parse_number(line.substr(0, comma), line_no), parse_number(line.substr(comma + 1), line_no));
  }
  if (!header_seen) throw InvalidArgument("empty profile file");
  return rows;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot open {} for writing", tmp.string()));
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(fmt::format("write to {} failed", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace quench::io
