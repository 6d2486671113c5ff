#pragma once

// Plain-text outputs: snapshot and trace CSVs. Floating-point values are
// written with 17 significant digits so they parse back bit-exact.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "quench/grid.hpp"
#include "quench/solver.hpp"

namespace quench::io {

inline constexpr std::string_view kSnapshotHeader = "r,u";
inline constexpr std::string_view kTraceHeader = "step,t,dt,sup_u,gap,A,I,boundary_flux,A_running_min";

// "%.17g"
std::string format_double(double x);

std::string snapshot_csv(const RadialField& u);
std::string trace_csv(std::span<const TraceRecord> trace);

// Parses a two-column "r,u" CSV back into (r, value) pairs. Throws
// InvalidArgument on a bad header or malformed row.
std::vector<std::pair<double, double>> parse_profile_csv(std::string_view text);

// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace quench::io
