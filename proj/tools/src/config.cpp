#include "quench/app/config.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <cmath>

#include <fmt/format.h>

#include "quench/io.hpp"

namespace quench::app {

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
};

const std::vector<std::string_view>& known_keys() {
  static const std::vector<std::string_view> keys{
      "mode",        "n",            "R",           "lambda",        "chi",          "initial",
      "initial_file", "a",           "b",           "M",             "safety",       "dt_max",
      "quench_tol",  "t_max",        "steady_tol",  "residual_interval", "trace_stride", "max_bisections",
      "snapshot_gaps", "beta",       "lambda_factor", "upper_initial", "upper_initial_file", "upper_a",
      "M_list",      "lambda_min",   "lambda_max",  "lambda_count",  "chi_min",      "chi_max",
      "chi_count",   "workers",      "output_dir"};
  return keys;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

class Reader {
public:
  Reader(std::map<std::string, Entry, std::less<>> entries, std::size_t last_line)
      : entries_(std::move(entries)), last_line_(last_line) {}

  bool has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

  std::size_t line(std::string_view key) const { return entries_.find(key)->second.line; }

  [[noreturn]] void fail(std::string_view key, std::string_view what) const {
    throw ConfigError(fmt::format("line {}: {}: {}", line(key), key, what));
  }

  void require(std::string_view key) const {
    if (!has(key)) throw ConfigError(fmt::format("line {}: missing required key '{}'", last_line_, key));
  }

  std::string text(std::string_view key, std::string fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = entries_.find(key)->second.value;
    if (v.empty()) fail(key, "empty value");
    return v;
  }

  double real(std::string_view key, double fallback) const {
    if (!has(key)) return fallback;
    return parse_real(key, entries_.find(key)->second.value);
  }

  long integer(std::string_view key, long fallback) const {
    if (!has(key)) return fallback;
    return parse_integer(key, entries_.find(key)->second.value);
  }

  std::vector<double> reals(std::string_view key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (std::string_view f : split_list(entries_.find(key)->second.value)) out.push_back(parse_real(key, f));
    return out;
  }

  std::vector<long> integers(std::string_view key, std::vector<long> fallback) const {
    if (!has(key)) return fallback;
    std::vector<long> out;
    for (std::string_view f : split_list(entries_.find(key)->second.value)) out.push_back(parse_integer(key, f));
    return out;
  }

private:
  double parse_real(std::string_view key, std::string_view s) const {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x)) {
      fail(key, fmt::format("'{}' is not a number", s));
    }
    return x;
  }

  long parse_integer(std::string_view key, std::string_view s) const {
    long x = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      fail(key, fmt::format("'{}' is not an integer", s));
    }
    return x;
  }

  std::map<std::string, Entry, std::less<>> entries_;
  std::size_t last_line_;
};

std::optional<Mode> mode_from(std::string_view s) {
  for (Mode m : {Mode::lemma7, Mode::theorem8, Mode::theorem9, Mode::comparison, Mode::convergence, Mode::sweep}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

InitialData load_initial(const Reader& in, const std::filesystem::path& base_dir, std::string_view kind_key,
                         const std::string& kind, std::string_view file_key, const std::string& file, double a,
                         double b) {
  if (kind == "zero") return InitialData::zero(a);
  if (kind == "parabolic") return InitialData::parabolic(a);
  if (kind == "file") {
    if (file.empty()) throw ConfigError(fmt::format("line {}: {} = file needs {}", in.line(kind_key), kind_key, file_key));
    const std::filesystem::path path = std::filesystem::path(file).is_absolute() ? std::filesystem::path(file) : base_dir / file;
    try {
      return InitialData::sampled(io::parse_profile_csv(io::read_file(path)), a, b);
    } catch (const InvalidArgument& e) {
      throw ConfigError(fmt::format("line {}: {}: {}", in.line(file_key), path.string(), e.what()));
    }
  }
  throw ConfigError(fmt::format("line {}: {}: expected zero, parabolic or file, got '{}'", in.line(kind_key), kind_key, kind));
}

std::string join(const auto& xs, auto&& fmt_one) {
  std::string out;
  for (const auto& x : xs) {
    if (!out.empty()) out += ',';
    out += fmt_one(x);
  }
  return out;
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::lemma7: return "lemma7";
    case Mode::theorem8: return "theorem8";
    case Mode::theorem9: return "theorem9";
    case Mode::comparison: return "comparison";
    case Mode::convergence: return "convergence";
    case Mode::sweep: return "sweep";
  }
  return "unknown";
}

std::vector<double> Range::values() const {
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return out;
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  std::map<std::string, Entry, std::less<>> entries;
  const auto& keys = known_keys();
  std::size_t line_no = 0;
  while (!text.empty() || line_no == 0) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(fmt::format("line {}: expected key = value", line_no));
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(fmt::format("line {}: unknown key '{}'", line_no, key));
    }
    if (auto it = entries.find(key); it != entries.end()) {
      throw ConfigError(fmt::format("duplicate key at line {}: '{}' already set at line {}", line_no, key, it->second.line));
    }
    entries.emplace(std::string(key), Entry{std::string(value), line_no});
  }
  const Reader in(std::move(entries), line_no + 1);

  RunConfig cfg;
  cfg.base_dir = base_dir;

  in.require("mode");
  const std::string mode = in.text("mode", "");
  const auto m = mode_from(mode);
  if (!m) in.fail("mode", fmt::format("unknown scenario '{}'", mode));
  cfg.mode = *m;

  in.require("n");
  in.require("R");
  if (cfg.mode != Mode::sweep) {
    in.require("lambda");
    in.require("chi");
  }

  ProblemParams& p = cfg.problem;
  const long n = in.integer("n", 1);
  if (n < 1 || n > 3) in.fail("n", "dimension must be 1, 2 or 3");
  p.n = static_cast<int>(n);
  p.R = in.real("R", 1.0);
  if (!(p.R > 0.0)) in.fail("R", "must be > 0");
  p.lambda = in.real("lambda", 0.0);
  if (p.lambda < 0.0) in.fail("lambda", "must be >= 0");
  p.chi = in.real("chi", 0.0);
  if (p.chi < 0.0) in.fail("chi", "must be >= 0");

  const double a = in.real("a", 0.5);
  if (!(a > 0.0 && a < 1.0)) in.fail("a", "must lie in (0, 1)");
  const double b = in.real("b", 0.0);
  if (b < 0.0) in.fail("b", "must be >= 0");
  cfg.initial = in.text("initial", "zero");
  cfg.initial_file = in.text("initial_file", "");
  p.initial = load_initial(in, base_dir, "initial", cfg.initial, "initial_file", cfg.initial_file, a, b);

  const long M = in.integer("M", 201);
  if (M < static_cast<long>(kMinGridNodes)) in.fail("M", fmt::format("must be >= {}", kMinGridNodes));
  cfg.M = static_cast<std::size_t>(M);

  StepControl& c = cfg.control;
  c.safety = in.real("safety", 0.25);
  if (!(c.safety > 0.0 && c.safety <= 1.0)) in.fail("safety", "must lie in (0, 1]");
  c.dt_max = in.real("dt_max", c.dt_max);
  if (!(c.dt_max > 0.0)) in.fail("dt_max", "must be > 0");
  c.quench_tol = in.real("quench_tol", 1e-3);
  if (!(c.quench_tol > 0.0 && c.quench_tol < 1.0)) in.fail("quench_tol", "must lie in (0, 1)");
  c.t_max = in.real("t_max", c.t_max);
  if (!(c.t_max > 0.0)) in.fail("t_max", "must be > 0");
  c.steady_tol = in.real("steady_tol", c.steady_tol);
  if (c.steady_tol < 0.0) in.fail("steady_tol", "must be >= 0");
  const long interval = in.integer("residual_interval", static_cast<long>(c.residual_interval));
  if (interval < 1) in.fail("residual_interval", "must be >= 1");
  c.residual_interval = static_cast<std::size_t>(interval);
  const long stride = in.integer("trace_stride", static_cast<long>(c.trace_stride));
  if (stride < 1) in.fail("trace_stride", "must be >= 1");
  c.trace_stride = static_cast<std::size_t>(stride);
  const long bisections = in.integer("max_bisections", c.max_bisections);
  if (bisections < 1 || bisections > 1000) in.fail("max_bisections", "must lie in [1, 1000]");
  c.max_bisections = static_cast<int>(bisections);
  c.snapshot_gaps = in.reals("snapshot_gaps", {0.5, 0.25, 0.1, 0.05, 0.02, 0.01});
  for (double g : c.snapshot_gaps) {
    if (!(g > 0.0 && g < 1.0)) in.fail("snapshot_gaps", fmt::format("gap {} not in (0, 1)", g));
  }

  cfg.beta = in.real("beta", 2.5);
  if (!(cfg.beta > 2.0 && cfg.beta < 3.0)) in.fail("beta", "profile exponent beta must lie in (2, 3)");
  cfg.lambda_factor = in.real("lambda_factor", 1.1);
  if (!(cfg.lambda_factor >= 1.1)) in.fail("lambda_factor", "must be >= 1.1");

  const double upper_a = in.real("upper_a", 0.1);
  if (!(upper_a > 0.0 && upper_a < 1.0)) in.fail("upper_a", "must lie in (0, 1)");
  cfg.upper_initial = in.text("upper_initial", "parabolic");
  cfg.upper_initial_file = in.text("upper_initial_file", "");
  cfg.upper = load_initial(in, base_dir, "upper_initial", cfg.upper_initial, "upper_initial_file",
                           cfg.upper_initial_file, upper_a, 0.0);

  const std::vector<long> Ms = in.integers("M_list", {101, 201, 401});
  if (Ms.size() < 3) in.fail("M_list", "needs at least 3 grid sizes");
  cfg.M_list.clear();
  for (std::size_t k = 0; k < Ms.size(); ++k) {
    if (Ms[k] < static_cast<long>(kMinGridNodes)) in.fail("M_list", fmt::format("grid size {} below {}", Ms[k], kMinGridNodes));
    if (k > 0 && Ms[k] <= Ms[k - 1]) in.fail("M_list", "grid sizes must increase strictly");
    cfg.M_list.push_back(static_cast<std::size_t>(Ms[k]));
  }

  auto range = [&](std::string_view lo_key, std::string_view hi_key, std::string_view count_key, Range fallback) {
    Range r;
    r.lo = in.real(lo_key, fallback.lo);
    r.hi = in.real(hi_key, fallback.hi);
    const long count = in.integer(count_key, static_cast<long>(fallback.count));
    if (r.lo < 0.0) in.fail(lo_key, "must be >= 0");
    if (r.hi < r.lo) in.fail(in.has(hi_key) ? hi_key : lo_key, "range is empty");
    if (count < 1 || count > 4096) in.fail(count_key, "must lie in [1, 4096]");
    r.count = static_cast<std::size_t>(count);
    return r;
  };
  cfg.lambda_range = range("lambda_min", "lambda_max", "lambda_count", cfg.lambda_range);
  cfg.chi_range = range("chi_min", "chi_max", "chi_count", cfg.chi_range);

  const long workers = in.integer("workers", 1);
  if (workers < 1 || workers > 256) in.fail("workers", "must lie in [1, 256]");
  cfg.workers = static_cast<std::size_t>(workers);

  cfg.output_dir = in.text("output_dir", "out");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

std::vector<std::pair<std::string, std::string>> RunConfig::resolved() const {
  const auto d = [](double x) { return io::format_double(x); };
  const auto z = [](std::size_t x) { return std::to_string(x); };
  const ProblemParams& p = problem;
  const StepControl& c = control;
  return {
      {"mode", to_string(mode)},
      {"n", std::to_string(p.n)},
      {"R", d(p.R)},
      {"lambda", d(p.lambda)},
      {"chi", d(p.chi)},
      {"initial", initial},
      {"initial_file", initial_file},
      {"a", d(p.initial.a)},
      {"b", d(p.initial.b)},
      {"M", z(M)},
      {"safety", d(c.safety)},
      {"dt_max", d(c.dt_max)},
      {"quench_tol", d(c.quench_tol)},
      {"t_max", d(c.t_max)},
      {"steady_tol", d(c.steady_tol)},
      {"residual_interval", z(c.residual_interval)},
      {"trace_stride", z(c.trace_stride)},
      {"max_bisections", std::to_string(c.max_bisections)},
      {"snapshot_gaps", join(c.snapshot_gaps, d)},
      {"beta", d(beta)},
      {"lambda_factor", d(lambda_factor)},
      {"upper_initial", upper_initial},
      {"upper_initial_file", upper_initial_file},
      {"upper_a", d(upper.a)},
      {"M_list", join(M_list, z)},
      {"lambda_min", d(lambda_range.lo)},
      {"lambda_max", d(lambda_range.hi)},
      {"lambda_count", z(lambda_range.count)},
      {"chi_min", d(chi_range.lo)},
      {"chi_max", d(chi_range.hi)},
      {"chi_count", z(chi_range.count)},
      {"workers", z(workers)},
      {"output_dir", output_dir.string()},
  };
}

}  // namespace quench::app
