#include "cdlab/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "cdlab/error.hpp"

namespace cdlab {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Reader {
 public:
  Reader(std::map<std::string, Section> sections, std::string source)
      : sections_(std::move(sections)), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& sec, const std::string& key, const std::string& what) const {
    std::ostringstream msg;
    msg << source_;
    if (const Entry* e = find(sec, key)) msg << ":" << e->line;
    msg << ": [" << sec << "] " << key << ": " << what;
    throw Error(ErrorKind::Configuration, msg.str());
  }

  const Entry* find(const std::string& sec, const std::string& key) const {
    const auto s = sections_.find(sec);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  bool has(const std::string& sec, const std::string& key) const { return find(sec, key) != nullptr; }

  std::optional<std::string> text(const std::string& sec, const std::string& key) {
    auto s = sections_.find(sec);
    if (s == sections_.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    k->second.used = true;
    return k->second.value;
  }

  double to_number(const std::string& sec, const std::string& key, const std::string& v) const {
    if (v == "inf") return std::numeric_limits<double>::infinity();
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || std::isnan(x))
      fail(sec, key, "'" + v + "' is not a number");
    return x;
  }

  void number(const std::string& sec, const std::string& key, double& out) {
    if (auto v = text(sec, key)) out = to_number(sec, key, *v);
  }

  void count(const std::string& sec, const std::string& key, std::size_t& out) {
    if (auto v = text(sec, key)) {
      const double x = to_number(sec, key, *v);
      if (!(x >= 0.0) || x != std::floor(x) || x > 1e12) fail(sec, key, "expected a non-negative integer");
      out = static_cast<std::size_t>(x);
    }
  }

  std::vector<double> numbers(const std::string& sec, const std::string& key, const std::string& v) const {
    std::vector<double> out;
    for (const auto& item : split_list(v)) out.push_back(to_number(sec, key, item));
    return out;
  }

  template <typename Fn>
  auto parsed(const std::string& sec, const std::string& key, const std::string& v, Fn fn) const {
    try {
      return fn(v);
    } catch (const Error& e) {
      fail(sec, key, e.what());
    }
  }

  void reject_unused() const {
    for (const auto& [sec, entries] : sections_) {
      for (const auto& [key, e] : entries) {
        if (!e.used) {
          std::ostringstream msg;
          msg << source_ << ":" << e.line << ": unknown key '" << key << "' in [" << sec << "]";
          throw Error(ErrorKind::Configuration, msg.str());
        }
      }
    }
  }

 private:
  std::map<std::string, Section> sections_;
  std::string source_;
};

const char* const kSections[] = {"model", "datum", "solver", "targets", "output", "sweep"};

std::map<std::string, Section> tokenize(std::istream& in, const std::string& source) {
  std::map<std::string, Section> sections;
  std::string current;
  std::string raw;
  int line = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::Configuration, source + ":" + std::to_string(line) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line;
    // a comment runs from '#' or ';' to the end of the line
    const std::string s = trim(raw.substr(0, raw.find_first_of("#;")));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail("malformed section header '" + s + "'");
      current = trim(s.substr(1, s.size() - 2));
      bool known = false;
      for (const char* k : kSections) known = known || current == k;
      if (!known) fail("unknown section [" + current + "]");
      sections[current];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail("expected 'key = value', got '" + s + "'");
    if (current.empty()) fail("key outside any section");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (sections[current].count(key)) fail("duplicate key '" + key + "' in [" + current + "]");
    sections[current][key] = Entry{value, line, false};
  }
  return sections;
}

}  // namespace

std::vector<double> log_spaced(double first, double last, std::size_t count) {
  if (!(first > 0.0) || !(last > first) || count < 2)
    throw Error(ErrorKind::Configuration, "log spacing needs 0 < first < last and at least 2 points");
  std::vector<double> out(count);
  // stepping in log10 keeps whole decades exact, e.g. 10 and 100 in (1, 1000, 31)
  const double lo = std::log10(first);
  const double span = std::log10(last) - lo;
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::pow(10.0, lo + span * static_cast<double>(i) / static_cast<double>(count - 1));
  out.front() = first;
  out.back() = last;
  return out;
}

RunConfig parse_run_config(std::istream& in, const std::string& source) {
  Reader rd(tokenize(in, source), source);
  RunConfig cfg;
  ExperimentSetup& s = cfg.setup;

  if (!rd.has("model", "q")) {
    throw Error(ErrorKind::Configuration, source + ": [model] q: missing required key");
  }
  rd.number("model", "q", s.q);
  rd.number("model", "theta_small", s.options.regime.theta_small);
  rd.number("model", "theta_large", s.options.regime.theta_large);
  rd.number("model", "decay_tol", s.options.regime.decay_tol);

  if (auto v = rd.text("datum", "family")) s.datum.family = rd.parsed("datum", "family", *v, parse_family);
  if (auto v = rd.text("datum", "orientation"))
    s.datum.orientation = rd.parsed("datum", "orientation", *v, parse_orientation);
  rd.number("datum", "amplitude", s.datum.amplitude);
  rd.number("datum", "width", s.datum.width);

  double x_min = s.grid.x_min();
  double x_max = s.grid.x_max();
  std::size_t n = s.grid.n();
  rd.number("solver", "x_min", x_min);
  rd.number("solver", "x_max", x_max);
  rd.count("solver", "n", n);
  s.grid = rd.parsed("solver", "n", "", [&](const std::string&) { return Grid1D(x_min, x_max, n); });
  SolverConfig& sc = s.solver;
  if (!rd.has("solver", "t_end")) {
    throw Error(ErrorKind::Configuration, source + ": [solver] t_end: missing required key");
  }
  rd.number("solver", "cfl", sc.cfl);
  rd.number("solver", "t_end", sc.t_end);
  if (rd.has("solver", "output_times") && rd.has("solver", "output_log"))
    rd.fail("solver", "output_log", "give output_times or output_log, not both");
  if (auto v = rd.text("solver", "output_times")) sc.output_times = rd.numbers("solver", "output_times", *v);
  if (auto v = rd.text("solver", "output_log")) {
    const auto spec = rd.numbers("solver", "output_log", *v);
    if (spec.size() != 3 || spec[2] != std::floor(spec[2]))
      rd.fail("solver", "output_log", "expected 't_first, t_last, count'");
    sc.output_times = rd.parsed("solver", "output_log", *v, [&](const std::string&) {
      return log_spaced(spec[0], spec[1], static_cast<std::size_t>(std::max(0.0, spec[2])));
    });
  }
  if (!rd.has("solver", "output_times") && !rd.has("solver", "output_log") && sc.t_end > 0.0)
    sc.output_times = log_spaced(1e-3 * sc.t_end, sc.t_end, 31);
  if (auto v = rd.text("solver", "domain")) {
    if (*v == "fixed") sc.domain = DomainPolicy::Fixed;
    else if (*v == "expand") sc.domain = DomainPolicy::Expand;
    else rd.fail("solver", "domain", "expected 'fixed' or 'expand', got '" + *v + "'");
  }
  rd.number("solver", "expand_trigger", sc.expand_trigger);
  rd.number("solver", "expand_growth", sc.expand_growth);
  rd.number("solver", "far_field", sc.tol.far_field);
  rd.number("solver", "mass_relative", sc.tol.mass_relative);

  for (const char* key : {"heat_dipole", "nwave", "vss"}) {
    auto v = rd.text("targets", key);
    if (!v) continue;
    TargetRequest req;
    req.kind = parse_target(key);
    for (const auto& item : split_list(*v)) req.norms.push_back(rd.parsed("targets", key, item, parse_norm));
    if (req.norms.empty()) rd.fail("targets", key, "empty norm list");
    s.targets.push_back(req);
  }
  if (auto v = rd.text("targets", "require")) {
    if (*v == "converging") cfg.require = Requirement::Converging;
    else if (*v == "bounded") cfg.require = Requirement::Bounded;
    else rd.fail("targets", "require", "expected 'converging' or 'bounded', got '" + *v + "'");
  }
  rd.number("targets", "window_start", s.options.window.t_min);
  rd.number("targets", "window_end", s.options.window.t_max);
  rd.number("targets", "tail_fraction", s.options.tail_fraction);
  rd.number("targets", "relative_gate", s.options.relative_gate);

  if (auto v = rd.text("output", "dir")) cfg.out_dir = *v;
  std::size_t workers = 0;
  rd.count("output", "workers", workers);
  cfg.workers = static_cast<unsigned>(workers);

  if (rd.has("sweep", "axis") || rd.has("sweep", "values")) {
    SweepSpec sw;
    if (auto v = rd.text("sweep", "axis")) sw.axis = rd.parsed("sweep", "axis", *v, parse_axis);
    if (auto v = rd.text("sweep", "values")) sw.values = rd.numbers("sweep", "values", *v);
    if (sw.values.size() < 2) rd.fail("sweep", "values", "a sweep needs at least 2 values");
    cfg.sweep = sw;
  }

  rd.reject_unused();
  validate(cfg);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Configuration, "cannot read config file '" + path + "'");
  return parse_run_config(in, path);
}

void validate(const RunConfig& cfg) {
  const ExperimentSetup& s = cfg.setup;
  auto fail = [](const std::string& m) { throw Error(ErrorKind::Configuration, m); };
  const ModelParams params(s.q);
  validate(s.solver, 0.0);
  const auto& th = s.options.regime;
  if (!(th.theta_small > 0.0) || !(th.theta_large > 0.0) || !(th.decay_tol > 0.0))
    fail("[model] thresholds must be positive");
  if (!(s.options.tail_fraction > 0.0 && s.options.tail_fraction <= 1.0))
    fail("[targets] tail_fraction must lie in (0, 1]");
  if (!(s.options.relative_gate > 0.0)) fail("[targets] relative_gate must be positive");
  if (!(s.options.window.t_min >= 0.0) || !(s.options.window.t_max > s.options.window.t_min))
    fail("[targets] window_start must be non-negative and below window_end");

  std::vector<double> qs{s.q};
  std::vector<double> amplitudes{s.datum.amplitude};
  if (cfg.sweep) {
    for (double v : cfg.sweep->values) {
      if (!std::isfinite(v)) fail("[sweep] values must be finite");
    }
    (cfg.sweep->axis == SweepAxis::Q ? qs : amplitudes) = cfg.sweep->values;
  }
  for (double q : qs) {
    const ModelParams p(q);
    for (const auto& t : s.targets) {
      if (t.kind == TargetKind::Vss && !(q < 1.5)) {
        std::ostringstream msg;
        msg << "[targets] vss needs 1 < q < 3/2 (got q=" << q << ")";
        throw Error(ErrorKind::Regime, msg.str());
      }
      for (Norm p_norm : t.norms) {
        if (t.kind == TargetKind::NWave && p_norm == Norm::Linf)
          fail("[targets] nwave is compared in L1 and L2 only");
      }
    }
  }
  for (double a : amplitudes) {
    DatumSpec d = s.datum;
    d.amplitude = a;
    make_datum(d, s.grid, s.solver.tol);
  }
}

}  // namespace cdlab
