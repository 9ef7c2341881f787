#pragma once

// Scenario documents: sectioned key = value text.
//
//   [model]       variant, j, omega, modes, beta, eta, n_max, h_s, h_e, h_se
//   [initial]     amplitudes, environment
//   [grid]        t0, dt, t_max
//   [analyses]    run
//   [divisibility] tolerance, splits
//   [nz]          kept, dt, t_max, memory_time
//   [coherence]   pairs
//   [zassenhaus]  dt, levels
//   [appendix-e]  n_max, m1, m2, times, dt, t_max
//   [output]      name, dir
//
// The first four sections are required. Unknown sections and keys are errors.

#include "oqs/bosonic.hpp"
#include "oqs/coherence.hpp"
#include "oqs/divisibility.hpp"
#include "oqs/dynamics.hpp"
#include "oqs/errors.hpp"
#include "oqs/models.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace oqs {

enum class Analysis { markov, divisibility, nz, coherence, zassenhaus, appendix_e };

/// Execution order of the analyses.
inline constexpr std::array<Analysis, 6> kAnalysisOrder{Analysis::markov,    Analysis::divisibility,
                                                        Analysis::nz,        Analysis::coherence,
                                                        Analysis::zassenhaus, Analysis::appendix_e};

inline const char *to_string(Analysis a) {
  switch (a) {
  case Analysis::markov:
    return "markov";
  case Analysis::divisibility:
    return "divisibility";
  case Analysis::nz:
    return "nz";
  case Analysis::coherence:
    return "coherence";
  case Analysis::zassenhaus:
    return "zassenhaus";
  case Analysis::appendix_e:
    return "appendix-e";
  }
  return "?";
}

inline std::optional<Analysis> parse_analysis(std::string_view name) {
  for (Analysis a : kAnalysisOrder)
    if (name == to_string(a))
      return a;
  return std::nullopt;
}

enum class StatePreset { vacuum, maximally_mixed, maximally_coherent };

inline const char *to_string(StatePreset p) {
  switch (p) {
  case StatePreset::vacuum:
    return "vacuum";
  case StatePreset::maximally_mixed:
    return "maximally-mixed";
  case StatePreset::maximally_coherent:
    return "maximally-coherent";
  }
  return "?";
}

inline std::optional<StatePreset> parse_state_preset(std::string_view name) {
  for (StatePreset p :
       {StatePreset::vacuum, StatePreset::maximally_mixed, StatePreset::maximally_coherent})
    if (name == to_string(p))
      return p;
  return std::nullopt;
}

/// Explicit amplitudes or a preset for the system.
using SystemSpec = std::variant<StatePreset, ComplexVector>;
/// Explicit diagonal weights or a preset for the environment.
using EnvironmentSpec = std::variant<StatePreset, std::vector<double>>;

struct CustomHamiltonians {
  ComplexMatrix h_s;
  ComplexMatrix h_e;
  ComplexMatrix h_se;
};

struct DivisibilityOptions {
  double tolerance = kDefaultDivisibilityTolerance;
  std::vector<SplitTriple> splits; ///< empty: default_splits over the grid
};

struct NzOptions {
  std::vector<Index> kept{0};
  double dt = 0.005;
  double t_max = 2.0;
  double memory_time = 1.0;

  TimeGrid grid() const { return TimeGrid::spanning(0.0, t_max, dt); }
};

struct CoherenceOptions {
  std::vector<CoherencePair> pairs; ///< empty: every pair j < k
};

struct ZassenhausOptions {
  double dt = 0.05;
  int levels = 6; ///< dt, dt/2, ..., dt/2^(levels-1)
};

struct AppendixEOptions {
  int n_max = kMaxPolynomialOrder;
  std::optional<double> m1; ///< default j
  std::optional<double> m2; ///< default -j
  std::vector<double> times; ///< empty: 0..t_max step dt
  double dt = 0.1;
  double t_max = 10.0;

  std::vector<double> sample_times() const {
    if (!times.empty())
      return times;
    return TimeGrid::spanning(0.0, t_max, dt).points();
  }
};

struct OutputOptions {
  std::string name = "scenario";
  std::string dir = "out";
};

struct Scenario {
  ModelParams model = ModelParams::dephasing_defaults();
  std::optional<CustomHamiltonians> custom;
  SystemSpec system = StatePreset::maximally_coherent;
  EnvironmentSpec environment = StatePreset::vacuum;
  TimeGrid grid = TimeGrid::spanning(0.0, 20.0, 0.02);
  std::vector<Analysis> analyses; ///< canonical order, no repeats
  DivisibilityOptions divisibility;
  NzOptions nz;
  CoherenceOptions coherence;
  ZassenhausOptions zassenhaus;
  AppendixEOptions appendix_e;
  OutputOptions output;

  bool selected(Analysis a) const {
    return std::find(analyses.begin(), analyses.end(), a) != analyses.end();
  }

  HamiltonianTriple build_model() const {
    if (model.variant == ModelVariant::custom) {
      if (!custom)
        throw ValidationError("custom model without Hamiltonians");
      return build_custom_model(custom->h_s, custom->h_e, custom->h_se);
    }
    return oqs::build_model(model);
  }

  InitialState build_state(const HamiltonianTriple &triple) const {
    const Index n = triple.spec().system_dim();
    const Index env = triple.spec().env_dim();
    ComplexMatrix d;
    if (const auto *preset = std::get_if<StatePreset>(&environment)) {
      switch (*preset) {
      case StatePreset::vacuum:
        d = ground_weights(env);
        break;
      case StatePreset::maximally_mixed:
        d = maximally_mixed(env);
        break;
      case StatePreset::maximally_coherent: {
        const ComplexVector v = maximally_coherent_amplitudes(env);
        d = v * v.adjoint();
        break;
      }
      }
    } else {
      const auto &weights = std::get<std::vector<double>>(environment);
      if (static_cast<Index>(weights.size()) != env)
        throw DimensionError("environment has " + std::to_string(weights.size()) +
                             " weights, the model needs " + std::to_string(env));
      d = ComplexMatrix::Zero(env, env);
      for (Index k = 0; k < env; ++k)
        d(k, k) = weights[static_cast<std::size_t>(k)];
    }

    if (const auto *preset = std::get_if<StatePreset>(&system)) {
      switch (*preset) {
      case StatePreset::vacuum: {
        ComplexVector c = ComplexVector::Zero(n);
        c(0) = 1.0;
        return InitialState::pure(std::move(c), std::move(d));
      }
      case StatePreset::maximally_mixed:
        return InitialState::mixed(maximally_mixed(n), std::move(d));
      case StatePreset::maximally_coherent:
        return InitialState::pure(maximally_coherent_amplitudes(n), std::move(d));
      }
    }
    const auto &c = std::get<ComplexVector>(system);
    if (c.size() != n)
      throw DimensionError("initial amplitudes have " + std::to_string(c.size()) +
                           " entries, the model needs " + std::to_string(n));
    return InitialState::pure(c, std::move(d));
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos)
      return out;
    start = pos + 1;
  }
}

inline std::optional<double> to_double(const std::string &s) {
  if (s.empty())
    return std::nullopt;
  char *end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (*end != '\0' || !std::isfinite(v))
    return std::nullopt;
  return v;
}

/// "a", "bi", "a+bi", "a-bi", "i", "-i".
inline std::optional<Complex> to_complex(const std::string &s) {
  if (s.empty())
    return std::nullopt;
  if (s.back() != 'i')
    if (const auto re = to_double(s))
      return Complex(*re, 0.0);
  if (s.back() != 'i')
    return std::nullopt;
  const std::string body = s.substr(0, s.size() - 1);
  const auto imag_part = [](const std::string &t) -> std::optional<double> {
    if (t.empty() || t == "+")
      return 1.0;
    if (t == "-")
      return -1.0;
    return to_double(t);
  };
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      const auto re = to_double(body.substr(0, k));
      const auto im = imag_part(body.substr(k));
      if (re && im)
        return Complex(*re, *im);
      return std::nullopt;
    }
  }
  if (const auto im = imag_part(body))
    return Complex(0.0, *im);
  return std::nullopt;
}

/// One `key = value` entry with its source line.
struct Entry {
  std::string value;
  std::size_t line = 0;
};

/// Typed access to one section, tracking which keys were read.
class Section {
public:
  Section(std::string name, std::size_t line) : name_(std::move(name)), line_(line) {}

  void insert(const std::string &key, Entry entry) {
    if (entries_.count(key))
      throw ParseError(entry.line, key, "duplicate key in [" + name_ + "]");
    entries_.emplace(key, std::move(entry));
  }

  bool has(const std::string &key) const { return entries_.count(key) > 0; }
  const std::string &name() const { return name_; }
  std::size_t line() const { return line_; }

  std::size_t line_of(const std::string &key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? line_ : it->second.line;
  }

  /// Throws for any key not in `allowed`.
  void restrict_to(std::initializer_list<std::string_view> allowed, const std::string &context) const {
    for (const auto &[key, entry] : entries_)
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        throw ParseError(entry.line, key, "unknown key in [" + name_ + "]" + context);
  }

  const std::string &raw(const std::string &key) const { return entries_.at(key).value; }

  [[noreturn]] void fail(const std::string &key, const std::string &message) const {
    throw ParseError(line_of(key), key, message);
  }

  double real(const std::string &key, double fallback) const {
    if (!has(key))
      return fallback;
    const auto v = to_double(raw(key));
    if (!v)
      fail(key, "expected a finite number, got '" + raw(key) + "'");
    return *v;
  }

  double positive(const std::string &key, double fallback) const {
    const double v = real(key, fallback);
    if (!(v > 0.0))
      fail(key, "must be > 0");
    return v;
  }

  int integer(const std::string &key, int fallback, int lo, int hi) const {
    const double v = real(key, fallback);
    if (v != std::round(v) || v < lo || v > hi)
      fail(key, "expected an integer in " + std::to_string(lo) + ".." + std::to_string(hi));
    return static_cast<int>(v);
  }

  std::vector<double> reals(const std::string &key) const {
    std::vector<double> out;
    for (const std::string &item : split(raw(key), ',')) {
      const auto v = to_double(item);
      if (!v)
        fail(key, "expected a list of numbers, bad item '" + item + "'");
      out.push_back(*v);
    }
    return out;
  }

  std::vector<Complex> complexes(const std::string &text, const std::string &key) const {
    std::vector<Complex> out;
    for (const std::string &item : split(text, ',')) {
      const auto v = to_complex(item);
      if (!v)
        fail(key, "expected complex numbers like 0.5, -1+2i, bad item '" + item + "'");
      out.push_back(*v);
    }
    return out;
  }

  /// Rows separated by ';', entries by ','.
  ComplexMatrix matrix(const std::string &key) const {
    const std::vector<std::string> rows = split(raw(key), ';');
    std::vector<std::vector<Complex>> cells;
    for (const std::string &row : rows)
      cells.push_back(complexes(row, key));
    const std::size_t cols = cells.front().size();
    if (cells.size() != cols)
      fail(key, "matrix must be square, got " + std::to_string(cells.size()) + " rows of " +
                    std::to_string(cols));
    ComplexMatrix m(static_cast<Index>(cols), static_cast<Index>(cols));
    for (std::size_t r = 0; r < cells.size(); ++r) {
      if (cells[r].size() != cols)
        fail(key, "row " + std::to_string(r) + " has " + std::to_string(cells[r].size()) +
                      " entries, expected " + std::to_string(cols));
      for (std::size_t c = 0; c < cols; ++c)
        m(static_cast<Index>(r), static_cast<Index>(c)) = cells[r][c];
    }
    return m;
  }

private:
  std::string name_;
  std::size_t line_;
  std::map<std::string, Entry> entries_;
};

inline const std::set<std::string, std::less<>> &known_sections() {
  static const std::set<std::string, std::less<>> names{
      "model", "initial", "grid", "analyses", "divisibility", "nz",
      "coherence", "zassenhaus", "appendix-e", "output"};
  return names;
}

inline std::map<std::string, Section> read_sections(const std::string &text) {
  std::map<std::string, Section> sections;
  Section *current = nullptr;
  std::istringstream in(text);
  std::string raw_line;
  std::size_t line = 0;
  while (std::getline(in, raw_line)) {
    ++line;
    const std::string stripped = trim(std::string_view(raw_line).substr(0, raw_line.find('#')));
    if (stripped.empty() || stripped.front() == ';')
      continue;
    if (stripped.front() == '[') {
      if (stripped.back() != ']')
        throw ParseError(line, "", "malformed section header '" + stripped + "'");
      const std::string name = trim(stripped.substr(1, stripped.size() - 2));
      if (!known_sections().count(name))
        throw ParseError(line, name, "unknown section [" + name + "]");
      if (sections.count(name))
        throw ParseError(line, name, "duplicate section [" + name + "]");
      current = &sections.emplace(name, Section(name, line)).first->second;
      continue;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ParseError(line, "", "expected 'key = value', got '" + stripped + "'");
    const std::string key = trim(stripped.substr(0, eq));
    if (key.empty())
      throw ParseError(line, "", "empty key");
    if (!current)
      throw ParseError(line, key, "key outside of any section");
    current->insert(key, {trim(stripped.substr(eq + 1)), line});
  }
  for (const char *required : {"model", "initial", "grid", "analyses"})
    if (!sections.count(required))
      throw ParseError(0, std::string("[") + required + "]", "missing section");
  return sections;
}

inline void parse_model(const Section &s, Scenario &out) {
  const std::string variant = s.has("variant") ? s.raw("variant") : "dephasing";
  if (variant == "dephasing") {
    s.restrict_to({"variant", "j", "omega", "modes", "n_max"}, " for variant dephasing");
    out.model = ModelParams::dephasing_defaults();
    if (s.has("modes")) {
      out.model.modes.clear();
      for (const std::string &item : split(s.raw("modes"), ',')) {
        const auto parts = split(item, ':');
        const auto freq = parts.size() == 2 ? to_double(parts[0]) : std::nullopt;
        const auto coupling = parts.size() == 2 ? to_complex(parts[1]) : std::nullopt;
        if (!freq || !coupling)
          s.fail("modes", "expected 'frequency:coupling' items, bad item '" + item + "'");
        out.model.modes.push_back({*freq, *coupling});
      }
    }
  } else if (variant == "jsquared") {
    s.restrict_to({"variant", "j", "omega", "beta", "eta", "n_max"}, " for variant jsquared");
    out.model = ModelParams::jsquared_defaults();
    out.model.beta = s.real("beta", out.model.beta);
    out.model.eta = s.real("eta", out.model.eta);
  } else if (variant == "custom") {
    s.restrict_to({"variant", "h_s", "h_e", "h_se"}, " for variant custom");
    out.model = ModelParams{};
    out.model.variant = ModelVariant::custom;
    for (const char *key : {"h_s", "h_e", "h_se"})
      if (!s.has(key))
        s.fail(key, "custom model needs h_s, h_e and h_se");
    out.custom = CustomHamiltonians{s.matrix("h_s"), s.matrix("h_e"), s.matrix("h_se")};
    return;
  } else {
    s.fail("variant", "unknown variant '" + variant + "' (dephasing, jsquared, custom)");
  }
  out.model.j = s.real("j", out.model.j);
  if (!is_half_integer_spin(out.model.j))
    s.fail("j", "must be one of 1/2, 1, 3/2, ...");
  out.model.omega = s.real("omega", out.model.omega);
  out.model.n_max = s.integer("n_max", out.model.n_max, 1, 64);
}

/// Accepts amplitudes normalized within 1e-9 and renormalizes them.
inline void parse_initial(const Section &s, Scenario &out) {
  s.restrict_to({"amplitudes", "environment"}, "");
  if (s.has("amplitudes")) {
    if (const auto preset = parse_state_preset(s.raw("amplitudes"))) {
      out.system = *preset;
    } else {
      const std::vector<Complex> values = s.complexes(s.raw("amplitudes"), "amplitudes");
      ComplexVector c(static_cast<Index>(values.size()));
      for (std::size_t k = 0; k < values.size(); ++k)
        c(static_cast<Index>(k)) = values[k];
      const double norm = c.squaredNorm();
      if (std::abs(norm - 1.0) > 1e-9)
        s.fail("amplitudes", "amplitudes not normalized (sum |c|^2 = " + std::to_string(norm) + ")");
      out.system = ComplexVector(c / std::sqrt(norm));
    }
  }
  if (s.has("environment")) {
    if (const auto preset = parse_state_preset(s.raw("environment"))) {
      out.environment = *preset;
    } else {
      std::vector<double> w = s.reals("environment");
      double total = 0.0;
      for (double v : w) {
        if (v < 0.0)
          s.fail("environment", "weights must be non-negative");
        total += v;
      }
      if (std::abs(total - 1.0) > 1e-9)
        s.fail("environment", "environment weights not normalized (sum = " + std::to_string(total) + ")");
      for (double &v : w)
        v /= total;
      out.environment = std::move(w);
    }
  }
}

inline void parse_grid(const Section &s, Scenario &out) {
  s.restrict_to({"t0", "dt", "t_max"}, "");
  const double t0 = s.real("t0", 0.0);
  const double dt = s.positive("dt", 0.02);
  const double t_max = s.real("t_max", 20.0);
  if (!(t_max > t0))
    s.fail("t_max", "must exceed t0");
  out.grid = TimeGrid::spanning(t0, t_max, dt);
}

inline void parse_analyses(const Section &s, Scenario &out) {
  s.restrict_to({"run"}, "");
  if (!s.has("run"))
    s.fail("run", "list the analyses to run");
  std::set<Analysis> chosen;
  for (const std::string &item : split(s.raw("run"), ',')) {
    if (item.empty())
      continue;
    const auto a = parse_analysis(item);
    if (!a)
      s.fail("run", "unknown analysis '" + item +
                        "' (markov, divisibility, nz, coherence, zassenhaus, appendix-e)");
    chosen.insert(*a);
  }
  if (chosen.empty())
    s.fail("run", "at least one analysis must be selected");
  out.analyses.clear();
  for (Analysis a : kAnalysisOrder)
    if (chosen.count(a))
      out.analyses.push_back(a);
}

inline void parse_options(const std::map<std::string, Section> &sections, Scenario &out) {
  if (const auto it = sections.find("divisibility"); it != sections.end()) {
    const Section &s = it->second;
    s.restrict_to({"tolerance", "splits"}, "");
    out.divisibility.tolerance = s.positive("tolerance", out.divisibility.tolerance);
    if (s.has("splits"))
      for (const std::string &triple : split(s.raw("splits"), ';')) {
        std::vector<double> v;
        for (const std::string &item : split(triple, ',')) {
          const auto x = to_double(item);
          if (!x)
            s.fail("splits", "bad number '" + item + "'");
          v.push_back(*x);
        }
        if (v.size() != 3 || !(v[0] <= v[1] && v[1] <= v[2]))
          s.fail("splits", "each split is 't0, ts, t' with t0 <= ts <= t");
        out.divisibility.splits.push_back({v[0], v[1], v[2]});
      }
  }
  if (const auto it = sections.find("nz"); it != sections.end()) {
    const Section &s = it->second;
    s.restrict_to({"kept", "dt", "t_max", "memory_time"}, "");
    if (s.has("kept")) {
      out.nz.kept.clear();
      for (double v : s.reals("kept")) {
        if (v != std::round(v) || v < 0)
          s.fail("kept", "environment indices must be non-negative integers");
        out.nz.kept.push_back(static_cast<Index>(v));
      }
    }
    out.nz.dt = s.positive("dt", out.nz.dt);
    out.nz.t_max = s.positive("t_max", out.nz.t_max);
    out.nz.memory_time = s.real("memory_time", out.nz.memory_time);
    if (out.nz.memory_time < 0.0 || out.nz.memory_time > out.nz.t_max)
      s.fail("memory_time", "must lie in [0, t_max]");
  }
  if (const auto it = sections.find("coherence"); it != sections.end()) {
    const Section &s = it->second;
    s.restrict_to({"pairs"}, "");
    if (s.has("pairs"))
      for (const std::string &item : split(s.raw("pairs"), ',')) {
        const auto parts = split(item, '-');
        const auto a = parts.size() == 2 ? to_double(parts[0]) : std::nullopt;
        const auto b = parts.size() == 2 ? to_double(parts[1]) : std::nullopt;
        if (!a || !b || *a != std::round(*a) || *b != std::round(*b))
          s.fail("pairs", "expected index pairs like 0-1, bad item '" + item + "'");
        out.coherence.pairs.emplace_back(static_cast<Index>(*a), static_cast<Index>(*b));
      }
  }
  if (const auto it = sections.find("zassenhaus"); it != sections.end()) {
    const Section &s = it->second;
    s.restrict_to({"dt", "levels"}, "");
    out.zassenhaus.dt = s.positive("dt", out.zassenhaus.dt);
    out.zassenhaus.levels = s.integer("levels", out.zassenhaus.levels, 2, 20);
  }
  if (const auto it = sections.find("appendix-e"); it != sections.end()) {
    const Section &s = it->second;
    s.restrict_to({"n_max", "m1", "m2", "times", "dt", "t_max"}, "");
    out.appendix_e.n_max = s.integer("n_max", out.appendix_e.n_max, 0, kMaxPolynomialOrder);
    if (s.has("m1"))
      out.appendix_e.m1 = s.real("m1", 0.0);
    if (s.has("m2"))
      out.appendix_e.m2 = s.real("m2", 0.0);
    if (s.has("times"))
      out.appendix_e.times = s.reals("times");
    out.appendix_e.dt = s.positive("dt", out.appendix_e.dt);
    out.appendix_e.t_max = s.positive("t_max", out.appendix_e.t_max);
  }
  if (const auto it = sections.find("output"); it != sections.end()) {
    const Section &s = it->second;
    s.restrict_to({"name", "dir"}, "");
    if (s.has("name"))
      out.output.name = s.raw("name");
    if (s.has("dir"))
      out.output.dir = s.raw("dir");
  }
}

/// Builds the model and state once so that dimension and state errors are
/// reported against the document.
inline void check_buildable(const std::map<std::string, Section> &sections, const Scenario &out) {
  const Section &model = sections.at("model");
  const Section &initial = sections.at("initial");
  HamiltonianTriple triple = [&] {
    try {
      return out.build_model();
    } catch (const Error &e) {
      throw ParseError(model.line(), "[model]", e.what());
    }
  }();
  try {
    out.build_state(triple);
  } catch (const Error &e) {
    const std::string key = initial.has("amplitudes") ? "amplitudes" : "environment";
    throw ParseError(initial.line_of(key), key, e.what());
  }
  const Index n = triple.spec().system_dim();
  if (const auto it = sections.find("coherence"); it != sections.end())
    for (const CoherencePair &p : out.coherence.pairs)
      if (p.first >= n || p.second >= n || p.first == p.second)
        it->second.fail("pairs", "pair " + std::to_string(p.first) + "-" + std::to_string(p.second) +
                                     " is not two distinct indices below " + std::to_string(n));
  if (const auto it = sections.find("nz"); it != sections.end())
    for (Index k : out.nz.kept)
      if (k >= triple.spec().env_dim())
        it->second.fail("kept", "index " + std::to_string(k) + " exceeds the environment dimension");
}

} // namespace detail

inline Scenario parse_scenario(const std::string &text) {
  const auto sections = detail::read_sections(text);
  Scenario out;
  detail::parse_model(sections.at("model"), out);
  detail::parse_initial(sections.at("initial"), out);
  detail::parse_grid(sections.at("grid"), out);
  detail::parse_analyses(sections.at("analyses"), out);
  detail::parse_options(sections, out);
  detail::check_buildable(sections, out);
  return out;
}

inline Scenario load_scenario(const std::string &path) {
  std::ifstream file(path, std::ios::binary);
  if (!file)
    throw IoError("cannot open scenario '" + path + "'");
  std::ostringstream text;
  text << file.rdbuf();
  return parse_scenario(text.str());
}

namespace presets {

inline constexpr std::string_view kDephasing = R"(# Pure dephasing: J_z coupled to three incommensurate boson modes.
[model]
variant = dephasing

[initial]
amplitudes = maximally-coherent
environment = vacuum

[grid]
t0 = 0
dt = 0.02
t_max = 20

[analyses]
run = markov, divisibility, coherence

[output]
name = dephasing
)";

inline constexpr std::string_view kJsquared = R"(# J^2 coupling to one boson mode: coherence is preserved.
[model]
variant = jsquared

[initial]
amplitudes = maximally-coherent
environment = vacuum

[grid]
t0 = 0
dt = 0.02
t_max = 20

[analyses]
run = markov, divisibility, nz, coherence, zassenhaus, appendix-e

[output]
name = jsquared
)";

inline constexpr std::string_view kCounterexample = R"(# sigma_x (x) sigma_x coupling to a two-level environment: not divisible.
[model]
variant = custom
h_s = 0, 0; 0, 0
h_e = 1, 0; 0, -1
h_se = 0, 0, 0, 0.4; 0, 0, 0.4, 0; 0, 0.4, 0, 0; 0.4, 0, 0, 0

[initial]
amplitudes = 0.8, 0.6
environment = maximally-mixed

[grid]
t0 = 0
dt = 0.02
t_max = 20

[analyses]
run = markov, divisibility, nz, coherence, zassenhaus

[output]
name = counterexample
)";

inline std::optional<std::string_view> text(std::string_view name) {
  if (name == "dephasing")
    return kDephasing;
  if (name == "jsquared")
    return kJsquared;
  if (name == "counterexample")
    return kCounterexample;
  return std::nullopt;
}

inline Scenario load(std::string_view name) {
  const auto doc = text(name);
  if (!doc)
    throw ParameterError("unknown preset '" + std::string(name) +
                         "' (dephasing, jsquared, counterexample)");
  return parse_scenario(std::string(*doc));
}

} // namespace presets

} // namespace oqs
