#include "sipsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <string>

namespace sipsim {

namespace {

using Mask = std::uint32_t;

constexpr Mask bit(Study s) { return Mask{1} << static_cast<int>(s); }
constexpr Mask kAll = 0xFFu;
constexpr Mask kStatistical = bit(Study::Stationarity) | bit(Study::Coupling) |
                              bit(Study::OrDistance) | bit(Study::Convergence) |
                              bit(Study::Correlation);
constexpr Mask kTorusOnly = bit(Study::SelfDuality) | bit(Study::Stationarity) |
                            bit(Study::Correlation) | bit(Study::Factorization) |
                            bit(Study::OracleCheck);

const std::vector<std::pair<Study, std::string>>& study_names() {
  static const std::vector<std::pair<Study, std::string>> names = {
      {Study::SelfDuality, "self-duality"},   {Study::Stationarity, "stationarity"},
      {Study::Coupling, "coupling"},          {Study::OrDistance, "or-distance"},
      {Study::Convergence, "convergence"},    {Study::Correlation, "correlation"},
      {Study::Factorization, "factorization"}, {Study::OracleCheck, "oracle-check"},
  };
  return names;
}

std::string_view trim(std::string_view s) {
  const auto space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? s.size() - start : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

struct Value {
  std::string key;
  std::string text;
  int line = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("line " + std::to_string(line) + ": key '" + key + "': " + what, line);
  }

  double real() const { return parse_real(text); }

  double parse_real(std::string_view s) const {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
      fail("expected a finite number, got '" + std::string(s) + "'");
    return v;
  }

  template <typename Int>
  Int parse_int(std::string_view s) const {
    Int v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end)
      fail("expected an integer, got '" + std::string(s) + "'");
    return v;
  }

  std::int64_t integer() const { return parse_int<std::int64_t>(text); }

  std::uint64_t unsigned_integer() const { return parse_int<std::uint64_t>(text); }

  bool boolean() const {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    fail("expected true or false, got '" + text + "'");
  }

  std::vector<double> reals() const {
    std::vector<double> out;
    for (auto part : split(text, ',')) out.push_back(parse_real(part));
    return out;
  }

  std::vector<int> integers() const {
    std::vector<int> out;
    for (auto part : split(text, ',')) out.push_back(parse_int<int>(part));
    return out;
  }

  ParticleList sites(int dim) const {
    try {
      return parse_sites(text, dim);
    } catch (const DomainError& e) {
      fail(e.what());
    }
  }

  std::vector<MixtureAtom> atoms() const {
    std::vector<MixtureAtom> out;
    for (auto part : split(text, ',')) {
      auto fields = split(part, ':');
      if (fields.size() != 2) fail("mixture atoms are written lambda:weight");
      out.push_back({parse_real(fields[0]), parse_real(fields[1])});
    }
    return out;
  }
};

using Setter = void (*)(ExperimentConfig&, const Value&);

struct KeyRule {
  const char* name;
  Mask studies;
  Mask required;
  Setter set;
};

// Applied in table order, so geometry keys come first (site lists need d).
const std::vector<KeyRule>& key_table() {
  static const std::vector<KeyRule> table = {
      {"d", kAll, 0, [](ExperimentConfig& c, const Value& v) {
         c.d = static_cast<int>(v.integer());
         if (c.d < 1 || c.d > 3) v.fail("dimension must be 1, 2 or 3");
       }},
      {"boundary", kAll, 0, [](ExperimentConfig& c, const Value& v) {
         if (v.text == "torus") c.boundary = Boundary::Torus;
         else if (v.text == "infinite") c.boundary = Boundary::Infinite;
         else v.fail("expected torus or infinite");
       }},
      {"side", kAll,
       bit(Study::SelfDuality) | bit(Study::Stationarity) | bit(Study::Factorization) |
           bit(Study::OracleCheck),
       [](ExperimentConfig& c, const Value& v) {
         c.side = v.integer();
         if (c.side < 3) v.fail("torus side must be at least 3");
       }},
      {"m", kAll, kAll & ~bit(Study::Correlation), [](ExperimentConfig& c, const Value& v) {
         c.m = v.real();
         if (!(c.m > 0.0) || c.m > 1e4) v.fail("m must lie in (0, 1e4]");
       }},
      {"lambda", bit(Study::Stationarity) | bit(Study::Factorization) | bit(Study::Convergence),
       bit(Study::Stationarity) | bit(Study::Factorization), [](ExperimentConfig& c, const Value& v) {
         c.lambda = v.real();
         if (!(c.lambda >= 0.0 && c.lambda <= kLambdaCap)) v.fail("lambda must lie in [0, 0.999]");
       }},
      {"theta", bit(Study::Convergence), 0, [](ExperimentConfig& c, const Value& v) {
         c.theta = v.real();
         if (!(c.theta >= 0.0 && c.theta <= 700.0)) v.fail("theta must lie in [0, 700]");
       }},
      {"law", bit(Study::Convergence), bit(Study::Convergence), [](ExperimentConfig& c, const Value& v) {
         if (v.text == "poisson") c.law = LawKind::Poisson;
         else if (v.text == "nu") c.law = LawKind::Nu;
         else if (v.text == "mixture") c.law = LawKind::Mixture;
         else v.fail("expected poisson, nu or mixture");
       }},
      {"mixture", bit(Study::Correlation) | bit(Study::Convergence), bit(Study::Correlation),
       [](ExperimentConfig& c, const Value& v) {
         c.mixture = v.atoms();
         if (c.mixture.empty()) v.fail("mixture needs at least one atom");
         double total = 0.0;
         for (const auto& a : c.mixture) {
           if (!(a.lambda >= 0.0 && a.lambda <= kLambdaCap)) v.fail("atom lambda must lie in [0, 0.999]");
           if (!(a.weight > 0.0)) v.fail("atom weights must be positive");
           total += a.weight;
         }
         if (std::abs(total - 1.0) > 1e-9) v.fail("atom weights must sum to 1");
       }},
      {"xi", bit(Study::SelfDuality) | bit(Study::Convergence) | bit(Study::OracleCheck),
       bit(Study::SelfDuality) | bit(Study::Convergence) | bit(Study::OracleCheck),
       [](ExperimentConfig& c, const Value& v) { c.xi = v.sites(c.d); }},
      {"eta", bit(Study::SelfDuality) | bit(Study::OracleCheck) | bit(Study::Factorization),
       bit(Study::SelfDuality) | bit(Study::OracleCheck),
       [](ExperimentConfig& c, const Value& v) { c.eta = v.sites(c.d); }},
      {"x", bit(Study::Coupling) | bit(Study::OrDistance), bit(Study::Coupling) | bit(Study::OrDistance),
       [](ExperimentConfig& c, const Value& v) { c.x = v.sites(c.d); }},
      {"y", bit(Study::Coupling), bit(Study::Coupling),
       [](ExperimentConfig& c, const Value& v) { c.y = v.sites(c.d); }},
      {"compare_x", bit(Study::OrDistance), 0,
       [](ExperimentConfig& c, const Value& v) { c.compare_x = v.sites(c.d); }},
      {"xi_sizes", bit(Study::Stationarity), bit(Study::Stationarity),
       [](ExperimentConfig& c, const Value& v) {
         c.xi_sizes = v.integers();
         for (int k : c.xi_sizes)
           if (k < 0 || k > 32) v.fail("sizes must lie in [0, 32]");
       }},
      {"n", bit(Study::Correlation), bit(Study::Correlation), [](ExperimentConfig& c, const Value& v) {
         c.n = static_cast<int>(v.integer());
         if (c.n < 1 || c.n > 32) v.fail("n must lie in [1, 32]");
       }},
      {"times",
       bit(Study::SelfDuality) | bit(Study::Stationarity) | bit(Study::Coupling) |
           bit(Study::OrDistance) | bit(Study::Convergence) | bit(Study::OracleCheck),
       0, [](ExperimentConfig& c, const Value& v) {
         c.times = v.reals();
         for (std::size_t i = 0; i < c.times.size(); ++i) {
           if (c.times[i] < 0.0) v.fail("times must be nonnegative");
           if (i > 0 && !(c.times[i] > c.times[i - 1])) v.fail("times must be strictly increasing");
         }
       }},
      {"replicas", kStatistical, 0, [](ExperimentConfig& c, const Value& v) {
         const auto r = v.integer();
         if (r < 100 || r > 100'000'000) v.fail("replicas must lie in [100, 1e8]");
         c.replicas = static_cast<std::size_t>(r);
       }},
      {"seed", kAll, 0, [](ExperimentConfig& c, const Value& v) { c.seed = v.unsigned_integer(); }},
      {"delta", bit(Study::Coupling), 0, [](ExperimentConfig& c, const Value& v) {
         c.delta = v.real();
         if (!(c.delta > 0.0 && c.delta < 1.0)) v.fail("delta must lie in (0, 1)");
       }},
      {"schedule_start", bit(Study::Coupling), 0, [](ExperimentConfig& c, const Value& v) {
         c.schedule_start = v.real();
         if (!(c.schedule_start > 0.0)) v.fail("schedule_start must be positive");
       }},
      {"schedule_doublings", bit(Study::Coupling), 0, [](ExperimentConfig& c, const Value& v) {
         c.schedule_doublings = static_cast<int>(v.integer());
         if (c.schedule_doublings < 0 || c.schedule_doublings > 30)
           v.fail("schedule_doublings must lie in [0, 30]");
       }},
      {"optimal_matching", bit(Study::Coupling), 0,
       [](ExperimentConfig& c, const Value& v) { c.optimal_matching = v.boolean(); }},
      {"compare_dimension", bit(Study::Coupling), 0, [](ExperimentConfig& c, const Value& v) {
         c.compare_dimension = static_cast<int>(v.integer());
         if (c.compare_dimension < 0 || c.compare_dimension > 3)
           v.fail("compare_dimension must be 0 (off), 1, 2 or 3");
       }},
      {"mc_replicas", bit(Study::SelfDuality), 0, [](ExperimentConfig& c, const Value& v) {
         const auto r = v.integer();
         if (r != 0 && (r < 100 || r > 100'000'000)) v.fail("mc_replicas must be 0 or lie in [100, 1e8]");
         c.mc_replicas = static_cast<std::size_t>(r);
       }},
      {"mc_side", bit(Study::SelfDuality), 0, [](ExperimentConfig& c, const Value& v) {
         c.mc_side = v.integer();
         if (c.mc_side < 3) v.fail("torus side must be at least 3");
       }},
      {"mc_xi", bit(Study::SelfDuality), 0,
       [](ExperimentConfig& c, const Value& v) { c.mc_xi = v.sites(c.d); }},
      {"mc_eta", bit(Study::SelfDuality), 0,
       [](ExperimentConfig& c, const Value& v) { c.mc_eta = v.sites(c.d); }},
      {"mc_time", bit(Study::SelfDuality), 0, [](ExperimentConfig& c, const Value& v) {
         c.mc_time = v.real();
         if (!(c.mc_time >= 0.0)) v.fail("mc_time must be nonnegative");
       }},
      {"split_first", bit(Study::Factorization), 0, [](ExperimentConfig& c, const Value& v) {
         c.split_first = static_cast<int>(v.integer());
         if (c.split_first < 1 || c.split_first > 16) v.fail("split sizes must lie in [1, 16]");
       }},
      {"split_second", bit(Study::Factorization), 0, [](ExperimentConfig& c, const Value& v) {
         c.split_second = static_cast<int>(v.integer());
         if (c.split_second < 1 || c.split_second > 16) v.fail("split sizes must lie in [1, 16]");
       }},
      {"cesaro_horizons", bit(Study::Factorization), 0, [](ExperimentConfig& c, const Value& v) {
         c.cesaro_horizons = v.reals();
         for (std::size_t i = 0; i < c.cesaro_horizons.size(); ++i) {
           if (!(c.cesaro_horizons[i] > 0.0)) v.fail("horizons must be positive");
           if (i > 0 && !(c.cesaro_horizons[i] > c.cesaro_horizons[i - 1]))
             v.fail("horizons must be strictly increasing");
         }
       }},
      {"cesaro_xi_size", bit(Study::Factorization), 0, [](ExperimentConfig& c, const Value& v) {
         c.cesaro_xi_size = static_cast<int>(v.integer());
         if (c.cesaro_xi_size < 0 || c.cesaro_xi_size > 16) v.fail("cesaro_xi_size must lie in [0, 16]");
       }},
      {"sim_replicas", bit(Study::OracleCheck), 0, [](ExperimentConfig& c, const Value& v) {
         const auto r = v.integer();
         if (r != 0 && (r < 100 || r > 100'000'000)) v.fail("sim_replicas must be 0 or lie in [100, 1e8]");
         c.sim_replicas = static_cast<std::size_t>(r);
       }},
      {"sim_time", bit(Study::OracleCheck), 0, [](ExperimentConfig& c, const Value& v) {
         c.sim_time = v.real();
         if (!(c.sim_time >= 0.0)) v.fail("sim_time must be nonnegative");
       }},
      {"dump_generator", bit(Study::OracleCheck), 0,
       [](ExperimentConfig& c, const Value& v) { c.dump_generator = v.boolean(); }},
  };
  return table;
}

ExperimentConfig study_defaults(Study study) {
  ExperimentConfig c;
  c.study = study;
  switch (study) {
    case Study::SelfDuality:
      c.times = {0.5, 1.0, 2.0};
      c.mc_xi = ParticleList::line({0, 1});
      c.mc_eta = ParticleList::line({0, 0, 1, 2});
      break;
    case Study::Stationarity:
      c.side = 10;
      c.times = {0.5, 1.0};
      break;
    case Study::Coupling:
    case Study::OrDistance:
      c.boundary = Boundary::Infinite;
      c.times = {100.0, 1000.0, 10000.0};
      break;
    case Study::Convergence:
      c.boundary = Boundary::Infinite;
      c.times = {1.0, 10.0, 100.0};
      break;
    case Study::Correlation:
      break;
    case Study::Factorization:
      c.eta = ParticleList::line({0, 0, 1});
      c.cesaro_horizons = {1, 2, 4, 8, 16, 32};
      break;
    case Study::OracleCheck:
      c.times = {0.5, 1.0, 2.0};
      break;
  }
  return c;
}

bool sites_on_torus(const ParticleList& xi, Coord side) {
  for (auto c : xi.flat())
    if (c < 0 || c >= side) return false;
  return true;
}

// Checks that involve more than one key.
void cross_validate(const ExperimentConfig& c, const std::map<std::string, Value>& values) {
  auto line_of = [&](const char* key) {
    auto it = values.find(key);
    return it == values.end() ? 0 : it->second.line;
  };
  auto fail = [&](const char* key, const std::string& what) {
    const int line = line_of(key);
    const std::string where = line > 0 ? "line " + std::to_string(line) + ": " : "";
    throw ConfigError(where + "key '" + key + "': " + what, line);
  };
  const Mask self = bit(c.study);
  if ((self & kTorusOnly) && c.boundary != Boundary::Torus)
    fail("boundary", "study '" + to_string(c.study) + "' needs a torus");

  if (c.boundary == Boundary::Torus) {
    const std::pair<const char*, const ParticleList*> lists[] = {
        {"xi", &c.xi}, {"eta", &c.eta}, {"x", &c.x}, {"y", &c.y}, {"compare_x", &c.compare_x}};
    for (const auto& [key, list] : lists)
      if (!sites_on_torus(*list, c.side)) fail(key, "coordinates must lie in [0, side)");
  }
  if (c.study == Study::SelfDuality && c.mc_replicas > 0) {
    if (!sites_on_torus(c.mc_xi, c.mc_side)) fail("mc_xi", "coordinates must lie in [0, mc_side)");
    if (!sites_on_torus(c.mc_eta, c.mc_side)) fail("mc_eta", "coordinates must lie in [0, mc_side)");
  }

  const Mask timed = bit(Study::SelfDuality) | bit(Study::Stationarity) | bit(Study::Coupling) |
                     bit(Study::OrDistance) | bit(Study::Convergence) | bit(Study::OracleCheck);
  if ((self & timed) && c.times.empty()) fail("times", "at least one time is required");
  if ((c.study == Study::Coupling || c.study == Study::OrDistance) && c.times.front() <= 0.0)
    fail("times", "horizons must be positive");

  if (c.study == Study::Coupling) {
    if (c.x.size() != c.y.size()) fail("y", "x and y must hold the same number of particles");
    if (c.x.empty() || c.x.size() > 4) fail("x", "coupling needs between 1 and 4 particles");
    if (c.compare_dimension != 0 && c.compare_dimension < c.d)
      fail("compare_dimension", "must not be smaller than d");
  }
  if (c.study == Study::OrDistance) {
    if (c.x.empty()) fail("x", "at least one particle is required");
  }
  if (c.study == Study::Convergence && c.law == LawKind::Mixture && c.mixture.empty())
    fail("mixture", "law = mixture needs a mixture key");
  if (c.study == Study::Convergence && c.law != LawKind::Mixture && values.count("mixture"))
    fail("mixture", "mixture is only used with law = mixture");
  if (c.study == Study::Correlation) {
    const double volume = std::pow(static_cast<double>(c.side), c.d);
    if (c.n > volume) fail("n", "n must not exceed the number of torus sites");
  }
  if (c.study == Study::Factorization && c.cesaro_horizons.empty())
    fail("cesaro_horizons", "at least one horizon is required");
  if (c.study == Study::Stationarity && c.xi_sizes.empty())
    fail("xi_sizes", "at least one size is required");
}

}  // namespace

ConfigError::ConfigError(const std::string& message, int line) : Error(message), line_(line) {}

std::string to_string(Study study) {
  for (const auto& [s, name] : study_names())
    if (s == study) return name;
  return "unknown";
}

std::optional<Study> study_from_string(std::string_view name) {
  for (const auto& [s, n] : study_names())
    if (n == name) return s;
  return std::nullopt;
}

const std::vector<Study>& all_studies() {
  static const std::vector<Study> studies = [] {
    std::vector<Study> out;
    for (const auto& entry : study_names()) out.push_back(entry.first);
    return out;
  }();
  return studies;
}

ParticleList parse_sites(std::string_view text, int dim) {
  ParticleList out(dim);
  text = trim(text);
  if (text.empty()) return out;
  for (auto site : split(text, ';')) {
    auto coords = split(site, ',');
    if (coords.size() != static_cast<std::size_t>(dim))
      throw DomainError("site '" + std::string(site) + "' does not have " + std::to_string(dim) +
                        " coordinate(s)");
    std::vector<Coord> x;
    for (auto c : coords) {
      Coord v = 0;
      auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (c.empty() || ec != std::errc() || ptr != c.data() + c.size())
        throw DomainError("bad coordinate '" + std::string(c) + "'");
      x.push_back(v);
    }
    out.push_back(x);
  }
  return out;
}

ExperimentConfig parse_config(std::string_view text, std::optional<Study> study) {
  std::map<std::string, Value> values;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto eol = text.find('\n', start);
    std::string_view line = text.substr(start, eol == std::string_view::npos ? text.size() - start : eol - start);
    start = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key", line_no);
    if (auto it = values.find(key); it != values.end())
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key +
                            "' (first set on line " + std::to_string(it->second.line) + ")",
                        line_no);
    values.emplace(key, Value{key, value, line_no});
  }

  if (auto it = values.find("study"); it != values.end()) {
    auto named = study_from_string(it->second.text);
    if (!named) it->second.fail("unknown study '" + it->second.text + "'");
    if (study && *study != *named)
      it->second.fail("config is for '" + it->second.text + "' but '" + to_string(*study) +
                      "' was requested");
    study = named;
  }
  if (!study) throw ConfigError("missing required key 'study'", 0);

  ExperimentConfig cfg = study_defaults(*study);
  const Mask self = bit(*study);
  for (const auto& [key, value] : values) {
    if (key == "study") continue;
    auto rule = std::find_if(key_table().begin(), key_table().end(),
                             [&](const KeyRule& k) { return key == k.name; });
    if (rule == key_table().end()) value.fail("unknown key");
    if (!(rule->studies & self)) value.fail("not used by study '" + to_string(*study) + "'");
  }
  for (const auto& rule : key_table()) {
    auto it = values.find(rule.name);
    if (it == values.end()) {
      if (rule.required & self)
        throw ConfigError("missing required key '" + std::string(rule.name) + "' for study '" +
                              to_string(*study) + "'",
                          0);
      continue;
    }
    const Value& v = it->second;
    const bool list_key = std::string_view(rule.name) == "xi" || std::string_view(rule.name) == "eta" ||
                          std::string_view(rule.name) == "compare_x" ||
                          std::string_view(rule.name) == "mc_xi" || std::string_view(rule.name) == "mc_eta";
    if (v.text.empty() && !list_key) v.fail("empty value");
    rule.set(cfg, v);
  }
  cross_validate(cfg, values);
  return cfg;
}

std::string default_config_text(Study study) {
  switch (study) {
    case Study::SelfDuality:
      return "study = self-duality\n"
             "d = 1\nboundary = torus\nside = 5\nm = 2\n"
             "xi = 0;1\neta = 0;0;2\ntimes = 0.5,1,2\n"
             "# Monte Carlo arm\n"
             "mc_replicas = 100000\nmc_side = 7\nmc_xi = 0;1\nmc_eta = 0;0;1;2\nmc_time = 1\n";
    case Study::Stationarity:
      return "study = stationarity\n"
             "d = 1\nboundary = torus\nside = 10\nm = 2\nlambda = 0.4\n"
             "xi_sizes = 1,2,3\ntimes = 0.5,1\nreplicas = 100000\n";
    case Study::Coupling:
      return "study = coupling\n"
             "d = 1\nboundary = infinite\nm = 2\n"
             "x = 0;10\ny = 3;17\ntimes = 100,1000,10000\nreplicas = 500\n"
             "delta = 0.5\nschedule_start = 100\nschedule_doublings = 16\n";
    case Study::OrDistance:
      return "study = or-distance\n"
             "d = 1\nboundary = infinite\nm = 2\n"
             "x = 0;1\ntimes = 100,1000,10000\nreplicas = 1000\n";
    case Study::Convergence:
      return "study = convergence\n"
             "d = 1\nboundary = infinite\nm = 2\n"
             "law = poisson\ntheta = 1\nxi = 0;1\ntimes = 1,10,100\nreplicas = 10000\n";
    case Study::Correlation:
      return "study = correlation\n"
             "d = 1\nboundary = torus\nside = 5\nm = 2\n"
             "mixture = 0.2:0.5,0.6:0.5\nn = 2\nreplicas = 100000\n";
    case Study::Factorization:
      return "study = factorization\n"
             "d = 1\nboundary = torus\nside = 5\nm = 2\nlambda = 0.4\n"
             "split_first = 1\nsplit_second = 2\n"
             "eta = 0;0;1\ncesaro_xi_size = 2\ncesaro_horizons = 1,2,4,8,16,32\n";
    case Study::OracleCheck:
      return "study = oracle-check\n"
             "d = 1\nboundary = torus\nside = 5\nm = 2\n"
             "xi = 0;1\neta = 0;0;2\ntimes = 0.5,1,2\n"
             "sim_replicas = 100000\nsim_time = 1\n";
  }
  return {};
}

ExperimentConfig default_config(Study study) { return parse_config(default_config_text(study)); }

Geometry ExperimentConfig::geometry() const { return geometry(side); }

Geometry ExperimentConfig::geometry(Coord side_override) const {
  return boundary == Boundary::Torus ? Geometry::torus(d, side_override) : Geometry::infinite(d);
}

SipParams ExperimentConfig::params() const {
  SipParams p;
  p.m = m;
  p.geometry = geometry();
  return p;
}

InitialLaw ExperimentConfig::initial_law() const {
  switch (law) {
    case LawKind::Poisson:
      return PoissonProduct{theta};
    case LawKind::Nu:
      return NuLambda{lambda};
    case LawKind::Mixture:
      return NuMixture{mixture};
  }
  return PoissonProduct{theta};
}

}  // namespace sipsim
