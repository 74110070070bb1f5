#include "optlat/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "optlat/errors.hpp"
#include "optlat/io.hpp"

namespace optlat {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

using EntryMap = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const std::map<std::string, std::vector<std::string>>& known_keys() {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"model", {"d", "eps0", "U0", "U", "eta", "tau0", "delta"}},
      {"solver",
       {"dt", "t_final", "scheme", "alpha", "gamma", "eps_reg", "picard_tol", "picard_max"}},
      {"grid", {"N"}},
      {"initial", {"preset", "n0", "W0", "amplitude", "mode", "W_amplitude"}},
      {"output", {"dir", "times", "timeseries_stride", "plot"}},
      {"convergence", {"axis", "grids", "ref_N", "dts", "ref_dt", "cells", "variable", "parallel"}},
      {"quadrature", {"M"}},
      {"query", {"lambda0", "lambda1", "n", "E"}},
      {"check", {"conservation_tol", "steady_tol"}},
  };
  return keys;
}

void require_known(const std::string& section, const std::string& key, int line) {
  const auto& keys = known_keys();
  const auto it = keys.find(section);
  if (it == keys.end()) throw ParseError("unknown section [" + section + "]", line);
  for (const auto& k : it->second)
    if (k == key) return;
  throw ParseError("unknown key '" + section + "." + key + "'", line);
}

double parse_real(const std::string& text, const std::string& key, int line) {
  const std::string s = trim(text);
  auto number = [&](std::string_view part) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size())
      throw ParseError("malformed number '" + s + "' for " + key, line);
    return v;
  };
  const auto slash = s.find('/');
  if (slash == std::string::npos) return number(s);
  const std::string_view view(s);
  return number(trim(std::string(view.substr(0, slash)))) /
         number(trim(std::string(view.substr(slash + 1))));
}

long parse_integer(const std::string& text, const std::string& key, int line) {
  const std::string s = trim(text);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("malformed integer '" + s + "' for " + key, line);
  return v;
}

bool parse_bool(const std::string& text, const std::string& key, int line) {
  const std::string s = trim(text);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ParseError("expected true or false for " + key + ", got '" + s + "'", line);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

EntryMap read_entries(const std::string& text) {
  EntryMap entries;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find_first_of("#;");
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError("unterminated section header", line);
      section = trim(s.substr(1, s.size() - 2));
      if (!known_keys().count(section)) throw ParseError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line);
    if (section.empty()) throw ParseError("key outside of any section", line);
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw ParseError("empty key", line);
    require_known(section, key, line);
    const std::string full = section + "." + key;
    if (entries.count(full)) throw ParseError("duplicate key '" + full + "'", line);
    entries[full] = Entry{trim(s.substr(eq + 1)), line};
  }
  return entries;
}

// Consumes entries into the typed configuration.
class Reader {
 public:
  explicit Reader(EntryMap entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  template <class Fn>
  void take(const std::string& key, Fn&& fn) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return;
    fn(it->second.value, it->second.line);
  }

  void real(const std::string& key, double& out) {
    take(key, [&](const std::string& v, int line) { out = parse_real(v, key, line); });
  }
  void integer(const std::string& key, int& out) {
    take(key, [&](const std::string& v, int line) {
      out = static_cast<int>(parse_integer(v, key, line));
    });
  }
  void integer(const std::string& key, long& out) {
    take(key, [&](const std::string& v, int line) { out = parse_integer(v, key, line); });
  }
  void boolean(const std::string& key, bool& out) {
    take(key, [&](const std::string& v, int line) { out = parse_bool(v, key, line); });
  }
  int line(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

 private:
  EntryMap entries_;
};

RunConfig build(EntryMap entries) {
  RunConfig cfg;
  Reader r(std::move(entries));

  r.integer("model.d", cfg.model.d);
  r.real("model.eps0", cfg.model.eps0);
  r.real("model.U0", cfg.model.U0);
  r.real("model.eta", cfg.model.eta);
  r.real("model.tau0", cfg.model.tau0);
  r.real("model.delta", cfg.model.delta);
  if (r.has("model.U")) {
    if (r.has("model.U0")) throw ParseError("model.U and model.U0 are exclusive", r.line("model.U"));
    double U = 0.0;
    r.real("model.U", U);
    cfg.model.U0 = U * 2.0 * cfg.model.d * cfg.model.eps0 * cfg.model.eps0;
  }

  cfg.dt_given = r.has("solver.dt");
  cfg.t_final_given = r.has("solver.t_final");
  r.real("solver.dt", cfg.solver.dt);
  r.real("solver.t_final", cfg.solver.t_final);
  r.take("solver.scheme", [&](const std::string& v, int line) {
    try {
      cfg.solver.scheme = scheme_from_string(v);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line);
    }
  });
  r.real("solver.alpha", cfg.solver.alpha);
  r.take("solver.gamma", [&](const std::string& v, int line) {
    cfg.solver.gamma = parse_real(v, "solver.gamma", line);
  });
  r.real("solver.eps_reg", cfg.solver.eps_reg);
  r.real("solver.picard_tol", cfg.solver.picard_tol);
  r.integer("solver.picard_max", cfg.solver.picard_max);

  r.integer("grid.N", cfg.N);

  r.take("initial.preset", [&](const std::string& v, int line) {
    try {
      cfg.initial.kind = initial_kind_from_string(v, &cfg.initial.path);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line);
    }
  });
  r.real("initial.n0", cfg.initial.n0);
  r.real("initial.W0", cfg.initial.W0);
  r.real("initial.amplitude", cfg.initial.amplitude);
  r.integer("initial.mode", cfg.initial.mode);
  r.real("initial.W_amplitude", cfg.initial.W_amplitude);

  r.take("output.dir", [&](const std::string& v, int) { cfg.output.dir = v; });
  r.take("output.times", [&](const std::string& v, int line) {
    cfg.output.times.clear();
    for (const auto& item : split_list(v))
      cfg.output.times.push_back(parse_real(item, "output.times", line));
  });
  r.integer("output.timeseries_stride", cfg.output.timeseries_stride);
  r.boolean("output.plot", cfg.output.plot);

  r.take("convergence.axis", [&](const std::string& v, int line) {
    if (v == "space") cfg.convergence.axis = StudyAxis::space;
    else if (v == "time") cfg.convergence.axis = StudyAxis::time;
    else throw ParseError("convergence.axis must be 'space' or 'time'", line);
  });
  r.take("convergence.grids", [&](const std::string& v, int line) {
    cfg.convergence.grids.clear();
    for (const auto& item : split_list(v))
      cfg.convergence.grids.push_back(static_cast<int>(parse_integer(item, "convergence.grids", line)));
  });
  r.integer("convergence.ref_N", cfg.convergence.ref_N);
  r.take("convergence.dts", [&](const std::string& v, int line) {
    cfg.convergence.dts.clear();
    for (const auto& item : split_list(v))
      cfg.convergence.dts.push_back(parse_real(item, "convergence.dts", line));
  });
  r.real("convergence.ref_dt", cfg.convergence.ref_dt);
  r.integer("convergence.cells", cfg.convergence.cells);
  r.take("convergence.variable", [&](const std::string& v, int line) {
    if (v == "n") cfg.convergence.variable = ErrorVariable::n;
    else if (v == "W") cfg.convergence.variable = ErrorVariable::W;
    else if (v == "both") cfg.convergence.variable = ErrorVariable::both;
    else throw ParseError("convergence.variable must be n, W or both", line);
  });
  r.boolean("convergence.parallel", cfg.convergence.parallel);

  r.integer("quadrature.M", cfg.quadrature_M);

  r.real("query.lambda0", cfg.query.lambda0);
  r.real("query.lambda1", cfg.query.lambda1);
  r.real("query.n", cfg.query.n);
  r.real("query.E", cfg.query.E);

  r.real("check.conservation_tol", cfg.check.conservation_tol);
  r.take("check.steady_tol", [&](const std::string& v, int line) {
    cfg.check.steady_tol = parse_real(v, "check.steady_tol", line);
  });
  return cfg;
}

template <class T, class Fmt>
std::string join(const std::vector<T>& items, Fmt fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += fmt(items[i]);
  }
  return out;
}

}  // namespace

Override parse_override(const std::string& arg) {
  if (arg.rfind("--", 0) != 0) throw ParseError("override '" + arg + "' must start with --", 0);
  const auto eq = arg.find('=');
  const auto dot = arg.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ParseError("override '" + arg + "' must look like --section.key=value", 0);
  return {arg.substr(2, eq - 2), arg.substr(eq + 1)};
}

RunConfig parse_config_text(const std::string& text, const std::vector<Override>& overrides) {
  EntryMap entries = read_entries(text);
  for (const auto& [name, value] : overrides) {
    const auto dot = name.find('.');
    if (dot == std::string::npos) throw ParseError("override '" + name + "' lacks a section", 0);
    require_known(name.substr(0, dot), name.substr(dot + 1), 0);
    entries[name] = Entry{trim(value), 0};
  }
  return build(std::move(entries));
}

RunConfig parse_config_file(const std::filesystem::path& path,
                            const std::vector<Override>& overrides) {
  std::ifstream is(path);
  if (!is) throw ValidationError("config file '" + path.string() + "' cannot be opened");
  std::ostringstream text;
  text << is.rdbuf();
  return parse_config_text(text.str(), overrides);
}

void validate_config(const RunConfig& config, Command command) {
  config.model.validate();
  config.solver.validate();
  if (config.N < 4) throw ValidationError("grid.N must be at least 4");
  if (config.initial.kind == InitialSpec::Kind::file &&
      !std::filesystem::exists(config.initial.path))
    throw ValidationError("initial snapshot '" + config.initial.path + "' does not exist");
  if (config.initial.mode < 0) throw ValidationError("initial.mode must be nonnegative");
  if (config.output.timeseries_stride < 1)
    throw ValidationError("output.timeseries_stride must be at least 1");
  for (double t : config.output.times)
    if (!(t >= 0.0) || t > config.solver.t_final)
      throw ValidationError("output.times must lie in [0, solver.t_final]");
  if (config.check.steady_tol && !(*config.check.steady_tol > 0.0))
    throw ValidationError("check.steady_tol must be positive");
  if (!(config.check.conservation_tol > 0.0))
    throw ValidationError("check.conservation_tol must be positive");
  QuadratureSpec{config.quadrature_M, config.model.d}.validate();

  switch (command) {
    case Command::simulate:
      if (!config.dt_given) throw ValidationError("missing required key solver.dt");
      if (!config.t_final_given) throw ValidationError("missing required key solver.t_final");
      break;
    case Command::convergence: {
      if (!config.dt_given) throw ValidationError("missing required key solver.dt");
      if (!config.t_final_given) throw ValidationError("missing required key solver.t_final");
      const auto& c = config.convergence;
      if (c.axis == StudyAxis::space && c.grids.empty())
        throw ValidationError("convergence.grids must not be empty");
      if (c.axis == StudyAxis::time && c.dts.empty())
        throw ValidationError("convergence.dts must not be empty");
      if (c.cells < 4) throw ValidationError("convergence.cells must be at least 4");
      break;
    }
    case Command::moments:
    case Command::invert:
    case Command::verify_integrals:
      break;
  }
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  const auto num = [](double v) { return format_double(v); };
  os << "[model]\n"
     << "d = " << c.model.d << "\n"
     << "eps0 = " << num(c.model.eps0) << "\n"
     << "U0 = " << num(c.model.U0) << "\n"
     << "eta = " << num(c.model.eta) << "\n"
     << "tau0 = " << num(c.model.tau0) << "\n"
     << "delta = " << num(c.model.delta) << "\n\n";

  os << "[solver]\n";
  if (c.dt_given) os << "dt = " << num(c.solver.dt) << "\n";
  if (c.t_final_given) os << "t_final = " << num(c.solver.t_final) << "\n";
  os << "scheme = " << to_string(c.solver.scheme) << "\n"
     << "alpha = " << num(c.solver.alpha) << "\n";
  if (c.solver.gamma) os << "gamma = " << num(*c.solver.gamma) << "\n";
  os << "eps_reg = " << num(c.solver.eps_reg) << "\n"
     << "picard_tol = " << num(c.solver.picard_tol) << "\n"
     << "picard_max = " << c.solver.picard_max << "\n\n";

  os << "[grid]\nN = " << c.N << "\n\n";

  os << "[initial]\n"
     << "preset = " << c.initial.name() << "\n"
     << "n0 = " << num(c.initial.n0) << "\n"
     << "W0 = " << num(c.initial.W0) << "\n"
     << "amplitude = " << num(c.initial.amplitude) << "\n"
     << "mode = " << c.initial.mode << "\n"
     << "W_amplitude = " << num(c.initial.W_amplitude) << "\n\n";

  os << "[output]\n"
     << "dir = " << c.output.dir << "\n"
     << "times = " << join(c.output.times, num) << "\n"
     << "timeseries_stride = " << c.output.timeseries_stride << "\n"
     << "plot = " << (c.output.plot ? "true" : "false") << "\n\n";

  const auto& v = c.convergence;
  os << "[convergence]\n"
     << "axis = " << to_string(v.axis) << "\n"
     << "grids = " << join(v.grids, [](int g) { return std::to_string(g); }) << "\n"
     << "ref_N = " << v.ref_N << "\n"
     << "dts = " << join(v.dts, num) << "\n"
     << "ref_dt = " << num(v.ref_dt) << "\n"
     << "cells = " << v.cells << "\n"
     << "variable = " << to_string(v.variable) << "\n"
     << "parallel = " << (v.parallel ? "true" : "false") << "\n\n";

  os << "[quadrature]\nM = " << c.quadrature_M << "\n\n";

  os << "[query]\n"
     << "lambda0 = " << num(c.query.lambda0) << "\n"
     << "lambda1 = " << num(c.query.lambda1) << "\n"
     << "n = " << num(c.query.n) << "\n"
     << "E = " << num(c.query.E) << "\n\n";

  os << "[check]\n"
     << "conservation_tol = " << num(c.check.conservation_tol) << "\n";
  if (c.check.steady_tol) os << "steady_tol = " << num(*c.check.steady_tol) << "\n";
  return os.str();
}

}  // namespace optlat
