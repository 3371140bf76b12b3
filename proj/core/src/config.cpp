#include "stablescat/config.hpp"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "stablescat/errors.hpp"

namespace stablescat {

namespace {

namespace pt = boost::property_tree;

/// Line of "key =" inside [section], 0 when absent.
int key_line(const std::string& text, const std::string& section, const std::string& key) {
  std::istringstream is(text);
  std::string line, current;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    if (line[b] == '[') {
      current = line.substr(b + 1, line.find(']') - b - 1);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || current != section) continue;
    std::string k = line.substr(b, eq - b);
    k.erase(k.find_last_not_of(" \t") + 1);
    if (k == key) return n;
  }
  return 0;
}

class Reader {
 public:
  Reader(const std::string& text, const pt::ptree& tree) : text_(text), tree_(tree) {}

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& what) const {
    throw ConfigError(section + "." + key, key_line(text_, section, key), what);
  }

  bool has(const std::string& section, const std::string& key) const {
    const auto s = tree_.get_child_optional(section);
    return s && s->get_child_optional(pt::ptree::path_type(key, '\0'));
  }

  std::string str(const std::string& section, const std::string& key, const std::string& def) {
    seen_.insert(section + "." + key);
    if (!has(section, key)) return def;
    return tree_.get_child(section).get<std::string>(pt::ptree::path_type(key, '\0'));
  }

  std::string required(const std::string& section, const std::string& key) {
    if (!has(section, key)) throw ConfigError(section + "." + key, 0, "required key is missing");
    return str(section, key, "");
  }

  double num(const std::string& section, const std::string& key, double def) {
    const std::string s = str(section, key, "");
    if (s.empty()) return def;
    return to_double(section, key, s);
  }

  int integer(const std::string& section, const std::string& key, int def) {
    const double v = num(section, key, def);
    if (v != std::floor(v) || std::abs(v) > 2e9) fail(section, key, "expected an integer");
    return int(v);
  }

  bool flag(const std::string& section, const std::string& key, bool def) {
    const std::string s = str(section, key, def ? "true" : "false");
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    fail(section, key, "expected a boolean, got '" + s + "'");
  }

  std::vector<double> list(const std::string& section, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(str(section, key, ""));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item.erase(0, item.find_first_not_of(" \t"));
      item.erase(item.find_last_not_of(" \t") + 1);
      if (item.empty()) continue;
      out.push_back(to_double(section, key, item));
    }
    return out;
  }

  /// Every key present in the file must have been read.
  void reject_unknown() const {
    for (const auto& [section, body] : tree_) {
      if (body.empty() && !body.data().empty()) throw ConfigError(section, key_line(text_, "", section), "key outside a section");
      for (const auto& kv : body)
        if (!seen_.count(section + "." + kv.first)) fail(section, kv.first, "unknown key");
    }
  }

 private:
  double to_double(const std::string& section, const std::string& key, const std::string& s) const {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      fail(section, key, "expected a number, got '" + s + "'");
    }
    if (used != s.size()) fail(section, key, "expected a number, got '" + s + "'");
    return v;
  }

  const std::string& text_;
  const pt::ptree& tree_;
  std::set<std::string> seen_;
};

std::string hex(const unsigned char* p, unsigned n) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < n; ++i) {
    s += digits[p[i] >> 4];
    s += digits[p[i] & 15];
  }
  return s;
}

std::string digest(const EVP_MD* md, const std::string& bytes) {
  unsigned char out[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), out, &len, md, nullptr) != 1) throw std::runtime_error("digest failed");
  return hex(out, len);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

}  // namespace

SweepKind parse_sweep_kind(const std::string& s) {
  static const std::map<std::string, SweepKind> names{
      {"semiclassical", SweepKind::semiclassical}, {"small_eps", SweepKind::small_eps},
      {"time_average", SweepKind::time_average},   {"bracket", SweepKind::bracket},
      {"discreteness", SweepKind::discreteness},   {"capacity", SweepKind::capacity}};
  const auto it = names.find(s);
  if (it == names.end()) throw ConfigError("sweep.kind", 0, "unknown sweep kind '" + s + "'");
  return it->second;
}

std::string sweep_kind_name(SweepKind k) {
  switch (k) {
    case SweepKind::semiclassical: return "semiclassical";
    case SweepKind::small_eps: return "small_eps";
    case SweepKind::time_average: return "time_average";
    case SweepKind::bracket: return "bracket";
    case SweepKind::discreteness: return "discreteness";
    case SweepKind::capacity: return "capacity";
  }
  return "?";
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", int(e.line()), e.message());
  }
  Reader in(text, tree);
  ExperimentConfig cfg;

  const int d = in.integer("model", "d", 3);
  const double alpha = in.num("model", "alpha", 1.0);
  try {
    cfg.model = make_model(d, alpha);
  } catch (const DomainError& e) {
    in.fail("model", "alpha", e.what());
  }

  try {
    const auto kind = parse_potential_kind(in.str("potential", "kind", "zero"));
    const double height = in.num("potential", "height", 1.0), radius = in.num("potential", "radius", 1.0);
    const auto c = in.list("potential", "center");
    if (!c.empty() && int(c.size()) != d) in.fail("potential", "center", "needs d coordinates");
    Point center{};
    for (std::size_t i = 0; i < c.size(); ++i) center[i] = c[i];
    if (height < 0.0) in.fail("potential", "height", "must be nonnegative");
    if (!(radius > 0.0)) in.fail("potential", "radius", "must be positive");
    switch (kind) {
      case PotentialKind::zero: cfg.potential = zero_potential(d); break;
      case PotentialKind::ball: cfg.potential = ball_potential(d, height, radius, center); break;
      case PotentialKind::bump: cfg.potential = bump_potential(d, height, radius, center); break;
      case PotentialKind::quadratic: cfg.potential = quadratic_potential(d, height); break;
    }
  } catch (const DomainError& e) {
    in.fail("potential", "kind", e.what());
  }

  const std::string jkind = in.str("jump", "kind", "none");
  {
    Profile phi;
    try {
      phi.kind = parse_phi_kind(in.str("jump", "phi", "power"));
    } catch (const std::logic_error& e) {
      in.fail("jump", "phi", e.what());
    }
    phi.beta = in.num("jump", "beta", 2.0);
    phi.iter = in.integer("jump", "iter", 1);
    const double R = in.num("jump", "R", 1.0), Rp = in.num("jump", "Rp", 0.5);
    const auto gr = in.list("jump", "grid_r"), gt = in.list("jump", "grid_T");
    if (!(phi.beta > 0.0)) in.fail("jump", "beta", "must be positive");
    if (!(R > 0.0)) in.fail("jump", "R", "must be positive");
    if (!(Rp > 0.0)) in.fail("jump", "Rp", "must be positive");
    try {
      if (jkind == "none")
        cfg.jump = zero_functional();
      else if (jkind == "shell")
        cfg.jump = make_shell_functional(phi, R, Rp);
      else if (jkind == "user_grid")
        cfg.jump = make_user_grid(phi, R, Rp, gr, gt);
      else
        in.fail("jump", "kind", "unknown jump kind '" + jkind + "'");
    } catch (const DomainError& e) {
      in.fail("jump", "kind", e.what());
    }
  }

  cfg.mc.n_paths = in.integer("mc", "n_paths", 1000);
  cfg.mc.horizon = in.num("mc", "horizon", 0.0);
  cfg.mc.exit_radius = in.num("mc", "exit_radius", 0.0);
  cfg.mc.delta = in.num("mc", "delta", 0.02);
  cfg.mc.dt_max = in.num("mc", "dt_max", 1e-3);
  cfg.mc.tail_target = in.num("mc", "tail_target", 1e-3);
  if (cfg.mc.n_paths < 2) in.fail("mc", "n_paths", "needs at least 2 paths");
  if (!(cfg.mc.delta > 0.0)) in.fail("mc", "delta", "must be positive");
  if (!(cfg.mc.dt_max > 0.0)) in.fail("mc", "dt_max", "must be positive");
  if (!(cfg.mc.tail_target > 0.0 && cfg.mc.tail_target < 1.0)) in.fail("mc", "tail_target", "must lie in (0, 1)");
  {
    const std::string s = in.required("mc", "seed");
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty() || s[0] == '-') in.fail("mc", "seed", "expected a nonnegative integer");
    cfg.mc.seed = v;
  }

  try {
    cfg.sweep = parse_sweep_kind(in.required("sweep", "kind"));
  } catch (const ConfigError&) {
    if (!in.has("sweep", "kind")) throw;
    in.fail("sweep", "kind", "unknown sweep kind");
  }
  cfg.grid = in.list("sweep", "grid");
  if (cfg.grid.empty()) in.fail("sweep", "grid", "sweep grid is empty");
  for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
    if (!(cfg.grid[i] > 0.0)) in.fail("sweep", "grid", "grid values must be positive");
    if (i > 0 && !(cfg.grid[i] > cfg.grid[i - 1])) in.fail("sweep", "grid", "grid must be increasing");
  }
  {
    const std::string route = in.str("sweep", "route", "time_average");
    if (route == "expression")
      cfg.route = GammaVariant::expression;
    else if (route != "time_average")
      in.fail("sweep", "route", "expected time_average or expression");
  }
  if (in.has("sweep", "t_grid")) {
    cfg.t_grid = in.list("sweep", "t_grid");
    if (cfg.t_grid.empty()) in.fail("sweep", "t_grid", "time grid is empty");
    for (std::size_t i = 0; i < cfg.t_grid.size(); ++i)
      if (!(cfg.t_grid[i] > 0.0) || (i > 0 && !(cfg.t_grid[i] > cfg.t_grid[i - 1])))
        in.fail("sweep", "t_grid", "time grid must be positive and increasing");
  }

  cfg.spectral.n_cells = in.integer("spectral", "n_cells", 16);
  try {
    cfg.spectral.boundary = parse_boundary(in.str("spectral", "boundary", "neumann"));
  } catch (const ConfigError&) {
    in.fail("spectral", "boundary", "expected neumann or dirichlet");
  }
  cfg.spectral.side = in.num("spectral", "side", 1.0);
  cfg.spectral.levy_prefactor = in.flag("spectral", "levy_prefactor", false);
  if (cfg.spectral.n_cells < 4) in.fail("spectral", "n_cells", "needs at least 4 cells per axis");
  if (!(cfg.spectral.side > 0.0)) in.fail("spectral", "side", "must be positive");

  cfg.scan.r = in.num("scan", "r", 0.0);
  cfg.scan.xi_min = in.num("scan", "xi_min", 2.0);
  cfg.scan.xi_max = in.num("scan", "xi_max", 32.0);
  cfg.scan.n_xi = in.integer("scan", "n_xi", 5);
  if (cfg.scan.r > 1.0) in.fail("scan", "r", "must not exceed 1");
  if (!(cfg.scan.xi_min > 0.0)) in.fail("scan", "xi_min", "must be positive");
  if (!(cfg.scan.xi_max > cfg.scan.xi_min)) in.fail("scan", "xi_max", "must exceed xi_min");
  if (cfg.scan.n_xi < 2) in.fail("scan", "n_xi", "needs at least 2 cubes");

  cfg.capacity.set = in.str("capacity", "set", "ball:1");
  try {
    parse_compact_set(cfg.capacity.set, d);
  } catch (const ConfigError& e) {
    in.fail("capacity", "set", e.what());
  }
  if (in.has("capacity", "cells")) {
    cfg.capacity.cells.clear();
    for (double v : in.list("capacity", "cells")) {
      if (v != std::floor(v) || v < 2) in.fail("capacity", "cells", "expected integers >= 2");
      cfg.capacity.cells.push_back(int(v));
    }
    if (cfg.capacity.cells.size() < 2) in.fail("capacity", "cells", "needs two or more lattices");
  } else {
    in.list("capacity", "cells");
  }
  cfg.capacity.n_paths = in.integer("capacity", "n_paths", 20000);
  if (cfg.capacity.n_paths < 2) in.fail("capacity", "n_paths", "needs at least 2 paths");

  cfg.output.csv = in.str("output", "csv", "");
  cfg.output.plot = in.flag("output", "plot", false);

  if (cfg.sweep == SweepKind::bracket && !(cfg.model.alpha < 1.0)) in.fail("model", "alpha", "bracket sweeps need alpha < 1");
  in.reject_unknown();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("", 0, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_config(const ExperimentConfig& c) {
  std::ostringstream os;
  const auto& p = c.potential;
  const auto& j = c.jump;
  os << "model.d = " << c.model.d << "\nmodel.alpha = " << fmt(c.model.alpha) << "\n";
  os << "potential.kind = " << potential_kind_name(p.kind) << "\npotential.height = " << fmt(p.height)
     << "\npotential.radius = " << fmt(p.radius) << "\npotential.center = ";
  std::vector<double> center;
  const Point pc = p.support_center();
  for (int i = 0; i < c.model.d; ++i) center.push_back(pc[i]);
  os << fmt_list(center) << "\n";
  os << "jump.kind = " << (j.is_zero() ? "none" : (j.kind == FKind::shell ? "shell" : "user_grid")) << "\n";
  if (!j.is_zero()) {
    os << "jump.phi = " << j.phi.name() << "\njump.beta = " << fmt(j.phi.beta) << "\njump.iter = " << j.phi.iter
       << "\njump.R = " << fmt(j.R) << "\njump.Rp = " << fmt(j.Rp) << "\n";
    if (j.kind == FKind::user_grid) os << "jump.grid_r = " << fmt_list(j.grid_r) << "\njump.grid_T = " << fmt_list(j.grid_T) << "\n";
  }
  os << "mc.n_paths = " << c.mc.n_paths << "\nmc.horizon = " << fmt(c.mc.horizon) << "\nmc.exit_radius = "
     << fmt(c.mc.exit_radius) << "\nmc.delta = " << fmt(c.mc.delta) << "\nmc.dt_max = " << fmt(c.mc.dt_max)
     << "\nmc.tail_target = " << fmt(c.mc.tail_target) << "\nmc.seed = " << c.mc.seed << "\n";
  os << "sweep.kind = " << sweep_kind_name(c.sweep) << "\nsweep.grid = " << fmt_list(c.grid) << "\nsweep.route = "
     << (c.route == GammaVariant::expression ? "expression" : "time_average") << "\nsweep.t_grid = " << fmt_list(c.t_grid)
     << "\n";
  os << "spectral.n_cells = " << c.spectral.n_cells << "\nspectral.boundary = "
     << (c.spectral.boundary == Boundary::dirichlet ? "dirichlet" : "neumann") << "\nspectral.side = "
     << fmt(c.spectral.side) << "\nspectral.levy_prefactor = " << (c.spectral.levy_prefactor ? "true" : "false") << "\n";
  os << "scan.r = " << fmt(c.scan.r) << "\nscan.xi_min = " << fmt(c.scan.xi_min) << "\nscan.xi_max = "
     << fmt(c.scan.xi_max) << "\nscan.n_xi = " << c.scan.n_xi << "\n";
  std::vector<double> cells(c.capacity.cells.begin(), c.capacity.cells.end());
  os << "capacity.set = " << c.capacity.set << "\ncapacity.cells = " << fmt_list(cells)
     << "\ncapacity.n_paths = " << c.capacity.n_paths << "\n";
  os << "output.csv = " << c.output.csv << "\noutput.plot = " << (c.output.plot ? "true" : "false") << "\n";
  return os.str();
}

std::string sha256_hex(const std::string& bytes) { return digest(EVP_sha256(), bytes); }

std::string config_hash(const ExperimentConfig& cfg) { return sha256_hex(canonical_config(cfg)); }

std::string git_blob_digest(const std::string& bytes) {
  std::string blob = "blob " + std::to_string(bytes.size());
  blob.push_back('\0');
  blob += bytes;
  return digest(EVP_sha1(), blob);
}

}  // namespace stablescat
