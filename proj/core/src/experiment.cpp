#include "stablescat/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "stablescat/errors.hpp"
#include "stablescat/scattering.hpp"

namespace stablescat {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string flag(bool b) { return b ? "1" : "0"; }

std::vector<double> ta_grid(const ExperimentConfig& cfg) {
  return cfg.route == GammaVariant::time_average ? cfg.t_grid : std::vector<double>{};
}

Point axis_point(double t) {
  Point p{};
  p[0] = t;
  return p;
}

/// Capacity of the closed support of V plus the support of F1, or NaN when unbounded.
double support_capacity(const ExperimentConfig& cfg) {
  const auto& m = cfg.model;
  std::vector<Ball> balls;
  if (!cfg.potential.is_zero()) balls.push_back(Ball{cfg.potential.support_center(), cfg.potential.support_radius()});
  if (!cfg.jump.is_zero()) balls.push_back(Ball{cfg.jump.support_center(), cfg.jump.support_radius()});
  if (balls.empty()) return 0.0;
  for (const auto& b : balls)
    if (!std::isfinite(b.radius)) return std::numeric_limits<double>::quiet_NaN();
  for (const auto& outer : balls) {
    const bool covers = std::all_of(balls.begin(), balls.end(), [&](const Ball& b) {
      return distance(b.center, outer.center) + b.radius <= outer.radius;
    });
    if (covers) return ball_capacity(m, outer.radius);
  }
  return capacity_extrapolated(m, union_set(m.d, balls), cfg.capacity.cells).cap;
}

CsvTable run_semiclassical(const ExperimentConfig& cfg, std::vector<std::string>& failures) {
  const auto& m = cfg.model;
  const bool pcaf = !cfg.jump.is_zero();
  const auto pb = make_scattering_problem(m, cfg.potential, cfg.jump, cfg.mc.delta, cfg.grid, pcaf);
  const auto tab = semiclassical_sweep(pb, cfg.grid, cfg.mc, ta_grid(cfg));
  const double cap = support_capacity(cfg);

  std::vector<Point> xs;
  if (pcaf) {
    const double outer = cfg.jump.support_radius();
    for (int i = 0; i < 20; ++i) xs.push_back(cfg.jump.support_center() + axis_point(outer * i / 20.0));
  }

  CsvTable t;
  t.columns = {"p", "gamma", "stderr", "bias_bound", "bound", "pcaf_gamma", "pcaf_stderr", "psi_ratio", "cap_oracle",
               "rel_gap"};
  for (std::size_t i = 0; i < tab.rows.size(); ++i) {
    const auto& r = tab.rows[i];
    const bool has_pcaf = i < tab.pcaf_rows.size();
    double psi = std::numeric_limits<double>::quiet_NaN();
    if (pcaf) {
      const auto rep = check_psi_condition(m, cfg.jump, {r.x}, xs);
      if (!rep.vacuous) psi = rep.min_ratio;
    }
    t.rows.push_back({num(r.x), num(r.estimate.value), num(r.estimate.stderr_), num(r.estimate.bias_bound),
                      num(r.bound), has_pcaf ? num(tab.pcaf_rows[i].estimate.value) : "nan",
                      has_pcaf ? num(tab.pcaf_rows[i].estimate.stderr_) : "nan", num(psi), num(cap),
                      num(cap > 0 ? (r.estimate.value - cap) / cap : std::numeric_limits<double>::quiet_NaN())});
    if (i > 0) {
      const auto& a = tab.rows[i - 1].estimate;
      const auto& b = r.estimate;
      if (b.value < a.value - 3.0 * std::hypot(a.stderr_, b.stderr_))
        failures.push_back("gamma decreases from p=" + num(tab.rows[i - 1].x) + " to p=" + num(r.x));
    }
  }
  if (!tab.rows.empty() && std::isfinite(cap) && cap > 0) {
    const double g = tab.rows.back().estimate.value;
    if (std::abs(g - cap) > 0.1 * cap)
      failures.push_back("final gamma " + num(g) + " not within 10% of the support capacity " + num(cap));
  }
  return t;
}

CsvTable run_small_eps(const ExperimentConfig& cfg, std::vector<std::string>& failures) {
  const auto pb = make_scattering_problem(cfg.model, cfg.potential, cfg.jump, cfg.mc.delta, cfg.grid);
  const auto tab = small_epsilon_sweep(pb, cfg.grid, cfg.mc);
  CsvTable t;
  t.columns = {"eps", "value", "stderr", "target", "rel_gap"};
  for (const auto& r : tab.rows) {
    const double gap = (r.estimate.value - tab.target) / tab.target;
    t.rows.push_back({num(r.x), num(r.estimate.value), num(r.estimate.stderr_), num(tab.target), num(gap)});
    if (r.x <= 1e-3 && std::abs(gap) > 0.05)
      failures.push_back("eps=" + num(r.x) + " relative gap " + num(gap) + " exceeds 5%");
  }
  return t;
}

CsvTable run_time_average(const ExperimentConfig& cfg, std::vector<std::string>& failures) {
  const auto pb = make_scattering_problem(cfg.model, cfg.potential, cfg.jump, cfg.mc.delta, {1.0});
  const Scales s{1.0, 1.0, 0.0};
  const auto ta = gamma_time_average(pb, s, cfg.grid, cfg.mc);
  const auto ex = gamma_expression(pb, s, cfg.mc);
  CsvTable t;
  t.columns = {"label", "t", "value", "stderr"};
  t.x_col = 1;
  t.y_col = 2;
  t.err_col = 3;
  for (const auto& p : ta.points) t.rows.push_back({"t", num(p.t), num(p.value), num(p.stderr_)});
  t.rows.push_back({"extrapolated", "inf", num(ta.estimate.value), num(ta.estimate.stderr_)});
  t.rows.push_back({"expression", "inf", num(ex.value), num(ex.stderr_)});
  const double sig = std::hypot(ta.estimate.stderr_, ex.stderr_);
  if (std::abs(ta.estimate.value - ex.value) > 3.0 * sig)
    failures.push_back("time average " + num(ta.estimate.value) + " and expression " + num(ex.value) +
                       " differ by more than 3 sigma");
  return t;
}

CsvTable run_bracket(const ExperimentConfig& cfg, std::vector<std::string>& failures) {
  AssemblyOptions opt;
  opt.levy_prefactor = cfg.spectral.levy_prefactor;
  const CubeSpec cube{cfg.spectral.side, {}};
  const auto tab = gamma_lambda_bracket(cfg.model, cube, cfg.potential, cfg.jump, cfg.grid, cfg.spectral.n_cells,
                                        cfg.mc, opt);
  CsvTable t;
  t.columns = {"eps", "gamma", "gamma_stderr", "lambda", "lambda_fine", "ratio", "refinement_change", "flagged"};
  for (const auto& r : tab.rows)
    t.rows.push_back({num(r.eps), num(r.gamma.value), num(r.gamma.stderr_), num(r.lambda), num(r.lambda_fine),
                      num(r.ratio), num(r.refinement_change), flag(r.flagged)});
  if (tab.decades > 4.0) failures.push_back("lambda/gamma ratio spans " + num(tab.decades) + " decades");
  if (tab.max_refinement_change > 0.05)
    failures.push_back("lambda refinement change " + num(tab.max_refinement_change) + " exceeds 5%");
  return t;
}

CsvTable run_discreteness(const ExperimentConfig& cfg, std::vector<std::string>& failures) {
  const auto& m = cfg.model;
  const auto& sc = cfg.scan;
  double cap_unit = 0.0;
  if (sc.r <= 0.0) cap_unit = capacity_extrapolated(m, cube_set(m.d, 1.0), cfg.capacity.cells).cap;

  std::vector<Point> xi;
  for (int k = 0; k < sc.n_xi; ++k) {
    const double f = sc.n_xi > 1 ? double(k) / (sc.n_xi - 1) : 0.0;
    xi.push_back(axis_point(sc.xi_min * std::pow(sc.xi_max / sc.xi_min, f)));
  }

  CsvTable t;
  t.columns = {"c", "r", "xi", "gamma", "stderr", "threshold", "holds", "sublevel"};
  t.x_col = 2;
  t.y_col = 3;
  t.err_col = 4;
  for (double c : cfg.grid) {
    const double r = sc.r > 0.0 ? sc.r : std::min(1.0, std::pow(cap_unit / (2.0 * c), 1.0 / m.alpha));
    const auto rep = discreteness_scan(m, cfg.potential, cfg.jump, r, xi, c, cfg.mc, ta_grid(cfg));
    for (const auto& row : rep.rows)
      t.rows.push_back({num(c), num(r), num(row.xi[0]), num(row.gamma), num(row.stderr_), num(row.threshold),
                        flag(row.holds), num(row.sublevel)});
    if (rep.criterion_holds != rep.sublevel_vanishes)
      failures.push_back("c=" + num(c) + ": threshold verdict " + flag(rep.criterion_holds) +
                         " disagrees with sublevel verdict " + flag(rep.sublevel_vanishes));
  }
  return t;
}

CsvTable run_capacity(const ExperimentConfig& cfg, std::vector<std::string>& failures) {
  const auto& m = cfg.model;
  const auto base = parse_compact_set(cfg.capacity.set, m.d);
  CsvTable t;
  t.columns = {"scale", "cap_equilibrium", "spread", "cap_mc", "mc_stderr", "mc_bias", "scaling_ratio"};
  double ref_cap = 0.0, ref_scale = 0.0;
  for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
    const double s = cfg.grid[i];
    const auto k = base.scaled(s);
    const auto eq = capacity_extrapolated(m, k, cfg.capacity.cells);
    HittingOptions ho;
    ho.n_paths = cfg.capacity.n_paths;
    ho.delta = cfg.mc.delta;
    ho.dt_max = cfg.mc.dt_max;
    ho.seed = cfg.mc.seed;
    ho.stream_offset = cfg.mc.stream_offset + std::uint64_t(i) * std::uint64_t(cfg.capacity.n_paths);
    const auto mc = capacity_hitting_mc(m, k, ho);
    if (i == 0) {
      ref_cap = eq.cap;
      ref_scale = s;
    }
    const double ratio = eq.cap / (ref_cap * std::pow(s / ref_scale, m.d - m.alpha));
    t.rows.push_back({num(s), num(eq.cap), num(eq.spread), num(mc.cap), num(mc.stderr_), num(mc.bias_bound),
                      num(ratio)});
    if (std::abs(mc.cap - eq.cap) > 3.0 * mc.stderr_ + mc.bias_bound)
      failures.push_back("scale " + num(s) + ": hitting " + num(mc.cap) + " vs equilibrium " + num(eq.cap));
    if (std::abs(ratio - 1.0) > 0.005)
      failures.push_back("scale " + num(s) + ": dilation ratio " + num(ratio));
  }
  return t;
}

struct Frame {
  double x0, x1, y0, y1;
  bool logx;
  double left = 70, right = 620, top = 40, bottom = 360;

  double px(double x) const {
    const double u = logx ? (std::log10(x) - std::log10(x0)) / (std::log10(x1) - std::log10(x0)) : (x - x0) / (x1 - x0);
    return left + u * (right - left);
  }
  double py(double y) const { return bottom - (y - y0) / (y1 - y0) * (bottom - top); }
};

}  // namespace

std::string render_csv(const ExperimentConfig& cfg, const CsvTable& t) {
  std::ostringstream body;
  for (std::size_t j = 0; j < t.columns.size(); ++j) body << (j ? "," : "") << t.columns[j];
  body << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) body << (j ? "," : "") << row[j];
    body << "\n";
  }
  const std::string b = body.str();
  return "# stablescat sweep=" + sweep_kind_name(cfg.sweep) + " config_sha256=" + config_hash(cfg) +
         " digest=" + git_blob_digest(b) + "\n" + b;
}

std::string render_svg(const CsvTable& t, const std::string& title) {
  struct Pt {
    double x, y, e;
  };
  std::vector<Pt> pts;
  for (const auto& row : t.rows) {
    const double x = std::strtod(row[t.x_col].c_str(), nullptr);
    const double y = std::strtod(row[t.y_col].c_str(), nullptr);
    const double e = std::strtod(row[t.err_col].c_str(), nullptr);
    if (std::isfinite(x) && std::isfinite(y)) pts.push_back({x, y, std::isfinite(e) ? e : 0.0});
  }
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"660\" height=\"400\" font-family=\"sans-serif\" "
        "font-size=\"12\">\n<rect width=\"660\" height=\"400\" fill=\"white\"/>\n";
  os << "<text x=\"330\" y=\"22\" text-anchor=\"middle\">" << title << "</text>\n";
  if (pts.empty()) {
    os << "</svg>\n";
    return os.str();
  }
  Frame f{pts[0].x, pts[0].x, pts[0].y - 3 * pts[0].e, pts[0].y + 3 * pts[0].e, false};
  for (const auto& p : pts) {
    f.x0 = std::min(f.x0, p.x);
    f.x1 = std::max(f.x1, p.x);
    f.y0 = std::min(f.y0, p.y - 3 * p.e);
    f.y1 = std::max(f.y1, p.y + 3 * p.e);
  }
  f.logx = f.x0 > 0 && f.x1 >= 10 * f.x0;
  if (f.x1 == f.x0) {
    f.x0 -= 0.5;
    f.x1 += 0.5;
    f.logx = false;
  }
  if (f.y1 == f.y0) {
    f.y0 -= 0.5;
    f.y1 += 0.5;
  }
  const double pad = 0.05 * (f.y1 - f.y0);
  f.y0 -= pad;
  f.y1 += pad;

  os << "<line x1=\"" << f.left << "\" y1=\"" << f.bottom << "\" x2=\"" << f.right << "\" y2=\"" << f.bottom
     << "\" stroke=\"black\"/>\n<line x1=\"" << f.left << "\" y1=\"" << f.top << "\" x2=\"" << f.left << "\" y2=\""
     << f.bottom << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << f.left << "\" y=\"" << f.bottom + 18 << "\">" << num(f.x0) << "</text>\n";
  os << "<text x=\"" << f.right << "\" y=\"" << f.bottom + 18 << "\" text-anchor=\"end\">" << num(f.x1) << "</text>\n";
  os << "<text x=\"" << f.left - 4 << "\" y=\"" << f.bottom << "\" text-anchor=\"end\">" << num(f.y0) << "</text>\n";
  os << "<text x=\"" << f.left - 4 << "\" y=\"" << f.top + 4 << "\" text-anchor=\"end\">" << num(f.y1) << "</text>\n";
  os << "<text x=\"345\" y=\"392\" text-anchor=\"middle\">" << t.columns[t.x_col] << (f.logx ? " (log)" : "")
     << "</text>\n<text x=\"14\" y=\"200\" transform=\"rotate(-90 14 200)\" text-anchor=\"middle\">"
     << t.columns[t.y_col] << " +- 3 " << t.columns[t.err_col] << "</text>\n";
  for (const auto& p : pts) {
    const double x = f.px(p.x);
    os << "<line x1=\"" << num(x) << "\" y1=\"" << num(f.py(p.y - 3 * p.e)) << "\" x2=\"" << num(x) << "\" y2=\""
       << num(f.py(p.y + 3 * p.e)) << "\" stroke=\"steelblue\"/>\n";
    os << "<circle cx=\"" << num(x) << "\" cy=\"" << num(f.py(p.y)) << "\" r=\"3\" fill=\"steelblue\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult res;
  switch (cfg.sweep) {
    case SweepKind::semiclassical: res.table = run_semiclassical(cfg, res.failures); break;
    case SweepKind::small_eps: res.table = run_small_eps(cfg, res.failures); break;
    case SweepKind::time_average: res.table = run_time_average(cfg, res.failures); break;
    case SweepKind::bracket: res.table = run_bracket(cfg, res.failures); break;
    case SweepKind::discreteness: res.table = run_discreteness(cfg, res.failures); break;
    case SweepKind::capacity: res.table = run_capacity(cfg, res.failures); break;
  }
  res.csv = render_csv(cfg, res.table);
  return res;
}

}  // namespace stablescat
