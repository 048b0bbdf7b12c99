#include "hjlab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <utility>

#include "hjlab/effective.hpp"

namespace hjlab {

namespace {

double sup_vs_reference(const SpaceTimeField& u,
                        const std::function<double(const Pt&, double)>& ref) {
  double worst = 0.0;
  for (std::size_t k = 0; k < u.times.size(); ++k) {
    const double t = u.times[k];
    const std::vector<double>& s = u.data[k];
    if (u.dim == 1) {
      for (int i = 0; i < u.nx; ++i)
        worst = std::max(worst, std::fabs(s[std::size_t(i)] - ref(pt(i * u.dx), t)));
    } else {
      for (int i0 = 0; i0 < u.nx; ++i0)
        for (int i1 = 0; i1 < u.nx; ++i1)
          worst = std::max(worst, std::fabs(s[std::size_t(i0) * u.nx + i1] -
                                            ref(pt(i0 * u.dx, i1 * u.dx), t)));
    }
  }
  return worst;
}

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  const std::size_t a = s.find_first_not_of(ws);
  if (a == std::string::npos) return std::string();
  const std::size_t b = s.find_last_not_of(ws);
  return s.substr(a, b - a + 1);
}

}  // namespace

RateReport run_rate_experiment(const HamiltonianModel& m,
                               const std::function<double(const Pt&)>& g, const RateOptions& opt,
                               const std::function<double(const Pt&, double)>* exact_effective) {
  if (opt.eps_list.empty()) throw DomainError("rate experiment: empty eps list");
  if (opt.cells0 < 1 || opt.cells_max < 2 * opt.cells0)
    throw DomainError("rate experiment: need cells_max >= 2*cells0 >= 2");
  RateReport rep;
  rep.model_id = m.id;

  EffectiveTable tbl;
  if (exact_effective == nullptr) {
    const double lg = grid_lipschitz(g, m.dim, 256);
    const double pr =
        opt.table_p_radius > 0.0 ? opt.table_p_radius : std::sqrt(double(m.dim)) * lg + 1.0;
    tbl = build_effective_table(m, pr, opt.table_p_steps, opt.cell);
  }

  for (double eps : opt.eps_list) {
    const long k = std::lround(1.0 / eps);
    if (k < 1 || std::fabs(eps * double(k) - 1.0) > 1e-9 * double(k))
      throw DomainError("rate experiment: eps must be a reciprocal integer");

    auto run_eps = [&](int cells) {
      SolveOptions so;
      so.nx = int(k) * cells;
      so.T = opt.T;
      so.snapshots = opt.snapshots;
      so.eps = eps;
      return solve_cauchy(m, g, so);
    };
    auto run_bar = [&](int nx) {
      SolveOptions so;
      so.nx = nx;
      so.T = opt.T;
      so.snapshots = opt.snapshots;
      so.eps = 1.0;
      return solve_cauchy_table(tbl, g, so);
    };

    int c = opt.cells0;
    SpaceTimeField coarse = run_eps(c);
    SpaceTimeField fine = run_eps(2 * c);
    double err = 0.0, sch = 0.0;
    auto evaluate = [&]() {
      sch = restriction_sup_error(coarse, fine);
      if (exact_effective != nullptr) {
        err = sup_vs_reference(fine, *exact_effective);
      } else {
        SpaceTimeField bar_c = run_bar(coarse.nx);
        SpaceTimeField bar_f = run_bar(fine.nx);
        sch += restriction_sup_error(bar_c, bar_f);
        err = sup_error(fine, bar_f);
      }
    };
    evaluate();
    while (sch > opt.budget_factor * err && 2 * c < opt.cells_max) {
      c *= 2;
      coarse = std::move(fine);
      fine = run_eps(2 * c);
      evaluate();
    }

    RateRow row;
    row.eps = eps;
    row.cells = 2 * c;
    row.nx = fine.nx;
    row.err = err;
    row.scheme_est = sch;
    row.budget_ok = sch <= opt.budget_factor * err;
    rep.rows.push_back(row);
  }

  std::vector<std::pair<double, double>> fit_rows;
  for (const RateRow& r : rep.rows)
    if (r.budget_ok && r.err > 0.0) fit_rows.push_back({r.eps, r.err});
  rep.n_ok = int(fit_rows.size());
  rep.conclusive = rep.n_ok >= 4;
  if (fit_rows.size() >= 2) rep.fit = fit_slope(fit_rows);
  return rep;
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& rows) {
  if (rows.size() < 2) throw DomainError("slope fit: need two or more rows");
  const std::size_t n = rows.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(rows[i].first > 0.0) || !(rows[i].second > 0.0))
      throw DomainError("slope fit: rows must be positive");
    lx[i] = std::log(rows[i].first);
    ly[i] = std::log(rows[i].second);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0.0) throw DomainError("slope fit: degenerate abscissae");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < n; ++i)
    f.residual = std::max(f.residual, std::fabs(ly[i] - (f.intercept + f.slope * lx[i])));
  return f;
}

CsvTable rate_report_csv(const RateReport& r) {
  CsvTable t;
  t.header = {"epsilon", "sup_error", "scheme_error", "pass"};
  for (const RateRow& row : r.rows)
    t.rows.push_back(
        {fmt_g(row.eps), fmt_g(row.err), fmt_g(row.scheme_est), row.budget_ok ? "1" : "0"});
  return t;
}

void write_svg_loglog(const std::string& path, const std::vector<double>& xs,
                      const std::vector<double>& ys, const SlopeFit& fit,
                      const std::string& title) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw DomainError("svg plot: need two or more points");
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] <= 0.0 || ys[i] <= 0.0) throw DomainError("svg plot: log axes need positive data");
    lx[i] = std::log10(xs[i]);
    ly[i] = std::log10(ys[i]);
  }
  const auto [x0it, x1it] = std::minmax_element(lx.begin(), lx.end());
  const auto [y0it, y1it] = std::minmax_element(ly.begin(), ly.end());
  double x0 = *x0it, x1 = *x1it, y0 = *y0it, y1 = *y1it;
  const double padx = 0.08 * std::max(x1 - x0, 1e-3);
  const double pady = 0.08 * std::max(y1 - y0, 1e-3);
  x0 -= padx;
  x1 += padx;
  y0 -= pady;
  y1 += pady;

  const double W = 640.0, H = 480.0, L = 70.0, R = 20.0, Tm = 40.0, B = 50.0;
  auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - Tm - B); };

  std::string out;
  char buf[512];
  auto emit = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof(buf), fmt, args...);
    out += buf;
  };
  emit("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
       "viewBox=\"0 0 %.0f %.0f\">\n",
       W, H, W, H);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  emit("<text x=\"%.1f\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" "
       "font-size=\"14\">%s</text>\n",
       W / 2.0, title.c_str());
  emit("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", L, H - B,
       W - R, H - B);
  emit("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", L, Tm, L,
       H - B);

  const double ln10 = std::log(10.0);
  // fitted line: log10 e = (fit.intercept + fit.slope * ln(eps)) / ln 10
  auto fit_at = [&](double l10x) { return fit.intercept / ln10 + fit.slope * l10x; };
  emit("<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\"%.2f,%.2f "
       "%.2f,%.2f\"/>\n",
       px(x0), py(fit_at(x0)), px(x1), py(fit_at(x1)));
  // slope-one reference through the first data point
  auto ref_at = [&](double l10x) { return ly.front() + (l10x - lx.front()); };
  emit("<polyline fill=\"none\" stroke=\"#999999\" stroke-dasharray=\"6 4\" points=\"%.2f,%.2f "
       "%.2f,%.2f\"/>\n",
       px(x0), py(ref_at(x0)), px(x1), py(ref_at(x1)));

  for (std::size_t i = 0; i < lx.size(); ++i) {
    emit("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3.5\" fill=\"#1f77b4\"/>\n", px(lx[i]), py(ly[i]));
    emit("<text x=\"%.2f\" y=\"%.1f\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"11\">%s</text>\n",
         px(lx[i]), H - B + 16.0, fmt_g(xs[i]).c_str());
    emit("<text x=\"%.1f\" y=\"%.2f\" text-anchor=\"end\" font-family=\"monospace\" "
         "font-size=\"11\">%s</text>\n",
         L - 6.0, py(ly[i]) + 4.0, fmt_g(ys[i]).c_str());
  }
  emit("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-family=\"monospace\" "
       "font-size=\"12\">slope %s</text>\n",
       W - R - 8.0, Tm + 16.0, fmt_g(fit.slope).c_str());
  out += "</svg>\n";

  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("svg plot: cannot open '" + path + "' for writing");
  f << out;
  if (!f) throw DomainError("svg plot: write failed on '" + path + "'");
}

std::vector<HamiltonianModel> builtin_model_registry() {
  std::vector<HamiltonianModel> v;
  v.push_back(make_model(HamKind::Quadratic, make_builtin_potential("cos1d", 1), "quad-cos1d"));
  v.push_back(make_model(HamKind::Quadratic, make_builtin_potential("cos2d", 2), "quad-cos2d"));
  v.push_back(make_model(HamKind::Eikonal, make_builtin_potential("inv2mc1d", 1), "eik-inv2mc1d"));
  v.push_back(make_model(HamKind::Eikonal, make_builtin_potential("inv2mc2d", 2), "eik-inv2mc2d"));
  v.push_back(make_model(HamKind::AbsPlus, make_builtin_potential("cos1d", 1), "absplus-cos1d"));
  v.push_back(
      make_model(HamKind::DoubleWell, make_builtin_potential("cos1d*2-2", 1), "dw-cos1d"));
  return v;
}

std::function<double(const Pt&)> make_initial_data(const std::string& spec, int dim) {
  if (dim < 1 || dim > 2) throw DomainError("initial data: dim must be 1 or 2");
  std::string name = spec;
  double amp = 1.0;
  const std::size_t star = spec.find('*');
  if (star != std::string::npos) {
    name = spec.substr(0, star);
    const std::string tail = spec.substr(star + 1);
    std::size_t pos = 0;
    try {
      amp = std::stod(tail, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != tail.size()) throw DomainError("initial data: bad amplitude in '" + spec + "'");
  }
  if (name == "zero") return [](const Pt&) { return 0.0; };
  if (name == "sin" || name == "cos") {
    const bool is_sin = name == "sin";
    return [amp, dim, is_sin](const Pt& x) {
      double s = 0.0;
      for (int d = 0; d < dim; ++d)
        s += is_sin ? std::sin(kTau * x[d]) : std::cos(kTau * x[d]);
      return amp / kTau * s;
    };
  }
  if (name == "tent") {
    return [amp, dim](const Pt& x) {
      double s = 0.0;
      for (int d = 0; d < dim; ++d) s += amp * (std::fabs(wrap01(x[d]) - 0.5) - 0.25);
      return s;
    };
  }
  throw DomainError("initial data: unknown spec '" + spec + "'");
}

std::map<std::string, std::string> parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("config: cannot open '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw DomainError("config: line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (key.empty())
      throw DomainError("config: line " + std::to_string(lineno) + ": empty key");
    out[key] = val;
  }
  return out;
}

double cfg_double(const std::map<std::string, std::string>& c, const std::string& key,
                  double dflt) {
  const auto it = c.find(key);
  if (it == c.end()) return dflt;
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(it->second, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != it->second.size())
    throw DomainError("config: key '" + key + "' is not a number: '" + it->second + "'");
  return v;
}

int cfg_int(const std::map<std::string, std::string>& c, const std::string& key, int dflt) {
  const auto it = c.find(key);
  if (it == c.end()) return dflt;
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(it->second, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != it->second.size())
    throw DomainError("config: key '" + key + "' is not an integer: '" + it->second + "'");
  return int(v);
}

std::string cfg_str(const std::map<std::string, std::string>& c, const std::string& key,
                    const std::string& dflt) {
  const auto it = c.find(key);
  return it == c.end() ? dflt : it->second;
}

}  // namespace hjlab
