#ifndef SIGREC_SWEEP_HPP
#define SIGREC_SWEEP_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sigrec/reconstruct.hpp"

namespace sigrec {

// A sweep is a cartesian grid over config values; list-valued keys use
// comma-separated entries in the config file.
struct SweepGrid {
  RunConfig base;
  std::vector<int> examples;
  std::vector<int> ns;
  std::vector<int> data_ns;
  std::vector<int> ks;
  std::vector<int> k0s;
  std::vector<double> epss;
  std::vector<double> deltas;
  std::vector<std::uint64_t> seeds;

  // empty lists fall back to the base config value
  void normalize() {
    if (examples.empty()) examples = {base.example};
    if (ns.empty()) ns = {base.n};
    if (data_ns.empty()) data_ns = {base.data_n};
    if (ks.empty()) ks = {base.k};
    if (k0s.empty()) k0s = {base.k0};
    if (epss.empty()) epss = {base.eps};
    if (deltas.empty()) deltas = {base.delta};
    if (seeds.empty()) seeds = {base.seed};
  }
};

namespace detail {
inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}
}  // namespace detail

inline SweepGrid parse_sweep_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw data_error("parse_sweep_file: cannot open " + path);
  SweepGrid grid;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw std::invalid_argument("sweep config: malformed line '" + line + "'");
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto items = detail::split_list(value);
    const auto ints = [&] {
      std::vector<int> v;
      for (const auto& s : items) v.push_back(std::stoi(s));
      return v;
    };
    const auto doubles = [&] {
      std::vector<double> v;
      for (const auto& s : items) v.push_back(std::stod(s));
      return v;
    };
    if (key == "example") grid.examples = ints();
    else if (key == "n") grid.ns = ints();
    else if (key == "data_n") grid.data_ns = ints();
    else if (key == "k") grid.ks = ints();
    else if (key == "k0") grid.k0s = ints();
    else if (key == "eps") grid.epss = doubles();
    else if (key == "delta") grid.deltas = doubles();
    else if (key == "seed") {
      grid.seeds.clear();
      for (const auto& s : items) grid.seeds.push_back(std::stoull(s));
    } else if (key == "penalty") grid.base.penalty = std::stod(value);
    else if (key == "tol") grid.base.tol = std::stod(value);
    else if (key == "out") grid.base.out = value;
    else throw std::invalid_argument("sweep config: unknown key '" + key + "'");
  }
  grid.normalize();
  return grid;
}

struct SweepRow {
  RunConfig config;
  bool ok = false;
  std::string error;
  ReconstructionReport report;  // valid when ok
};

struct SlopeFit {
  std::string series;
  std::string metric;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};

// OLS fit of log10(y) against log10(x)
inline SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  SlopeFit f;
  f.points = static_cast<int>(x.size());
  const int n = f.points;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log10(x[i]), ly = std::log10(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  const double cxy = sxy - sx * sy / n;
  f.slope = cxy / vx;
  f.intercept = (sy - f.slope * sx) / n;
  f.r2 = vy > 0 ? (cxy * cxy) / (vx * vy) : 1.0;
  return f;
}

inline std::vector<SweepRow> run_sweep(SweepGrid grid) {
  grid.normalize();
  std::vector<SweepRow> rows;
  for (int ex : grid.examples)
    for (int n : grid.ns)
      for (int dn : grid.data_ns)
        for (int k : grid.ks)
          for (int k0 : grid.k0s)
            for (double delta : grid.deltas)
              for (std::uint64_t seed : grid.seeds)
                for (double eps : grid.epss) {
                  SweepRow row;
                  row.config = grid.base;
                  row.config.example = ex;
                  row.config.n = n;
                  row.config.data_n = dn;
                  row.config.k = k;
                  row.config.k0 = k0;
                  row.config.delta = delta;
                  row.config.seed = seed;
                  row.config.eps = eps;
                  try {
                    row.report = reconstruct(row.config);
                    row.ok = true;
                  } catch (const std::exception& e) {
                    row.error = e.what();  // partial failure: row recorded, sweep continues
                  }
                  rows.push_back(std::move(row));
                }
  return rows;
}

// Series = rows sharing everything but (eps, delta); slopes of each metric
// against eps + delta.
inline std::vector<SlopeFit> fit_sweep_slopes(const std::vector<SweepRow>& rows) {
  std::map<std::string, std::vector<const SweepRow*>> series;
  for (const auto& r : rows) {
    if (!r.ok) continue;
    std::ostringstream key;
    const auto& c = r.config;
    key << "ex" << c.example << "_n" << c.n << "_dn" << c.effective_data_n() << "_k" << c.k
        << "_k0" << c.k0 << "_seed" << c.seed;
    series[key.str()].push_back(&r);
  }
  std::vector<SlopeFit> fits;
  for (const auto& [name, members] : series) {
    if (members.size() < 3) continue;
    std::vector<double> x, yh, yr;
    for (const auto* r : members) {
      x.push_back(r->config.eps + r->config.delta);
      yh.push_back(r->report.error_half);
      yr.push_back(r->report.rerror);
    }
    SlopeFit fh = fit_loglog(x, yh);
    fh.series = name;
    fh.metric = "error_half";
    SlopeFit fr = fit_loglog(x, yr);
    fr.series = name;
    fr.metric = "rerror";
    fits.push_back(fh);
    fits.push_back(fr);
  }
  return fits;
}

// Self-contained log-log SVG line chart of metric vs eps+delta, one polyline
// per series.
inline void write_sweep_svg(const std::vector<SweepRow>& rows, const std::string& metric,
                            const std::string& path) {
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& r : rows) {
    if (!r.ok) continue;
    std::ostringstream key;
    const auto& c = r.config;
    key << "ex" << c.example << " n" << c.n << " k" << c.k << " k0" << c.k0;
    const double y = metric == "error_half" ? r.report.error_half : r.report.rerror;
    if (y > 0) series[key.str()].push_back({r.config.eps + r.config.delta, y});
  }
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end());
    for (auto& [x, y] : pts) {
      xmin = std::min(xmin, std::log10(x));
      xmax = std::max(xmax, std::log10(x));
      ymin = std::min(ymin, std::log10(y));
      ymax = std::max(ymax, std::log10(y));
    }
  }
  if (series.empty()) {
    xmin = ymin = 0;
    xmax = ymax = 1;
  }
  if (xmax - xmin < 1e-12) xmax = xmin + 1;
  if (ymax - ymin < 1e-12) ymax = ymin + 1;
  const double W = 640, H = 480, ml = 70, mr = 20, mt = 30, mb = 50;
  const auto px = [&](double lx) { return ml + (lx - xmin) / (xmax - xmin) * (W - ml - mr); };
  const auto py = [&](double ly) { return H - mb - (ly - ymin) / (ymax - ymin) * (H - mt - mb); };
  std::ofstream os(path);
  if (!os) throw data_error("write_sweep_svg: cannot open " + path);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << W / 2 << "' y='18' text-anchor='middle' font-size='14'>" << metric
     << " vs eps+delta (log-log)</text>\n";
  // axes box and decade ticks
  os << "<rect x='" << ml << "' y='" << mt << "' width='" << W - ml - mr << "' height='"
     << H - mt - mb << "' fill='none' stroke='black'/>\n";
  for (int d = static_cast<int>(std::ceil(xmin)); d <= static_cast<int>(std::floor(xmax)); ++d) {
    os << "<line x1='" << px(d) << "' y1='" << H - mb << "' x2='" << px(d) << "' y2='" << H - mb + 5
       << "' stroke='black'/><text x='" << px(d) << "' y='" << H - mb + 20
       << "' text-anchor='middle' font-size='11'>1e" << d << "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(ymin)); d <= static_cast<int>(std::floor(ymax)); ++d) {
    os << "<line x1='" << ml - 5 << "' y1='" << py(d) << "' x2='" << ml << "' y2='" << py(d)
       << "' stroke='black'/><text x='" << ml - 8 << "' y='" << py(d) + 4
       << "' text-anchor='end' font-size='11'>1e" << d << "</text>\n";
  }
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  int ci = 0;
  double legend_y = mt + 14;
  for (const auto& [name, pts] : series) {
    const char* col = colors[ci++ % 8];
    os << "<polyline fill='none' stroke='" << col << "' stroke-width='1.5' points='";
    for (const auto& [x, y] : pts) os << px(std::log10(x)) << "," << py(std::log10(y)) << " ";
    os << "'/>\n";
    for (const auto& [x, y] : pts)
      os << "<circle cx='" << px(std::log10(x)) << "' cy='" << py(std::log10(y))
         << "' r='2.5' fill='" << col << "'/>\n";
    os << "<text x='" << ml + 8 << "' y='" << legend_y << "' font-size='11' fill='" << col << "'>"
       << name << "</text>\n";
    legend_y += 14;
  }
  os << "</svg>\n";
}

inline void write_slopes_csv(const std::vector<SlopeFit>& fits, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw data_error("write_slopes_csv: cannot open " + path);
  os.precision(17);
  os << "series,metric,slope,intercept,r2,points\n";
  for (const auto& f : fits)
    os << f.series << ',' << f.metric << ',' << f.slope << ',' << f.intercept << ',' << f.r2 << ','
       << f.points << "\n";
}

}  // namespace sigrec

#endif
