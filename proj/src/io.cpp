#include "spingain/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace spingain {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json noise_json(const NoiseModel& n) {
  Json j;
  j["kind"] = to_string(n.kind);
  j["epsilon"] = n.epsilon;
  j["gamma"] = n.gamma;
  if (n.kind == NoiseKind::ballistic) j["same_shot"] = n.same_shot;
  return j;
}

// Short fixed-width tick label.
std::string tick_label(double v, bool log_axis) {
  char buf[32];
  if (log_axis)
    std::snprintf(buf, sizeof buf, "1e%d", static_cast<int>(std::lround(v)));
  else
    std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_number(const std::string& s) {
  if (s == "nan") return std::nan("");
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (s.empty() || end != begin + s.size())
    throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.n_atoms << ',' << r.strategy << ',' << to_string(r.noise.kind) << ','
        << format_number(r.noise.epsilon) << ',' << format_number(r.noise.gamma) << ','
        << format_number(r.alpha) << ',' << format_number(r.sigma) << ','
        << format_number(r.chit) << ',' << format_number(r.chitau) << ','
        << format_number(r.xi_inv_sq) << ',' << format_number(r.xi_inv_sq_pred) << ','
        << format_number(r.fq_over_n) << ',' << format_number(r.seconds) << '\n';
  }
}

std::vector<SweepRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::invalid_argument("unexpected CSV header: " + line);
  std::vector<SweepRecord> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 13)
      throw std::invalid_argument("CSV row " + std::to_string(row) + ": expected 13 columns");
    try {
      SweepRecord r;
      std::size_t used = 0;
      r.n_atoms = std::stoi(cells[0], &used);
      if (used != cells[0].size()) throw std::invalid_argument("bad N");
      r.strategy = cells[1];
      r.noise.kind = noise_kind_from_string(cells[2]);
      r.noise.epsilon = parse_number(cells[3]);
      r.noise.gamma = parse_number(cells[4]);
      r.alpha = parse_number(cells[5]);
      r.sigma = parse_number(cells[6]);
      r.chit = parse_number(cells[7]);
      r.chitau = parse_number(cells[8]);
      r.xi_inv_sq = parse_number(cells[9]);
      r.xi_inv_sq_pred = parse_number(cells[10]);
      r.fq_over_n = parse_number(cells[11]);
      r.seconds = parse_number(cells[12]);
      if (std::isnan(r.xi_inv_sq)) r.error = "no gain recorded";
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::invalid_argument("CSV row " + std::to_string(row) + ": " + e.what());
    }
  }
  return out;
}

Json to_json(const GainResult& g) {
  Json j;
  j["N"] = g.n_atoms;
  j["strategy"] = to_string(g.strategy);
  j["noise"] = noise_json(g.noise);
  j["alpha"] = g.alpha ? Json(*g.alpha) : Json(nullptr);
  j["sigma"] = g.sigma ? Json(*g.sigma) : Json(nullptr);
  j["chit"] = g.chit;
  j["chitau"] = g.chitau;
  j["xi_inv_sq"] = number_or_null(g.xi_inv_sq);
  j["xi_inv_sq_over_n"] = number_or_null(g.xi_inv_sq / g.n_atoms);
  j["coefficients"] = std::vector<double>(g.coefficients.data(),
                                          g.coefficients.data() + g.coefficients.size());
  j["axis"] = {g.axis[0], g.axis[1], g.axis[2]};
  j["condition"] = number_or_null(g.condition);
  j["iterations"] = g.iterations;
  j["degenerate"] = g.degenerate;
  j["null_signal"] = g.null_signal;
  return j;
}

Json to_json(const ScalingFit& fit) {
  Json j;
  j["exponent"] = fit.exponent;
  j["exponent_stderr"] = fit.exponent_stderr;
  j["log_prefactor"] = fit.log_prefactor;
  j["prefactor"] = std::exp(fit.log_prefactor);
  j["residual_rms"] = fit.residual_rms;
  j["n_min"] = fit.n_min;
  j["n_max"] = fit.n_max;
  j["points"] = fit.points;
  j["warnings"] = fit.warnings;
  return j;
}

std::vector<Series> series_by_strategy(const std::vector<SweepRecord>& records) {
  std::map<std::tuple<std::string, std::string, double, double>, Series> groups;
  std::vector<std::tuple<std::string, std::string, double, double>> order;
  for (const auto& r : records) {
    const auto key = std::make_tuple(r.strategy, to_string(r.noise.kind), r.noise.epsilon,
                                     r.noise.gamma);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) {
      order.push_back(key);
      std::string label = r.strategy;
      if (!r.noise.noiseless()) {
        char buf[96];
        std::snprintf(buf, sizeof buf, " %s eps=%g gamma=%g", to_string(r.noise.kind).c_str(),
                      r.noise.epsilon, r.noise.gamma);
        label += buf;
      }
      it->second.label = label;
    }
    it->second.x.push_back(r.n_atoms);
    it->second.y.push_back(r.xi_inv_sq);
  }
  std::vector<Series> out;
  for (const auto& k : order) out.push_back(groups[k]);
  return out;
}

std::string render_svg(const std::vector<Series>& series, const PlotSpec& spec) {
  constexpr double W = 720, H = 480, left = 70, right = 200, top = 40, bottom = 50;
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                           "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0) && (!spec.log_y || y > 0);
  };

  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (usable(s.x[i], s.y[i])) {
        x0 = std::min(x0, tx(s.x[i]));
        x1 = std::max(x1, tx(s.x[i]));
        y0 = std::min(y0, ty(s.y[i]));
        y1 = std::max(y1, ty(s.y[i]));
      }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  if (spec.log_x) x0 = std::floor(x0), x1 = std::ceil(x1);
  if (spec.log_y) y0 = std::floor(y0), y1 = std::ceil(y1);

  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + ph - (v - y0) / (y1 - y0) * ph; };

  std::ostringstream o;
  char buf[160];
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
    << escape_xml(spec.title) << "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" "
                "stroke=\"black\"/>\n",
                left, top, pw, ph);
  o << buf;

  auto ticks = [](double lo, double hi, bool log_axis) {
    std::vector<double> t;
    if (log_axis) {
      const double step = std::max(1.0, std::ceil((hi - lo) / 8.0));
      for (double v = lo; v <= hi + 1e-9; v += step) t.push_back(v);
    } else {
      for (int i = 0; i <= 5; ++i) t.push_back(lo + (hi - lo) * i / 5.0);
    }
    return t;
  };
  for (double v : ticks(x0, x1, spec.log_x)) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#ddd\"/>\n", px(v),
                  top, px(v), top + ph);
    o << buf;
    o << "<text x=\"" << format_number(px(v)) << "\" y=\"" << top + ph + 16
      << "\" text-anchor=\"middle\">" << tick_label(v, spec.log_x) << "</text>\n";
  }
  for (double v : ticks(y0, y1, spec.log_y)) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#ddd\"/>\n", left,
                  py(v), left + pw, py(v));
    o << buf;
    o << "<text x=\"" << left - 6 << "\" y=\"" << format_number(py(v) + 4)
      << "\" text-anchor=\"end\">" << tick_label(v, spec.log_y) << "</text>\n";
  }
  o << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
    << escape_xml(spec.x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << top + ph / 2 << ")\">" << escape_xml(spec.y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = palette[k % std::size(palette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", first ? "" : " ", px(tx(s.x[i])),
                    py(ty(s.y[i])));
      o << buf;
      first = false;
    }
    o << "\"/>\n";
    const double ly = top + 14 + 18 * static_cast<double>(k);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" "
                  "stroke-width=\"2\"/>\n",
                  W - right + 12, ly - 4, W - right + 36, ly - 4, color);
    o << buf;
    o << "<text x=\"" << W - right + 42 << "\" y=\"" << ly << "\">" << escape_xml(s.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace spingain
