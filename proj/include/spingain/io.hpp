#pragma once

// CSV, JSON and SVG serialization of sweep records and gain results.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "spingain/gain.hpp"
#include "spingain/sweep.hpp"

namespace spingain {

using Json = nlohmann::ordered_json;

inline constexpr const char* kCsvHeader =
    "N,strategy,noise,epsilon,gamma,alpha,sigma,chit,chitau,xi_inv_sq,xi_inv_sq_pred,fq_over_n,"
    "seconds";

/// 17 significant digits; "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double x);
double parse_number(const std::string& s);

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records);
/// Throws std::invalid_argument on a wrong header or a malformed row.
std::vector<SweepRecord> read_csv(std::istream& in);

Json to_json(const GainResult& g);
Json to_json(const ScalingFit& fit);

struct Series {
  std::string label;
  std::vector<double> x, y;
};

struct PlotSpec {
  std::string title;
  std::string x_label = "N";
  std::string y_label = "xi^-2";
  bool log_x = true;
  bool log_y = true;
};

/// Minimal SVG line plot with a legend. Non-finite points (and non-positive
/// ones on log axes) are skipped.
std::string render_svg(const std::vector<Series>& series, const PlotSpec& spec);

/// One series per (strategy, noise, epsilon, gamma) of gain against N.
std::vector<Series> series_by_strategy(const std::vector<SweepRecord>& records);

}  // namespace spingain
