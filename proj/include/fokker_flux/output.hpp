#pragma once

// CSV, JSON and SVG writers. CSV files carry a header row and print doubles
// with 17 significant digits.

#include <json.hpp>

#include <string>
#include <vector>

#include "fokker_flux/domain.hpp"
#include "fokker_flux/observation.hpp"

namespace fokker_flux {

std::string format_double(double v);

struct Column {
  std::string name;
  std::vector<double> values;
};

/// Throws ErrorCode::io when the file cannot be written.
void write_csv(const std::string& path, const std::vector<Column>& columns);
void write_json(const std::string& path, const nlohmann::json& doc);

/// Columns t, entropy, mass, l1, residual.
void write_entropy_csv(const std::string& path, const ObservationSeries& series);

/// Columns x, one per snapshot, then rho_inf.
void write_snapshots_csv(const std::string& path, const Grid& grid, const std::vector<double>& times,
                         const std::vector<DensityField>& snapshots, const DensityField& stationary);

struct LineSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<LineSeries> series;
};

std::string render_svg(const Chart& chart);
void write_svg(const std::string& path, const Chart& chart);

}  // namespace fokker_flux
