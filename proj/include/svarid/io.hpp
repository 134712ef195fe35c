#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "svarid/electricity.hpp"
#include "svarid/estimate.hpp"
#include "svarid/experiments.hpp"
#include "svarid/identify.hpp"
#include "svarid/svar.hpp"

namespace svarid {

using Json = nlohmann::json;

// {"d_U", "d_O", "edges": [{"target", "source", "lags"}]}; series by name.
Json graph_to_json(const LagStructure& g);
LagStructure graph_from_json(const Json& j);

// {"graph", "coefficients": [{"lag", "matrix"}], "noise_var"}; matrices are
// row-major with rows = targets.
Json params_to_json(const SvarParams& p);
SvarParams params_from_json(const Json& j);

Json vertex_to_json(const LagStructure& g, const Vertex& v);
Vertex vertex_from_json(const LagStructure& g, const Json& j);
Json vertex_set_to_json(const LagStructure& g, const VertexSet& vs);

// Carries d_U and d_O so the series names resolve without the graph.
Json spec_to_json(const LagStructure& g, const EstimatorSpec& s);
EstimatorSpec spec_from_json(const Json& j);
LagStructure naming_frame(const Json& spec);

Json checks_to_json(const std::vector<Check>& checks);
Json certificate_to_json(const LagStructure& g, const Certificate& c);
Json sweep_to_json(const LagStructure& g, const std::vector<SweepResult>& rs);

// Coefficients keyed "A[h][target][source]".
Json estimate_to_json(const LagStructure& g, const EffectEstimate& e);
Json bootstrap_to_json(const LagStructure& g, const BootstrapSummary& b);

Json covariance_to_json(const LagStructure& g, const CovarianceTable& t);

Json protocol_to_json(const RandomGraphProtocol& p);
RandomGraphProtocol protocol_from_json(const Json& j);
Json electricity_to_json(const ElectricityModel& m);
// Missing fields keep the variant defaults.
ElectricityModel electricity_from_json(const Json& j);

Json read_json(const std::string& path);
void write_json(const std::string& path, const Json& j);

// Shortest round-trip decimal form.
std::string format_double(double x);

struct Table {
  std::vector<std::string> names;
  Eigen::MatrixXd data;  // one row per column name, one column per time point
};

// One header line of series names, then one line per time point.
void write_series_csv(std::ostream& os, const Table& t);
void write_series_csv(const std::string& path, const Table& t);
Table read_series_csv(std::istream& is);
Table read_series_csv(const std::string& path);

Table series_table(const LagStructure& g, const Eigen::MatrixXd& data,
                   bool observed_only);
// Places named columns at their series rows; absent series stay zero.
Eigen::MatrixXd data_for_frame(const LagStructure& frame, const Table& t);

void write_error_rows_csv(const std::string& path, const std::vector<ErrorRow>& rows);
void write_median_rows_csv(const std::string& path, const std::vector<MedianRow>& rows);

}  // namespace svarid
