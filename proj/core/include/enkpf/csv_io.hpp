#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "enkpf/observation.hpp"

namespace enkpf {

/// Shortest-round-trip-safe decimal text with 17 significant digits.
std::string format_number(double v);

/// Ensemble dump: a `q,N` line holding the two dimensions, then q rows of N
/// comma separated values.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(std::istream& in);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

/// Observation file: header `component,value,variance`, one row per observed
/// component (one-based), independent noise with the given variance.
LinearGaussianObservation read_observation_csv(std::istream& in, Eigen::Index q);
LinearGaussianObservation read_observation_csv(const std::string& path,
                                               Eigen::Index q);
void write_observation_csv(std::ostream& out,
                           const LinearGaussianObservation& obs);

/// Splits a CSV line on commas (no quoting).
std::vector<std::string> split_csv_line(const std::string& line);
double parse_number(const std::string& text);

}  // namespace enkpf
