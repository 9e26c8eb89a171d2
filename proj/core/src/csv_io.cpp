#include "enkpf/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "enkpf/error.hpp"

namespace enkpf {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return {buf, res.ptr};
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw IoError("not a number: '" + text + "'");
  }
  return v;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  out << m.rows() << ',' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_number(m(i, j));
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_matrix_csv(out, m);
}

Eigen::MatrixXd read_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("matrix file is empty");
  const auto dims = split_csv_line(line);
  if (dims.size() != 2) throw IoError("matrix header must be 'q,N'");
  const auto rows = static_cast<Eigen::Index>(parse_number(dims[0]));
  const auto cols = static_cast<Eigen::Index>(parse_number(dims[1]));
  if (rows < 1 || cols < 1) throw IoError("matrix dimensions must be positive");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw IoError("matrix file has too few rows");
    const auto fields = split_csv_line(line);
    if (static_cast<Eigen::Index>(fields.size()) != cols) {
      throw IoError("matrix row " + std::to_string(i + 1) + " has " +
                    std::to_string(fields.size()) + " values, expected " +
                    std::to_string(cols));
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = parse_number(fields[static_cast<std::size_t>(j)]);
    }
  }
  return m;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_matrix_csv(in);
}

LinearGaussianObservation read_observation_csv(std::istream& in, Eigen::Index q) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("observation file is empty");
  const auto header = split_csv_line(line);
  if (header != std::vector<std::string>{"component", "value", "variance"}) {
    throw IoError("observation header must be 'component,value,variance'");
  }
  std::vector<Eigen::Index> comps;
  std::vector<double> values;
  std::vector<double> variances;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 3) throw IoError("observation rows need 3 fields");
    const double c = parse_number(f[0]);
    if (c != std::floor(c) || c < 1) {
      throw IoError("observation component must be a positive integer");
    }
    comps.push_back(static_cast<Eigen::Index>(c) - 1);
    values.push_back(parse_number(f[1]));
    variances.push_back(parse_number(f[2]));
  }
  if (comps.empty()) throw IoError("observation file has no rows");
  const auto r = static_cast<Eigen::Index>(comps.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(r, r);
  Eigen::VectorXd y(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    cov(i, i) = variances[static_cast<std::size_t>(i)];
    y[i] = values[static_cast<std::size_t>(i)];
  }
  return {ObservationOperator::select(std::move(comps), q), std::move(cov),
          std::move(y)};
}

LinearGaussianObservation read_observation_csv(const std::string& path,
                                               Eigen::Index q) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_observation_csv(in, q);
}

void write_observation_csv(std::ostream& out,
                           const LinearGaussianObservation& obs) {
  if (!obs.op().is_selection()) {
    throw IoError("only selection observations can be written as CSV");
  }
  const Eigen::MatrixXd& r = obs.noise_cov();
  if (!r.isDiagonal(0.0)) {
    throw IoError("only diagonal noise covariances can be written as CSV");
  }
  out << "component,value,variance\n";
  for (Eigen::Index i = 0; i < obs.obs_dim(); ++i) {
    out << obs.op().components()[static_cast<std::size_t>(i)] + 1 << ','
        << format_number(obs.value()[i]) << ',' << format_number(r(i, i)) << '\n';
  }
}

}  // namespace enkpf
