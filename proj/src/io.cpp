#include "hybrid/io.hpp"

#include "hybrid/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hybrid::io {

namespace {

std::ofstream open_out(const std::string& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + file + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + file + "' for reading");
  return in;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> split_numbers(const std::string& line, char sep) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string item;
  if (sep == ' ') {
    while (ss >> item) out.push_back(std::stod(item));
  } else {
    while (std::getline(ss, item, sep)) out.push_back(std::stod(trim(item)));
  }
  return out;
}

}  // namespace

// ---- trajectory --------------------------------------------------------------

void write_trajectory(std::ostream& out, const AgentPath& path) {
  path.validate();
  const int N = path.dim();
  const int n = path.agents();
  out << kTrajectoryTag << " N=" << N << " n=" << n << "\n";
  out << "t";
  for (int i = 1; i <= n; ++i) {
    for (int d = 1; d <= N; ++d) out << ",x_" << i << "_" << d;
    for (int d = 1; d <= N; ++d) out << ",v_" << i << "_" << d;
  }
  out << "\n";
  for (std::size_t k = 0; k < path.size(); ++k) {
    out << format_double(path.times[k]);
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < N; ++d) out << "," << format_double(path.X[k](d, i));
      for (int d = 0; d < N; ++d) out << "," << format_double(path.V[k](d, i));
    }
    out << "\n";
  }
}

void write_trajectory(const std::string& file, const AgentPath& path) {
  auto out = open_out(file);
  write_trajectory(out, path);
}

AgentPath read_trajectory(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(kTrajectoryTag, 0) != 0)
    throw std::runtime_error("trajectory: missing format tag");
  int N = 0;
  int n = 0;
  {
    std::stringstream ss(line.substr(std::string(kTrajectoryTag).size()));
    std::string tok;
    while (ss >> tok) {
      if (tok.rfind("N=", 0) == 0) N = std::stoi(tok.substr(2));
      if (tok.rfind("n=", 0) == 0) n = std::stoi(tok.substr(2));
    }
  }
  if (N < 1 || n < 1) throw std::runtime_error("trajectory: header lacks N or n");
  if (!std::getline(in, line)) throw std::runtime_error("trajectory: missing column header");

  AgentPath path;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto row = split_numbers(line, ',');
    if (static_cast<int>(row.size()) != 1 + 2 * N * n) throw std::runtime_error("trajectory: malformed row");
    path.times.push_back(row[0]);
    AgentMatrix X(N, n);
    AgentMatrix V(N, n);
    std::size_t c = 1;
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < N; ++d) X(d, i) = row[c++];
      for (int d = 0; d < N; ++d) V(d, i) = row[c++];
    }
    path.X.push_back(X);
    path.V.push_back(V);
  }
  path.validate();
  return path;
}

AgentPath read_trajectory(const std::string& file) {
  auto in = open_in(file);
  return read_trajectory(in);
}

// ---- certificate -------------------------------------------------------------

void Certificate::set(const std::string& key, double value) { set(key, format_double(value)); }

void Certificate::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries)
    if (k == key) {
      v = value;
      return;
    }
  entries.emplace_back(key, value);
}

bool Certificate::has(const std::string& key) const {
  for (const auto& e : entries)
    if (e.first == key) return true;
  return false;
}

const std::string& Certificate::get(const std::string& key) const {
  for (const auto& e : entries)
    if (e.first == key) return e.second;
  throw std::out_of_range("certificate has no key '" + key + "'");
}

double Certificate::number(const std::string& key) const { return std::stod(get(key)); }

void write_certificate(std::ostream& out, const Certificate& cert) {
  out << kCertificateTag << "\n";
  for (const auto& [k, v] : cert.entries) out << k << " = " << v << "\n";
}

void write_certificate(const std::string& file, const Certificate& cert) {
  auto out = open_out(file);
  write_certificate(out, cert);
}

Certificate read_certificate(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(kCertificateTag, 0) != 0)
    throw std::runtime_error("certificate: missing format tag");
  Certificate cert;
  while (std::getline(in, line)) {
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw std::runtime_error("certificate: malformed line '" + body + "'");
    cert.entries.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
  }
  return cert;
}

Certificate read_certificate(const std::string& file) {
  auto in = open_in(file);
  return read_certificate(in);
}

// ---- field snapshots ---------------------------------------------------------

FieldSnapshot sample_field(const FieldProbe& probe, double t, double box, double h) {
  FieldSnapshot snap;
  snap.dim = probe.scenario().dim();
  snap.box = box;
  const long cells = std::max(1L, std::lround(2.0 * box / h));
  snap.h = 2.0 * box / static_cast<double>(cells);
  snap.t = t;
  snap.points_per_axis = static_cast<int>(cells + 1);
  std::size_t total = 1;
  for (int d = 0; d < snap.dim; ++d) total *= static_cast<std::size_t>(snap.points_per_axis);
  snap.values.resize(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Point x(snap.dim);
    std::size_t rem = flat;
    for (int d = 0; d < snap.dim; ++d) {
      x[d] = -box + snap.h * static_cast<double>(rem % static_cast<std::size_t>(snap.points_per_axis));
      rem /= static_cast<std::size_t>(snap.points_per_axis);
    }
    snap.values[flat] = probe.eval_f(x, t);
  }
  return snap;
}

void write_field_snapshot(std::ostream& out, const FieldSnapshot& snap) {
  out << kFieldTag << " N=" << snap.dim << " box=" << format_double(snap.box) << " h=" << format_double(snap.h)
      << " t=" << format_double(snap.t) << " points=" << snap.points_per_axis << "\n";
  const std::size_t m = static_cast<std::size_t>(snap.points_per_axis);
  for (std::size_t row = 0; row * m < snap.values.size(); ++row) {
    for (std::size_t c = 0; c < m; ++c) {
      if (c) out << ' ';
      out << format_double(snap.values[row * m + c]);
    }
    out << "\n";
  }
}

void write_field_snapshot(const std::string& file, const FieldSnapshot& snap) {
  auto out = open_out(file);
  write_field_snapshot(out, snap);
}

FieldSnapshot read_field_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(kFieldTag, 0) != 0) throw std::runtime_error("field: missing format tag");
  FieldSnapshot snap;
  std::stringstream ss(line.substr(std::string(kFieldTag).size()));
  std::string tok;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "N") snap.dim = std::stoi(val);
    else if (key == "box") snap.box = std::stod(val);
    else if (key == "h") snap.h = std::stod(val);
    else if (key == "t") snap.t = std::stod(val);
    else if (key == "points") snap.points_per_axis = std::stoi(val);
  }
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    for (double v : split_numbers(line, ' ')) snap.values.push_back(v);
  }
  std::size_t expected = 1;
  for (int d = 0; d < snap.dim; ++d) expected *= static_cast<std::size_t>(snap.points_per_axis);
  if (snap.values.size() != expected) throw std::runtime_error("field: value count does not match the header");
  return snap;
}

FieldSnapshot read_field_snapshot(const std::string& file) {
  auto in = open_in(file);
  return read_field_snapshot(in);
}

// ---- reports -----------------------------------------------------------------

nlohmann::ordered_json report_json(const verify::EstimateReport& report) {
  nlohmann::ordered_json j;
  j["claim"] = report.claim;
  nlohmann::ordered_json constants = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.constants) constants[k] = v;
  j["constants"] = constants;
  j["samples"] = report.samples;
  j["worst_ratio"] = report.worst_ratio;
  j["worst_location"] = report.worst_location;
  j["tolerance"] = report.tolerance;
  j["seed"] = report.seed;
  j["pass"] = report.pass;
  return j;
}

void write_json(const std::string& file, const nlohmann::ordered_json& doc) {
  auto out = open_out(file);
  out << doc.dump(2) << "\n";
}

}  // namespace hybrid::io
