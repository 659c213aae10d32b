#pragma once

#include "hybrid/field.hpp"
#include "hybrid/path.hpp"
#include "hybrid/verify.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace hybrid::io {

inline constexpr const char* kTrajectoryTag = "# hybrid-trajectory v1";
inline constexpr const char* kCertificateTag = "# hybrid-certificate v1";
inline constexpr const char* kFieldTag = "# hybrid-field v1";
inline constexpr const char* kManifestFormat = "hybrid-manifest v1";
inline constexpr const char* kReportFormat = "hybrid-report v1";

/// CSV: tag line, column names, then per node t, and for each agent i: x_{i,1..N}, v_{i,1..N}. %.17g.
void write_trajectory(std::ostream& out, const AgentPath& path);
void write_trajectory(const std::string& file, const AgentPath& path);
AgentPath read_trajectory(std::istream& in);
AgentPath read_trajectory(const std::string& file);

/// Flat `key = value` document with a tag line; numbers in %.17g.
struct Certificate {
  std::vector<std::pair<std::string, std::string>> entries;

  void set(const std::string& key, double value);
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  double number(const std::string& key) const;
  bool has(const std::string& key) const;
};

void write_certificate(std::ostream& out, const Certificate& cert);
void write_certificate(const std::string& file, const Certificate& cert);
Certificate read_certificate(std::istream& in);
Certificate read_certificate(const std::string& file);

/// Field values on the uniform grid [-box, box]^N with spacing h, axis 0 fastest.
struct FieldSnapshot {
  int dim = 1;
  double box = 4.0;
  double h = 0.1;
  double t = 0.0;
  int points_per_axis = 0;
  std::vector<double> values;
};

FieldSnapshot sample_field(const FieldProbe& probe, double t, double box, double h);

/// Header line `# hybrid-field v1 N=.. box=.. h=.. t=.. points=..`, then one row per line of axis 0.
void write_field_snapshot(std::ostream& out, const FieldSnapshot& snap);
void write_field_snapshot(const std::string& file, const FieldSnapshot& snap);
FieldSnapshot read_field_snapshot(std::istream& in);
FieldSnapshot read_field_snapshot(const std::string& file);

nlohmann::ordered_json report_json(const verify::EstimateReport& report);
void write_json(const std::string& file, const nlohmann::ordered_json& doc);

}  // namespace hybrid::io
