#pragma once

// JSON and CSV serialization for measures, coefficient sequences, operators,
// spectra and test reports. Doubles are written in shortest round-trip form.

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sinepalm/dirac.hpp"
#include "sinepalm/opuc.hpp"
#include "sinepalm/stats.hpp"

namespace sinepalm {

using json = nlohmann::json;

json to_json(const UnitCircleMeasure& mu);
UnitCircleMeasure measure_from_json(const json& j);

json to_json(const CoefficientSequence& seq);
CoefficientSequence coefficients_from_json(const json& j);

json to_json(const DiracOperator& op);
DiracOperator operator_from_json(const json& j);

json to_json(const SpectralMeasure& s);
SpectralMeasure spectrum_from_json(const json& j);

json to_json(const TestReport& r);
TestReport report_from_json(const json& j);

/// {"suite":..., "seed":..., "pass":..., "reports":[...]}.
json aggregate_report(const std::string& suite, std::uint64_t seed,
                      const std::vector<TestReport>& reports);

json read_json_file(const std::filesystem::path& path);
/// Writes text to `path`, or to standard output when path is empty or "-".
void write_text(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal that reads back to the same double.
std::string format_double(double x);

using CsvCell = std::variant<std::string, double, long long>;

/// RFC 4180 CSV with CRLF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<CsvCell>& row);
  const std::string& str() const noexcept { return text_; }

 private:
  void append_field(std::string_view field);
  void append_row(const std::vector<std::string>& fields);
  std::size_t columns_;
  std::string text_;
};

}  // namespace sinepalm
