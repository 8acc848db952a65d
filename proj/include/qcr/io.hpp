#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qcr/feasibility.hpp"
#include "qcr/regions.hpp"
#include "qcr/schemes.hpp"

namespace qcr {

using Json = nlohmann::ordered_json;

/// Complex matrices on disk are arrays of rows; each entry is [re, im].
Json matrix_to_json(const Matrix& a);
Matrix matrix_from_json(const Json& j);

/// Measurement scheme file: { "dimension", "scheme"?: {"name", "qubits"},
/// "settings": [{ "label", "weight"?, "effects": [matrix, ...] }, ...] }.
/// A missing weight means 1/m over the m settings.
Json scheme_to_json(int dim, const std::vector<Setting>& settings,
                    const std::optional<std::string>& name, int qubits);

struct LoadedScheme {
  int dim = 0;
  std::vector<Setting> settings;
  std::optional<std::string> name;  // built-in scheme tag, when emitted by us
  int qubits = 0;
};
LoadedScheme scheme_from_json(const Json& j);

/// Merge the loaded settings into a flat measurement; when the file names a
/// built-in scheme the builder's Povm (which knows the symmetric-scheme
/// constants) is used after verifying the stored effects agree with it.
Povm resolve_scheme(const LoadedScheme& loaded);

/// Counts file: { "settings": [{ "label", "counts": [ints] }, ...],
/// "weights"?: [doubles] }. Counts are the on-disk truth; frequencies are
/// derived as f_a = q_s c_{a|s} / n_s.
struct CountsData {
  struct SettingCounts {
    std::string label;
    std::vector<long long> counts;
  };
  std::vector<SettingCounts> settings;
  std::optional<std::vector<double>> weights;
};
CountsData counts_from_json(const Json& j);
Json counts_to_json(const CountsData& counts);

/// Frequencies in the merged outcome order (settings-major) plus the total
/// shot count. Labels must match the scheme's settings one-to-one; explicit
/// weights must match the scheme weights within 1e-9.
RealVector assemble_frequencies(const CountsData& counts, const std::vector<Setting>& settings,
                                long long* total_shots);

/// Counts without declared weights describe a fixed per-setting design: the
/// effective sampling weights are the realized shares n_s / N. Returns the
/// settings with weights replaced accordingly (the map and the frequencies
/// must use the same weights for the inversion to be consistent).
std::vector<Setting> fixed_design_settings(const std::vector<Setting>& settings,
                                           const CountsData& counts);

Json region_report(const Region& region);
Json outcome_report(const FeasibilityOutcome& outcome);

std::string format_double(double x);
std::string csv_line(const std::vector<std::string>& fields);

Json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace qcr
