#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "condop/fredholm.hpp"
#include "condop/oracle_types.hpp"
#include "condop/weighted_ops.hpp"

namespace condop {

using Json = nlohmann::json;

/// Scenario problem, reported with the JSON path of the offending field.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Values given pointwise or by a rule of the interval coordinate t.
struct ValueSpec {
  enum class Kind { values, constant, indicator, linear, exp };
  Kind kind = Kind::constant;
  std::vector<Scalar> values;
  Scalar c{1.0, 0.0};    // constant
  double lo = 0.0;       // indicator of [lo, hi)
  double hi = 0.0;
  double a = 0.0;        // linear a + b t, exp a e^{b t}
  double b = 0.0;

  Scalar at(double t) const;
  Function sample(const MeasureSpace& space, const std::string& path) const;
};

struct Scenario {
  int schema_version = 1;
  Json source;

  // Space: explicit weights, or one dyadic level.
  std::vector<double> weights;
  std::vector<PointKind> kinds;
  std::optional<int> dyadic_level;
  double dyadic_mass = 1.0;

  std::optional<std::vector<std::size_t>> assignment;
  BlockRule rule = BlockRule::pairing;
  bool partition_given = false;

  ValueSpec u;
  ValueSpec w;
  double p = 2.0;
  double q = 2.0;
  Codomain codomain = Codomain::algebra;
  std::vector<std::string> analyses;
  OracleConfig oracle;
  std::optional<std::uint64_t> seed;

  std::optional<std::pair<int, int>> sweep_levels;
  int rank_offset = 0;  // audit fixture: corrupts the reported rank

  std::optional<Matrix> recognize_matrix;
  std::string recognize_mode = "structure";
};

const std::vector<std::string>& available_analyses();

Scenario parse_scenario(const Json& j);
Scenario load_scenario(const std::filesystem::path& path);

MeasureSpace build_space(const Scenario& s);
PartitionAlgebra build_partition(const Scenario& s, const MeasureSpace& space);
CondOperator build_operator(const Scenario& s);

/// Outcome flags that decide the exit code.
struct RunStatus {
  bool audit_failed = false;
  bool oracle_flagged = false;
  std::vector<std::string> messages;
};

/// Deterministic report body for the scenario's analyses (all applicable
/// analyses when `all_applicable` and the list is empty).
Json run_analyses(const Scenario& s, const OracleConfig& cfg, RunStatus& status, bool all_applicable = false);

struct SweepOutput {
  Json body;
  std::vector<std::pair<int, Json>> level_reports;
  std::string csv;
};

SweepOutput run_sweep(const Scenario& s, int first, int last, const OracleConfig& cfg, RunStatus& status);

Json run_recognition(const Scenario& s, std::uint64_t seed);

/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string canonical_dump(const Json& j);

/// Doubles as JSON; non-finite values become "inf", "-inf" or "nan".
Json number(double x);

}  // namespace condop
