#include "condop/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "condop/errors.hpp"
#include "condop/range_criteria.hpp"
#include "condop/recognition.hpp"

namespace condop {

namespace {

constexpr double kMinExponent = 1.01;
constexpr double kMaxExponent = 64.0;
constexpr std::size_t kMaxPoints = 4096;

std::string key_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

std::string index_path(const std::string& parent, std::size_t i) { return parent + "[" + std::to_string(i) + "]"; }

const Json& require(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw ValidationError(key_path(path, key), "required field is missing");
  return obj.at(key);
}

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path.empty() ? "$" : path, "expected an object");
}

void require_array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, "expected a list");
}

void allow_keys(const Json& obj, std::initializer_list<const char*> keys, const std::string& path) {
  for (const auto& [k, _] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
      throw ValidationError(key_path(path, k), "unknown field");
  }
}

double parse_rational(const std::string& s, const std::string& path) {
  const auto slash = s.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    }
    const std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    const double a = std::stod(num, &used);
    if (used != num.size()) throw std::invalid_argument(s);
    const double b = std::stod(den, &used);
    if (used != den.size()) throw std::invalid_argument(s);
    if (b == 0.0) throw ValidationError(path, "zero denominator");
    return a / b;
  } catch (const std::logic_error&) {
    throw ValidationError(path, "expected a number or a fraction like \"1/3\", got \"" + s + "\"");
  }
}

double real_value(const Json& j, const std::string& path) {
  double v = 0.0;
  if (j.is_number()) v = j.get<double>();
  else if (j.is_string()) v = parse_rational(j.get<std::string>(), path);
  else throw ValidationError(path, "expected a number");
  if (!std::isfinite(v)) throw ValidationError(path, "must be finite");
  return v;
}

Scalar complex_value(const Json& j, const std::string& path) {
  if (j.is_object()) {
    allow_keys(j, {"re", "im"}, path);
    const double re = j.contains("re") ? real_value(j.at("re"), key_path(path, "re")) : 0.0;
    const double im = j.contains("im") ? real_value(j.at("im"), key_path(path, "im")) : 0.0;
    return {re, im};
  }
  return {real_value(j, path), 0.0};
}

long long integer_value(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ValidationError(path, "expected an integer");
  return j.get<long long>();
}

ValueSpec parse_values(const Json& j, const std::string& path) {
  ValueSpec v;
  if (j.is_array()) {
    v.kind = ValueSpec::Kind::values;
    for (std::size_t i = 0; i < j.size(); ++i) v.values.push_back(complex_value(j[i], index_path(path, i)));
    return v;
  }
  if (!j.is_object()) {
    v.c = complex_value(j, path);
    return v;
  }
  if (j.contains("values")) {
    allow_keys(j, {"values"}, path);
    const Json& arr = j.at("values");
    require_array(arr, key_path(path, "values"));
    return parse_values(arr, key_path(path, "values"));
  }
  const std::string rpath = key_path(path, "rule");
  const Json& rule = require(j, "rule", path);
  if (!rule.is_string()) throw ValidationError(rpath, "expected a rule name");
  const std::string name = rule.get<std::string>();
  auto num = [&](const char* key, double fallback) {
    return j.contains(key) ? real_value(j.at(key), key_path(path, key)) : fallback;
  };
  if (name == "constant") {
    allow_keys(j, {"rule", "value"}, path);
    v.kind = ValueSpec::Kind::constant;
    v.c = complex_value(require(j, "value", path), key_path(path, "value"));
  } else if (name == "indicator") {
    allow_keys(j, {"rule", "lo", "hi"}, path);
    v.kind = ValueSpec::Kind::indicator;
    v.lo = num("lo", 0.0);
    v.hi = real_value(require(j, "hi", path), key_path(path, "hi"));
    if (!(v.lo < v.hi)) throw ValidationError(key_path(path, "hi"), "indicator needs lo < hi");
  } else if (name == "linear") {
    allow_keys(j, {"rule", "a", "b"}, path);
    v.kind = ValueSpec::Kind::linear;
    v.a = num("a", 0.0);
    v.b = num("b", 1.0);
  } else if (name == "exp") {
    allow_keys(j, {"rule", "a", "b"}, path);
    v.kind = ValueSpec::Kind::exp;
    v.a = num("a", 1.0);
    v.b = num("b", -1.0);
  } else {
    throw ValidationError(rpath, "unknown rule '" + name + "' (expected constant, indicator, linear or exp)");
  }
  return v;
}

PointKind parse_kind(const Json& j, const std::string& path) {
  if (j == "atom") return PointKind::atom;
  if (j == "cell") return PointKind::cell;
  throw ValidationError(path, "expected \"atom\" or \"cell\"");
}

void parse_space(const Json& j, Scenario& s) {
  require_object(j, "space");
  if (j.contains("dyadic")) {
    allow_keys(j, {"dyadic"}, "space");
    const Json& d = j.at("dyadic");
    require_object(d, "space.dyadic");
    allow_keys(d, {"level", "mass"}, "space.dyadic");
    if (d.contains("level")) {
      const long long L = integer_value(d.at("level"), "space.dyadic.level");
      if (L < 1 || L > kMaxDyadicDepth + 1)
        throw ValidationError("space.dyadic.level", "must lie in 1.." + std::to_string(kMaxDyadicDepth + 1));
      s.dyadic_level = static_cast<int>(L);
    }
    if (d.contains("mass")) {
      s.dyadic_mass = real_value(d.at("mass"), "space.dyadic.mass");
      if (!(s.dyadic_mass > 0.0)) throw ValidationError("space.dyadic.mass", "must be positive");
    }
    s.weights.clear();
    return;
  }
  allow_keys(j, {"weights", "kinds"}, "space");
  const Json& w = require(j, "weights", "space");
  require_array(w, "space.weights");
  if (w.empty()) throw ValidationError("space.weights", "needs at least one point");
  if (w.size() > kMaxPoints) throw ValidationError("space.weights", "more than " + std::to_string(kMaxPoints) + " points");
  for (std::size_t i = 0; i < w.size(); ++i) {
    const std::string p = index_path("space.weights", i);
    const double x = real_value(w[i], p);
    if (!(x > 0.0)) throw ValidationError(p, "weight must be positive");
    s.weights.push_back(x);
  }
  s.kinds.assign(s.weights.size(), PointKind::atom);
  if (j.contains("kinds")) {
    const Json& k = j.at("kinds");
    require_array(k, "space.kinds");
    if (k.size() != s.weights.size()) throw ValidationError("space.kinds", "needs one kind per weight");
    for (std::size_t i = 0; i < k.size(); ++i) s.kinds[i] = parse_kind(k[i], index_path("space.kinds", i));
  }
}

void parse_partition(const Json& j, Scenario& s) {
  require_object(j, "partition");
  allow_keys(j, {"assignment", "rule"}, "partition");
  if (j.contains("assignment") == j.contains("rule"))
    throw ValidationError("partition", "give exactly one of assignment or rule");
  if (j.contains("rule")) {
    const Json& r = j.at("rule");
    if (!r.is_string()) throw ValidationError("partition.rule", "expected a rule name");
    try {
      s.rule = parse_block_rule(r.get<std::string>());
    } catch (const DomainError& e) {
      throw ValidationError("partition.rule", e.what());
    }
    return;
  }
  const Json& a = j.at("assignment");
  require_array(a, "partition.assignment");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long long b = integer_value(a[i], index_path("partition.assignment", i));
    if (b < 0) throw ValidationError(index_path("partition.assignment", i), "block index must be nonnegative");
    out.push_back(static_cast<std::size_t>(b));
  }
  s.assignment = std::move(out);
}

void parse_oracle(const Json& j, Scenario& s) {
  require_object(j, "oracle");
  allow_keys(j, {"seed", "restarts", "max_iterations", "rank_tolerance_factor", "dense_sampling_dimension_cap",
                 "dense_samples"},
             "oracle");
  auto positive_int = [&](const char* key, int& dst) {
    if (!j.contains(key)) return;
    const long long v = integer_value(j.at(key), key_path("oracle", key));
    if (v < 1 || v > 1000000) throw ValidationError(key_path("oracle", key), "must lie in 1..1000000");
    dst = static_cast<int>(v);
  };
  positive_int("restarts", s.oracle.restarts);
  positive_int("max_iterations", s.oracle.max_iterations);
  positive_int("dense_sampling_dimension_cap", s.oracle.dense_sampling_dimension_cap);
  positive_int("dense_samples", s.oracle.dense_samples);
  if (j.contains("rank_tolerance_factor")) {
    const double t = real_value(j.at("rank_tolerance_factor"), "oracle.rank_tolerance_factor");
    if (!(t > 0.0 && t < 1.0)) throw ValidationError("oracle.rank_tolerance_factor", "must lie in (0, 1)");
    s.oracle.rank_tolerance_factor = t;
  }
  if (j.contains("seed")) {
    const Json& v = j.at("seed");
    if (!v.is_number_unsigned()) throw ValidationError("oracle.seed", "expected a nonnegative integer");
    s.seed = v.get<std::uint64_t>();
  }
}

Matrix parse_matrix(const Json& j, const std::string& path) {
  require_array(j, path);
  const std::size_t n = j.size();
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::string rp = index_path(path, i);
    require_array(j[i], rp);
    if (j[i].size() != n) throw ValidationError(rp, "matrix must be square");
    for (std::size_t k = 0; k < n; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = complex_value(j[i][k], index_path(rp, k));
  }
  return m;
}

}  // namespace

Scalar ValueSpec::at(double t) const {
  switch (kind) {
    case Kind::constant: return c;
    case Kind::indicator: return (t >= lo && t < hi) ? Scalar(1.0) : Scalar(0.0);
    case Kind::linear: return Scalar(a + b * t);
    case Kind::exp: return Scalar(a * std::exp(b * t));
    case Kind::values: break;
  }
  throw DomainError("pointwise values have no rule to evaluate");
}

Function ValueSpec::sample(const MeasureSpace& space, const std::string& path) const {
  Vector v(static_cast<Eigen::Index>(space.size()));
  if (kind == Kind::values) {
    if (values.size() != space.size())
      throw ValidationError(path, "needs " + std::to_string(space.size()) + " values, got " + std::to_string(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  } else {
    for (std::size_t i = 0; i < space.size(); ++i) v[static_cast<Eigen::Index>(i)] = at(space.coordinate(i));
  }
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag()))
      throw ValidationError(path, "value at point " + std::to_string(i) + " is not finite");
  return Function(space, std::move(v));
}

const std::vector<std::string>& available_analyses() {
  static const std::vector<std::string> names = {
      "ameasurable_equivalences", "check_same_exponent", "classify_cross_exponent", "maximize_ratio",
      "min_modulus",              "numeric_rank",        "range_analysis",          "surjectivity_necessary",
      "takagi_quantities"};
  return names;
}

Scenario parse_scenario(const Json& j) {
  require_object(j, "");
  allow_keys(j,
             {"schema_version", "space", "partition", "u", "w", "exponents", "codomain", "analyses", "oracle", "sweep",
              "audit_fixture", "recognize", "description"},
             "");
  Scenario s;
  s.source = j;
  const Json& ver = require(j, "schema_version", "");
  if (!ver.is_number_integer() || ver.get<long long>() != 1)
    throw ValidationError("schema_version", "unsupported schema version (expected 1)");

  parse_space(require(j, "space", ""), s);
  if (j.contains("partition")) {
    parse_partition(j.at("partition"), s);
    s.partition_given = true;
  }

  if (j.contains("u")) s.u = parse_values(j.at("u"), "u");
  if (j.contains("w")) s.w = parse_values(j.at("w"), "w");

  if (j.contains("exponents")) {
    const Json& e = j.at("exponents");
    require_object(e, "exponents");
    allow_keys(e, {"p", "q"}, "exponents");
    s.p = real_value(require(e, "p", "exponents"), "exponents.p");
    s.q = e.contains("q") ? real_value(e.at("q"), "exponents.q") : s.p;
    for (auto [name, v] : {std::pair{"exponents.p", s.p}, std::pair{"exponents.q", s.q}})
      if (!(v >= kMinExponent && v <= kMaxExponent))
        throw ValidationError(name, "exponent must lie in [1.01, 64]");
  }

  if (j.contains("codomain")) {
    const Json& c = j.at("codomain");
    if (c == "algebra") s.codomain = Codomain::algebra;
    else if (c == "sigma") s.codomain = Codomain::sigma;
    else throw ValidationError("codomain", "expected \"algebra\" or \"sigma\"");
  }

  if (j.contains("analyses")) {
    const Json& a = j.at("analyses");
    require_array(a, "analyses");
    const auto& known = available_analyses();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string p = index_path("analyses", i);
      if (!a[i].is_string()) throw ValidationError(p, "expected an analysis name");
      const std::string name = a[i].get<std::string>();
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        std::string list;
        for (const auto& k : known) list += (list.empty() ? "" : ", ") + k;
        throw ValidationError(p, "unknown analysis '" + name + "'; available: " + list);
      }
      s.analyses.push_back(name);
    }
  }

  if (j.contains("oracle")) parse_oracle(j.at("oracle"), s);

  if (j.contains("sweep")) {
    const Json& sw = j.at("sweep");
    require_object(sw, "sweep");
    allow_keys(sw, {"levels"}, "sweep");
    const Json& lv = require(sw, "levels", "sweep");
    require_array(lv, "sweep.levels");
    if (lv.size() != 2) throw ValidationError("sweep.levels", "expected [first, last]");
    const long long a = integer_value(lv[0], "sweep.levels[0]"), b = integer_value(lv[1], "sweep.levels[1]");
    if (a > b) throw ValidationError("sweep.levels", "empty level range");
    if (a < 1 || b > kMaxDyadicDepth + 1)
      throw ValidationError("sweep.levels", "levels must lie in 1.." + std::to_string(kMaxDyadicDepth + 1));
    s.sweep_levels = std::pair{static_cast<int>(a), static_cast<int>(b)};
  }

  if (j.contains("audit_fixture")) {
    const Json& f = j.at("audit_fixture");
    require_object(f, "audit_fixture");
    allow_keys(f, {"rank_offset"}, "audit_fixture");
    if (f.contains("rank_offset"))
      s.rank_offset = static_cast<int>(integer_value(f.at("rank_offset"), "audit_fixture.rank_offset"));
  }

  if (j.contains("recognize")) {
    const Json& r = j.at("recognize");
    require_object(r, "recognize");
    allow_keys(r, {"matrix", "mode"}, "recognize");
    s.recognize_matrix = parse_matrix(require(r, "matrix", "recognize"), "recognize.matrix");
    if (r.contains("mode")) {
      const Json& m = r.at("mode");
      if (m != "structure" && m != "attempt" && m != "factored")
        throw ValidationError("recognize.mode", "expected \"structure\", \"attempt\" or \"factored\"");
      s.recognize_mode = m.get<std::string>();
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("$", "cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("$", std::string("not valid JSON: ") + e.what());
  }
  return parse_scenario(j);
}

MeasureSpace build_space(const Scenario& s) {
  if (!s.weights.empty()) return make_space(s.weights, s.kinds);
  if (!s.dyadic_level) throw ValidationError("space.dyadic.level", "required for this command");
  return dyadic_level(*s.dyadic_level, s.dyadic_mass, s.rule).space;
}

PartitionAlgebra build_partition(const Scenario& s, const MeasureSpace& space) {
  if (!s.weights.empty() && !s.partition_given)
    throw ValidationError("partition", "required for an explicit space");
  try {
    if (s.assignment) {
      if (s.assignment->size() != space.size())
        throw ValidationError("partition.assignment", "needs one block index per point (" +
                                                          std::to_string(space.size()) + ")");
      return make_partition(space, *s.assignment);
    }
    return make_partition(space, block_assignment(s.rule, space.size()));
  } catch (const DomainError& e) {
    throw ValidationError("partition", e.what());
  }
}

CondOperator build_operator(const Scenario& s) {
  const MeasureSpace space = build_space(s);
  PartitionAlgebra part = build_partition(s, space);
  Function u = s.u.sample(space, "u");
  Function w = s.w.sample(space, "w");
  try {
    return CondOperator(std::move(part), std::move(u), std::move(w), ExponentPair(s.p, s.q), s.codomain);
  } catch (const DomainError& e) {
    throw ValidationError("w", e.what());
  }
}

Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

namespace {

Json complex_json(Scalar z) { return Json::array({number(z.real()), number(z.imag())}); }

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_json(v[i]));
  return a;
}

Json indices(const std::vector<std::size_t>& v) { return Json(v); }

Json truth(Truth t) { return std::string(to_string(t)); }

Json ratio_json(const RatioEstimate& r) {
  return {{"value", number(r.value)},
          {"method", r.method},
          {"upper_bound_only", r.upper_bound_only},
          {"restarts_disagree", r.restarts_disagree},
          {"converged", r.converged},
          {"certificate", vector_json(r.certificate)}};
}

template <class T>
Json optional_number(const std::optional<T>& v) {
  return v ? number(static_cast<double>(*v)) : Json(nullptr);
}

Json supports_json(const SupportSets& s) {
  return {{"S_v", indices(s.S_v)},       {"N_v", indices(s.N_v)}, {"active_blocks", indices(s.active_blocks)},
          {"N_Eu", indices(s.N_Eu)},     {"Z", indices(s.Z)},     {"B_active", s.B_active},
          {"Eu_on_B", s.Eu_on_B}};
}

Json classifier_json(const ClassifierReport& r) {
  Json j = {{"case", std::string(to_string(r.case_tag))},
            {"delta", number(r.delta)},
            {"supports", supports_json(r.supports)},
            {"rank", r.rank},
            {"bounded_below", number(r.bounded_below)},
            {"bounded_below_flagged", r.bounded_below_flagged},
            {"injective", r.injective},
            {"bounded_below_full", optional_number(r.bounded_below_full)},
            {"hypothesis_b", r.hypothesis_b},
            {"delta_b", number(r.delta_b)},
            {"preimage_residual", optional_number(r.preimage_residual)},
            {"takagi_b", optional_number(r.takagi_b)},
            {"norm_membership", optional_number(r.norm_membership)},
            {"closed_range", r.closed_range_verdict},
            {"notes", r.notes},
            {"audit_failures", r.audit_failures}};
  if (r.chain) {
    j["chain"] = {{"closed_range", truth(r.chain->closed_range)},
                  {"finite_rank", truth(r.chain->finite_rank)},
                  {"v_condition", truth(r.chain->v_condition)},
                  {"eu_condition", truth(r.chain->eu_condition)},
                  {"implications_hold", r.chain->implications_hold}};
  } else {
    j["chain"] = nullptr;
  }
  return j;
}

Json fredholm_json(const FredholmReport& r) {
  return {{"codomain", std::string(to_string(r.codomain))},
          {"kernel_dim", r.kernel_dim},
          {"range_rank", r.range_rank},
          {"codim", r.codim},
          {"index", r.index},
          {"bounded_below", number(r.bounded_below)},
          {"bounded_below_flagged", r.bounded_below_flagged},
          {"invertible", r.invertible},
          {"adjoint_kernel_dim", optional_number(r.adjoint_kernel_dim)},
          {"audit_failures", r.audit_failures}};
}

Json surjectivity_json(const SurjectivityReport& r) {
  Json certs = Json::array();
  for (const auto& c : r.certificates)
    certs.push_back({{"block", c.block}, {"distance", number(c.distance)}, {"indicator_norm", number(c.indicator_norm)}});
  return {{"passed", r.passed}, {"Z", indices(r.Z)}, {"certificates", certs}, {"audit_failures", r.audit_failures}};
}

void collect(RunStatus& st, const std::string& who, const std::vector<std::string>& failures) {
  for (const auto& f : failures) {
    st.audit_failed = true;
    st.messages.push_back(who + ": " + f);
  }
}

void flag(RunStatus& st, const std::string& who, bool flagged) {
  if (!flagged) return;
  st.oracle_flagged = true;
  st.messages.push_back(who + ": oracle value is an unproven upper bound");
}

std::vector<std::string> applicable(const CondOperator& op) {
  std::vector<std::string> out;
  const bool same = op.exponents().exponent_case() == ExponentCase::same;
  if (same) {
    out.push_back("check_same_exponent");
    if (is_A_measurable(op.partition(), op.u())) out.push_back("ameasurable_equivalences");
  } else {
    out.push_back("classify_cross_exponent");
    out.push_back("takagi_quantities");
  }
  out.push_back("numeric_rank");
  out.push_back("range_analysis");
  out.push_back("min_modulus");
  out.push_back("maximize_ratio");
  if (op.codomain() == Codomain::algebra) out.push_back("surjectivity_necessary");
  std::sort(out.begin(), out.end());
  return out;
}

Json run_one(const std::string& name, const CondOperator& op, const CondOperator& reduced, int rank_offset,
             const OracleConfig& cfg, RunStatus& st) {
  auto classifier = [&](ClassifierReport r) {
    if (rank_offset != 0) {
      r.rank += rank_offset;
      r.audit_failures = audit_report(r);
      r.notes.push_back("rank altered by audit fixture");
    }
    flag(st, name, r.bounded_below_flagged);
    collect(st, name, r.audit_failures);
    return classifier_json(r);
  };
  if (name == "check_same_exponent") return classifier(check_same_exponent(reduced, cfg));
  if (name == "classify_cross_exponent")
    return classifier(classify_cross_exponent(reduced, reduced.exponents().exponent_case(), cfg));
  if (name == "ameasurable_equivalences") return classifier(ameasurable_equivalences(reduced, cfg));
  if (name == "takagi_quantities") {
    const TakagiQuantities t = takagi_quantities(reduced);
    return {{"b", number(t.b)}, {"norm_membership", number(t.norm_membership)}, {"note", t.note}};
  }
  if (name == "numeric_rank") return {{"rank", numeric_rank(matrix_of(op), cfg.rank_tolerance_factor)}};
  if (name == "range_analysis") {
    const FredholmReport r = range_analysis(op, cfg);
    flag(st, name, r.bounded_below_flagged);
    collect(st, name, r.audit_failures);
    return fredholm_json(r);
  }
  if (name == "min_modulus") {
    const RatioEstimate full = min_modulus(op, false, cfg);
    const RatioEstimate restricted = min_modulus(op, true, cfg);
    flag(st, name, full.upper_bound_only || restricted.upper_bound_only);
    return {{"unrestricted", ratio_json(full)}, {"kernel_complement", ratio_json(restricted)}};
  }
  if (name == "maximize_ratio") {
    const RatioEstimate r = maximize_ratio(op, cfg);
    flag(st, name, r.upper_bound_only);
    return ratio_json(r);
  }
  if (name == "surjectivity_necessary") {
    const SurjectivityReport r = surjectivity_necessary(reduced, cfg);
    collect(st, name, r.audit_failures);
    return surjectivity_json(r);
  }
  throw ValidationError("analyses", "unknown analysis '" + name + "'");
}

}  // namespace

Json run_analyses(const Scenario& s, const OracleConfig& cfg, RunStatus& status, bool all_applicable) {
  const CondOperator op = build_operator(s);
  const bool reduce = !op.w_is_one();
  const CondOperator reduced =
      reduce ? CondOperator::em_u(op.partition(), reduce_to_EMv(op), op.exponents()).with_codomain(op.codomain()) : op;

  std::vector<std::string> names = s.analyses;
  if (names.empty() && all_applicable) names = applicable(op);

  Json results = Json::object();
  for (std::size_t i = 0; i < names.size(); ++i) {
    try {
      results[names[i]] = run_one(names[i], op, reduced, s.rank_offset, cfg, status);
    } catch (const CaseError& e) {
      throw ValidationError(index_path("analyses", i), e.what());
    } catch (const PreconditionError& e) {
      throw ValidationError(index_path("analyses", i), e.what());
    }
  }

  Json body;
  body["seed"] = cfg.seed;
  body["scenario"] = s.source;
  body["operator"] = {{"dim", op.dim()},
                      {"blocks", op.partition().num_blocks()},
                      {"p", number(op.exponents().p())},
                      {"q", number(op.exponents().q())},
                      {"case", std::string(to_string(op.exponents().exponent_case()))},
                      {"codomain", std::string(to_string(op.codomain()))},
                      {"classifiers_use_reduction", reduce}};
  body["results"] = std::move(results);
  body["verdict"] = {{"audit_passed", !status.audit_failed},
                     {"oracle_flagged", status.oracle_flagged},
                     {"messages", status.messages}};
  return body;
}

namespace {

std::string g17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

SweepOutput run_sweep(const Scenario& s, int first, int last, const OracleConfig& cfg, RunStatus& status) {
  if (!s.weights.empty()) throw ValidationError("space", "sweep needs a dyadic space");
  if (first > last) throw ValidationError("sweep.levels", "empty level range");
  if (first < 1 || last > kMaxDyadicDepth + 1)
    throw ValidationError("sweep.levels", "levels must lie in 1.." + std::to_string(kMaxDyadicDepth + 1));
  if (s.u.kind == ValueSpec::Kind::values) throw ValidationError("u", "sweep needs a rule for u, not pointwise values");
  if (!(s.w.kind == ValueSpec::Kind::constant && s.w.c == Scalar(1.0)))
    throw ValidationError("w", "sweep analyses E M_u and needs w = 1");

  const RefinementFamily fam = dyadic_family(std::max(last - 1, 1), s.dyadic_mass, s.rule);
  const ExponentPair ex(s.p, s.q);
  const ValueSpec u = s.u;
  SweepTable table = dichotomy_sweep(fam, first, last, [&u](double t) { return u.at(t); }, ex, cfg);

  SweepOutput out;
  std::ostringstream csv;
  csv << "level,kernel_dim,rank,codim,index,bounded_below,delta,takagi_b\r\n";
  Json rows = Json::array();
  for (const SweepRow& row : table.rows) {
    const RefinementLevel& lv = fam.at_level(row.level);
    const CondOperator op = CondOperator::em_u(lv.partition, s.u.sample(lv.space, "u"), ex);
    const SupportSets sup = support_sets(op);
    const Function v = v_weight(op);
    double delta = 0.0;
    if (!sup.S_v.empty()) {
      delta = std::numeric_limits<double>::infinity();
      for (std::size_t x : sup.S_v) delta = std::min(delta, std::abs(v[x]));
    }
    std::optional<double> takagi;
    if (ex.exponent_case() != ExponentCase::same) takagi = takagi_quantities(op).b;

    flag(status, "level " + std::to_string(row.level), row.report.bounded_below_flagged);
    collect(status, "level " + std::to_string(row.level), row.report.audit_failures);

    csv << row.level << ',' << row.report.kernel_dim << ',' << row.report.range_rank << ',' << row.report.codim << ','
        << row.report.index << ',' << g17(row.report.bounded_below) << ',' << g17(delta) << ','
        << (takagi ? g17(*takagi) : "") << "\r\n";

    Json lj = {{"level", row.level},
               {"mesh", number(row.mesh)},
               {"fredholm", fredholm_json(row.report)},
               {"delta", number(delta)},
               {"takagi_b", optional_number(takagi)}};
    rows.push_back(lj);
    Json level_body = {{"seed", cfg.seed}, {"scenario", s.source}, {"level_report", lj}};
    out.level_reports.emplace_back(row.level, std::move(level_body));
  }
  csv << "verdict," << to_string(table.verdict) << ",,,,,,\r\n";
  out.csv = csv.str();
  out.body = {{"seed", cfg.seed},
              {"scenario", s.source},
              {"levels", Json::array({first, last})},
              {"rows", rows},
              {"verdict", std::string(to_string(table.verdict))},
              {"audit_passed", !status.audit_failed},
              {"oracle_flagged", status.oracle_flagged},
              {"messages", status.messages}};
  return out;
}

Json run_recognition(const Scenario& s, std::uint64_t seed) {
  if (!s.recognize_matrix) throw ValidationError("recognize", "required for this command");
  const MeasureSpace space = build_space(s);
  if (static_cast<std::size_t>(s.recognize_matrix->rows()) != space.size())
    throw ValidationError("recognize.matrix", "needs " + std::to_string(space.size()) + " rows");
  const AbstractOperator t(space, *s.recognize_matrix);
  const HypothesisReport h = verify_projection_hypotheses(t, 8, seed);

  Json body;
  body["seed"] = seed;
  body["scenario"] = s.source;
  body["mode"] = s.recognize_mode;
  body["hypotheses"] = {{"positive", h.positive},
                        {"idempotent", h.idempotent},
                        {"preserves_unit", h.preserves_unit},
                        {"multiplicative", h.multiplicative},
                        {"sublattice", h.sublattice},
                        {"idempotence_residual", number(h.idempotence_residual)},
                        {"unit_residual", number(h.unit_residual)},
                        {"multiplicativity_residual", number(h.multiplicativity_residual)},
                        {"sublattice_residual", number(h.sublattice_residual)},
                        {"notes", h.notes},
                        {"failures", h.failures}};
  try {
    const RecoveredStructure r =
        s.recognize_mode == "factored" ? recover_factored(t) : recover_structure(t, s.recognize_mode == "attempt");
    body["recognized"] = true;
    body["structure"] = {{"assignment", Json(std::vector<std::size_t>(r.partition.assignment().begin(),
                                                                      r.partition.assignment().end()))},
                         {"w", vector_json(r.w.values())},
                         {"k", r.k ? vector_json(r.k->values()) : Json(nullptr)},
                         {"ew_is_one", r.ew_is_one},
                         {"ewk_is_one", r.ewk_is_one},
                         {"ek_is_one", r.ek_is_one},
                         {"rebuild_residual", number(r.rebuild_residual)}};
  } catch (const NotConditionalType& e) {
    body["recognized"] = false;
    body["rejection"] = e.what();
  } catch (const PreconditionError& e) {
    body["recognized"] = false;
    body["rejection"] = e.what();
  }
  return body;
}

}  // namespace condop
