#include "condop/range_criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "condop/errors.hpp"

namespace condop {

std::string_view to_string(Truth t) {
  switch (t) {
    case Truth::yes: return "yes";
    case Truth::no: return "no";
    case Truth::undetermined: return "undetermined";
  }
  return "?";
}

namespace {

double threshold_of(const Vector& values) {
  const double m = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
  return kSupportThreshold * m;
}

bool above(double value, double thr, double max_value) { return max_value > 0.0 && value > thr; }

void require_w_one(const CondOperator& op, const char* who) {
  if (!op.w_is_one())
    throw PreconditionError(std::string(who) + " expects w = 1; reduce the operator to E M_v first");
}

// Blocks of S where E(u) vanishes though E(|u|^p') does not, or vice versa.
struct SameExponentHypothesis {
  bool holds = false;
  double delta_b = 0.0;
  std::vector<std::size_t> support_blocks;
  Vector eu;
};

SameExponentHypothesis same_exponent_hypothesis(const CondOperator& op) {
  SameExponentHypothesis h;
  const auto& part = op.partition();
  h.eu = block_averages(part, op.u().values());
  const Function vp = conditional_power_mean(part, op.u(), op.exponents().p_conj());
  const double vmax = sup_norm(vp);
  const double vthr = kSupportThreshold * vmax;
  const double emax = h.eu.size() ? h.eu.cwiseAbs().maxCoeff() : 0.0;
  const double ethr = kSupportThreshold * emax;
  bool equal = true;
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < part.num_blocks(); ++b) {
    const bool in_v = above(std::abs(vp[part.block(b).front()]), vthr, vmax);
    const double eb = std::abs(h.eu[static_cast<Eigen::Index>(b)]);
    const bool in_e = above(eb, ethr, emax);
    if (in_v != in_e) equal = false;
    if (in_v) {
      h.support_blocks.push_back(b);
      dmin = std::min(dmin, eb);
    }
  }
  h.holds = equal && !h.support_blocks.empty() && dmin > 0.0;
  h.delta_b = h.support_blocks.empty() ? 0.0 : dmin;
  return h;
}

double min_over(const Function& v, const std::vector<std::size_t>& points) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t x : points) d = std::min(d, std::abs(v[x]));
  return points.empty() ? 0.0 : d;
}

bool implications_hold(const ChainEvaluation& c) {
  auto violated = [](Truth premise, Truth conclusion) { return premise == Truth::yes && conclusion == Truth::no; };
  return !violated(c.v_condition, c.finite_rank) && !violated(c.finite_rank, c.closed_range) &&
         !violated(c.closed_range, c.eu_condition);
}

}  // namespace

SupportSets support_sets(const CondOperator& op) {
  SupportSets s;
  const auto& part = op.partition();
  const auto& space = op.space();
  const Function v = v_weight(op);
  const double vmax = sup_norm(v);
  const double vthr = threshold_of(v.values());
  for (std::size_t b = 0; b < part.num_blocks(); ++b) {
    if (!above(std::abs(v[part.block(b).front()]), vthr, vmax)) continue;
    s.active_blocks.push_back(b);
    if (part.block_kind(b) == PointKind::atom)
      s.N_v.push_back(b);
    else
      s.B_active = true;
    for (std::size_t x : part.block(b)) s.S_v.push_back(x);
  }
  std::sort(s.S_v.begin(), s.S_v.end());

  const Vector eu = block_averages(part, op.u().values());
  const double emax = eu.size() ? eu.cwiseAbs().maxCoeff() : 0.0;
  const double ethr = kSupportThreshold * emax;
  for (std::size_t b = 0; b < part.num_blocks(); ++b) {
    if (!above(std::abs(eu[static_cast<Eigen::Index>(b)]), ethr, emax)) continue;
    if (part.block_kind(b) == PointKind::atom)
      s.N_Eu.push_back(b);
    else
      s.Eu_on_B = true;
  }

  const Function vp = conditional_power_mean(part, op.u(), op.exponents().p_conj());
  const double pmax = sup_norm(vp);
  const double pthr = kSupportThreshold * pmax;
  for (std::size_t x = 0; x < space.size(); ++x)
    if (!above(std::abs(vp[x]), pthr, pmax)) s.Z.push_back(x);
  return s;
}

std::vector<std::string> audit_report(const ClassifierReport& r) {
  std::vector<std::string> out;
  const auto n_active = static_cast<int>(r.supports.active_blocks.size());
  const auto n_v = static_cast<int>(r.supports.N_v.size());
  if (r.rank > n_active)
    out.push_back("rank " + std::to_string(r.rank) + " exceeds the number of active blocks " + std::to_string(n_active));
  if (r.chain) {
    if (r.chain->v_condition == Truth::yes && !r.supports.B_active && r.rank > n_v)
      out.push_back("condition (3) holds but rank " + std::to_string(r.rank) + " exceeds |N_v| = " + std::to_string(n_v));
    if (!r.chain->implications_hold) out.push_back("implication chain (3)->(2)->(1)->(4) violated");
  }
  if (r.preimage_residual && !(*r.preimage_residual <= 1e-10))
    out.push_back("preimage round trip residual " + std::to_string(*r.preimage_residual) + " exceeds 1e-10");
  if (r.bounded_below_full && !r.bounded_below_flagged && r.delta < *r.bounded_below_full * (1.0 - 1e-9))
    out.push_back("delta below the bounded-below constant of an injective operator");
  return out;
}

Function same_exponent_preimage(const CondOperator& op, const Function& g) {
  if (op.exponents().exponent_case() != ExponentCase::same) throw CaseError("preimage construction needs p = q");
  require_w_one(op, "same_exponent_preimage");
  if (!is_A_measurable(op.partition(), g)) throw PreconditionError("g must be A-measurable");
  const SameExponentHypothesis h = same_exponent_hypothesis(op);
  if (!h.holds)
    throw PreconditionError(
        "refused: supp E(u) differs from supp E(|u|^p') or E(u) is not bounded away from 0 on S; "
        "division by E(u) is outside the sufficient hypothesis");
  const auto& part = op.partition();
  Vector f = Vector::Zero(static_cast<Eigen::Index>(op.dim()));
  std::vector<bool> in_s(part.num_blocks(), false);
  for (std::size_t b : h.support_blocks) in_s[b] = true;
  for (std::size_t x = 0; x < op.dim(); ++x) {
    const std::size_t b = part.block_of(x);
    if (in_s[b])
      f[static_cast<Eigen::Index>(x)] = g[x] / h.eu[static_cast<Eigen::Index>(b)];
    else if (g[x] != Scalar(0.0))
      throw PreconditionError("g must vanish outside S");
  }
  return Function(op.space(), std::move(f));
}

ClassifierReport check_same_exponent(const CondOperator& op, const OracleConfig& cfg) {
  if (op.exponents().exponent_case() != ExponentCase::same)
    throw CaseError("check_same_exponent needs p = q");
  require_w_one(op, "check_same_exponent");
  ClassifierReport r;
  r.case_tag = ExponentCase::same;
  r.supports = support_sets(op);
  const Function v = v_weight(op);
  r.delta = min_over(v, r.supports.S_v);
  r.rank = numeric_rank(matrix_of(op), cfg.rank_tolerance_factor);
  r.injective = static_cast<std::size_t>(r.rank) == op.dim();

  const RatioEstimate bb = min_modulus(op, true, cfg);
  r.bounded_below = bb.value;
  r.bounded_below_flagged = bb.upper_bound_only;
  if (r.injective) {
    // The kernel complement is the whole domain.
    r.bounded_below_full = bb.value;
    if (bb.upper_bound_only) r.notes.push_back("bounded-below constant unproven; delta >= beta not asserted");
  } else {
    r.notes.push_back("not injective: necessary direction is vacuous on this instance");
  }

  const SameExponentHypothesis h = same_exponent_hypothesis(op);
  r.hypothesis_b = h.holds;
  r.delta_b = h.delta_b;
  if (h.holds) {
    double worst = 0.0;
    for (std::size_t b : h.support_blocks) {
      const Function g = Function::indicator(op.space(), op.partition().block(b));
      const Function f = same_exponent_preimage(op, g);
      const Vector diff = apply(op, f).values() - g.values();
      worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
    r.preimage_residual = worst;
  } else if (r.supports.S_v.empty()) {
    r.notes.push_back("u = 0: zero operator, range {0} is closed");
  } else {
    r.notes.push_back("sufficient hypothesis fails; preimage construction refused");
  }

  r.closed_range_verdict = bb.method == "degenerate" || bb.value > 0.0;
  r.notes.push_back("finite model: every range is closed; bounded_below is the graded proxy");
  r.audit_failures = audit_report(r);
  return r;
}

ClassifierReport classify_cross_exponent(const CondOperator& op, ExponentCase direction, const OracleConfig& cfg) {
  if (direction == ExponentCase::same) throw CaseError("classify_cross_exponent needs direction down or up");
  if (op.exponents().exponent_case() != direction)
    throw CaseError(std::string("exponent order does not match direction ") + std::string(to_string(direction)));
  require_w_one(op, "classify_cross_exponent");
  ClassifierReport r;
  r.case_tag = direction;
  r.supports = support_sets(op);
  const Function v = v_weight(op);
  r.delta = min_over(v, r.supports.S_v);
  r.rank = numeric_rank(matrix_of(op), cfg.rank_tolerance_factor);
  r.injective = static_cast<std::size_t>(r.rank) == op.dim();
  const RatioEstimate bb = min_modulus(op, true, cfg);
  r.bounded_below = bb.value;
  r.bounded_below_flagged = bb.upper_bound_only;

  const bool b_active = r.supports.B_active;
  ChainEvaluation c;
  if (direction == ExponentCase::down) {
    c.v_condition = b_active ? Truth::no : Truth::yes;
    c.eu_condition = r.supports.Eu_on_B ? Truth::no : Truth::yes;
  } else {
    c.v_condition = Truth::yes;
    c.eu_condition = Truth::yes;
    if (b_active)
      r.notes.push_back("v != 0 on B: for p < q the operator is unbounded in the non-atomic limit "
                        "(norm grows like mesh^(1/q-1/p)); chain outside its hypotheses");
  }
  c.finite_rank = b_active ? Truth::undetermined : Truth::yes;
  c.closed_range = b_active ? Truth::undetermined : Truth::yes;
  if (b_active) r.notes.push_back("closed range and finite rank are family-level claims when v != 0 on B");
  c.implications_hold = implications_hold(c);
  r.chain = c;
  r.closed_range_verdict = c.closed_range == Truth::yes;

  bool atoms_present = false;
  for (std::size_t b = 0; b < op.partition().num_blocks(); ++b)
    atoms_present = atoms_present || op.partition().block_kind(b) == PointKind::atom;
  if (atoms_present) {
    const TakagiQuantities t = takagi_quantities(op);
    r.takagi_b = t.b;
    r.norm_membership = t.norm_membership;
    if (!t.note.empty()) r.notes.push_back(t.note);
  }
  r.audit_failures = audit_report(r);
  return r;
}

TakagiQuantities takagi_quantities(const CondOperator& op) {
  const ExponentPair& ex = op.exponents();
  if (ex.exponent_case() == ExponentCase::same) throw CaseError("takagi quantities need p != q");
  const auto& part = op.partition();
  const Vector eu = block_averages(part, op.u().values());
  const double emax = eu.size() ? eu.cwiseAbs().maxCoeff() : 0.0;
  const double ethr = kSupportThreshold * emax;
  TakagiQuantities t;
  std::vector<std::size_t> active;
  for (std::size_t b = 0; b < part.num_blocks(); ++b)
    if (part.block_kind(b) == PointKind::atom && above(std::abs(eu[static_cast<Eigen::Index>(b)]), ethr, emax))
      active.push_back(b);
  if (active.empty()) {
    t.note = "zero operator on atoms";
    return t;
  }
  double acc = 0.0;
  if (ex.exponent_case() == ExponentCase::down) {
    const double r = *ex.r();
    for (std::size_t b : active) {
      const double a = std::abs(eu[static_cast<Eigen::Index>(b)]);
      const double term = std::pow(a, r) * part.block_measure(b);
      t.b = std::max(t.b, 1.0 / term);
      acc += term;
    }
    t.norm_membership = std::pow(acc, 1.0 / r);
  } else {
    const double s = *ex.s();
    for (std::size_t b : active) {
      const double a = std::abs(eu[static_cast<Eigen::Index>(b)]);
      const double mu = part.block_measure(b);
      t.b = std::max(t.b, std::pow(a, s) / mu);
      acc += std::pow(1.0 / a, s) * mu;
    }
    t.norm_membership = std::pow(acc, 1.0 / s);
  }
  return t;
}

ClassifierReport ameasurable_equivalences(const CondOperator& op, const OracleConfig& cfg) {
  if (!is_A_measurable(op.partition(), op.u())) throw PreconditionError("u is not A-measurable");
  require_w_one(op, "ameasurable_equivalences");
  ClassifierReport r;
  const ExponentCase ec = op.exponents().exponent_case();
  r.case_tag = ec;
  r.supports = support_sets(op);
  r.rank = numeric_rank(matrix_of(op), cfg.rank_tolerance_factor);
  r.injective = static_cast<std::size_t>(r.rank) == op.dim();
  const RatioEstimate bb = min_modulus(op, true, cfg);
  r.bounded_below = bb.value;
  r.bounded_below_flagged = bb.upper_bound_only;
  r.delta = min_over(op.u(), r.supports.S_v);

  const bool b_active = r.supports.B_active;
  ChainEvaluation c;
  if (ec == ExponentCase::same) {
    // Closed range <=> |u| >= delta on S. Both hold on any finite instance;
    // the content is that the bounded-below constant equals min_S |u|.
    c.closed_range = Truth::yes;
    c.v_condition = r.supports.S_v.empty() || r.delta > 0.0 ? Truth::yes : Truth::no;
    c.finite_rank = Truth::yes;
    c.eu_condition = c.v_condition;
    if (bb.method != "degenerate" && !bb.upper_bound_only &&
        std::abs(bb.value - r.delta) > 1e-8 * std::max(r.delta, std::numeric_limits<double>::min()))
      r.audit_failures.push_back("bounded-below constant " + std::to_string(bb.value) + " differs from min_S |u| = " +
                                 std::to_string(r.delta));
  } else {
    c.v_condition = (ec == ExponentCase::down && b_active) ? Truth::no : Truth::yes;
    c.eu_condition = c.v_condition;
    c.closed_range = b_active ? Truth::undetermined : Truth::yes;
    c.finite_rank = b_active ? Truth::undetermined : Truth::yes;
    if (b_active) r.notes.push_back("u != 0 on B: equivalence is decided by the refinement trend");
  }
  auto agree = [](Truth a, Truth b) { return a == Truth::undetermined || b == Truth::undetermined || a == b; };
  c.implications_hold = agree(c.closed_range, c.finite_rank) && agree(c.finite_rank, c.v_condition) &&
                        agree(c.closed_range, c.v_condition);
  r.chain = c;
  r.closed_range_verdict = c.closed_range == Truth::yes;
  auto consistency = audit_report(r);
  r.audit_failures.insert(r.audit_failures.end(), consistency.begin(), consistency.end());
  return r;
}

SurjectivityReport surjectivity_necessary(const CondOperator& op, const OracleConfig& cfg) {
  if (op.codomain() != Codomain::algebra) throw PreconditionError("surjectivity check needs codomain L^q(A)");
  SurjectivityReport out;
  out.Z = support_sets(op).Z;
  out.passed = out.Z.empty();
  if (out.passed) return out;
  const auto& part = op.partition();
  std::vector<bool> in_z(op.dim(), false);
  for (std::size_t x : out.Z) in_z[x] = true;
  for (std::size_t b = 0; b < part.num_blocks(); ++b) {
    if (!in_z[part.block(b).front()]) continue;
    const Function chi = Function::indicator(op.space(), part.block(b));
    const double d = distance_to_range(op, chi, cfg);
    const double n = lp_norm(chi, op.exponents().q());
    out.certificates.push_back({b, d, n});
    if (std::abs(d - n) > 1e-12 * n)
      out.audit_failures.push_back("chi of block " + std::to_string(b) + " is closer to the range than its norm");
  }
  return out;
}

}  // namespace condop
