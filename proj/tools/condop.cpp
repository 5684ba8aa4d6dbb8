// condop: scenario runner for conditional-type operators.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "condop/errors.hpp"
#include "condop/gallery.hpp"
#include "condop/scenario.hpp"

namespace fs = std::filesystem;
using namespace condop;

namespace {

enum Exit { kOk = 0, kFailure = 1, kValidation = 2, kAudit = 3, kOracle = 4 };

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool strict_oracle = false;
};

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::uint64_t resolve_seed(const Globals& g, const Scenario* s) {
  if (g.seed) return *g.seed;
  if (const char* env = std::getenv("CONDOP_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || env[0] == '-') throw ValidationError("CONDOP_SEED", "expected a nonnegative integer");
    return v;
  }
  if (s && s->seed) return *s->seed;
  return 0;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

// All output goes through here, one file at a time.
class Writer {
 public:
  explicit Writer(const Globals& g) : dir_(g.out_dir) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }

  void report(const std::string& command, const Json& body, double seconds, const std::string& name = "report.json") {
    Json doc = {{"header", {{"tool", "condop"}, {"command", command}, {"started_utc", started_},
                            {"elapsed_seconds", seconds}}},
                {"body", body}};
    const std::string text = canonical_dump(doc);
    if (dir_.empty()) std::cout << text;
    else write_file(dir_ / name, text);
  }

  void extra(const std::string& name, const std::string& text) {
    if (dir_.empty()) std::cout << text;
    else write_file(dir_ / name, text);
  }

 private:
  fs::path dir_;
  std::string started_ = utc_now();
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int exit_for(const RunStatus& st, const Globals& g, bool audit = true) {
  for (const auto& m : st.messages) std::cerr << "condop: " << m << "\n";
  if (audit && st.audit_failed) return kAudit;
  if (g.strict_oracle && st.oracle_flagged) return kOracle;
  return kOk;
}

OracleConfig config_for(const Scenario& s, std::uint64_t seed) {
  OracleConfig cfg = s.oracle;
  cfg.seed = seed;
  return cfg;
}

int cmd_analyses(const Globals& g, const std::string& path, bool audit) {
  Timer timer;
  const Scenario s = load_scenario(path);
  const std::uint64_t seed = resolve_seed(g, &s);
  RunStatus st;
  const Json body = run_analyses(s, config_for(s, seed), st, true);
  Writer(g).report(audit ? "audit" : "classify", body, timer.seconds());
  return exit_for(st, g, audit);
}

int cmd_sweep(const Globals& g, const std::string& path, std::optional<int> first, std::optional<int> last) {
  Timer timer;
  const Scenario s = load_scenario(path);
  const std::uint64_t seed = resolve_seed(g, &s);
  int a = 0, b = 0;
  if (first && last) {
    a = *first;
    b = *last;
  } else if (s.sweep_levels) {
    a = first.value_or(s.sweep_levels->first);
    b = last.value_or(s.sweep_levels->second);
  } else {
    throw ValidationError("sweep.levels", "give levels in the scenario or with --first/--last");
  }
  RunStatus st;
  const SweepOutput out = run_sweep(s, a, b, config_for(s, seed), st);
  Writer w(g);
  if (!g.out_dir.empty())
    for (const auto& [level, body] : out.level_reports)
      w.report("sweep", body, 0.0, "level_" + std::to_string(level) + ".json");
  w.report("sweep", out.body, timer.seconds());
  w.extra("sweep.csv", out.csv);
  return exit_for(st, g);
}

int cmd_recognize(const Globals& g, const std::string& path) {
  Timer timer;
  const Scenario s = load_scenario(path);
  const Json body = run_recognition(s, resolve_seed(g, &s));
  Writer(g).report("recognize", body, timer.seconds());
  return kOk;
}

Json laplace_json(const LaplaceReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"x", number(row.x)},
                    {"computed", number(row.computed)},
                    {"exact", number(row.exact)},
                    {"abs_err", number(row.abs_err)},
                    {"budget_constant", number(row.budget_constant)}});
  return {{"a", number(r.a)}, {"T", number(r.T)}, {"h", number(r.h)}, {"rows", rows}};
}

Json complex_list(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(Json::array({number(v[i].real()), number(v[i].imag())}));
  return a;
}

struct DemoArgs {
  std::string name;
  std::vector<double> a{0.5, 1.0, 2.0};
  std::vector<double> probes{0.5, 1.0, 2.0};
  double T = 40.0;
  double h = 1e-3;
  std::size_t nx = 11;
  std::size_t ny = 201;
  std::vector<double> conv{1, 0, 0, 0, 0, 0, 0, 0};
};

Json demo_product(const DemoArgs& d) {
  Json out = Json::array();
  auto run = [&](const char* label, double y0, double y1, const std::function<Scalar(double, double)>& f,
                 const std::function<double(double)>& exact) {
    const ProductGrid grid = make_product_grid(trapezoid(0.0, 1.0, d.nx), trapezoid(y0, y1, d.ny));
    const ProductCondexp e = product_condexp(grid, sample_on_grid(grid, f));
    double worst = 0.0, spread = 0.0;
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      const Scalar first = e.result[grid.index(i, 0)];
      worst = std::max(worst, std::abs(first - exact(grid.x.nodes[i])));
      for (std::size_t j = 1; j < grid.ny(); ++j) spread = std::max(spread, std::abs(e.result[grid.index(i, j)] - first));
    }
    out.push_back({{"case", label}, {"max_error", number(worst)}, {"column_spread", number(spread)},
                   {"y_mass", number(e.y_mass)}});
  };
  run("x*t on [0,1]^2", 0.0, 1.0, [](double x, double t) { return Scalar(x * t); }, [](double x) { return x / 2; });
  run("sin(t) on [0,pi]", 0.0, M_PI, [](double, double t) { return Scalar(std::sin(t)); },
      [](double) { return 2.0 / M_PI; });
  run("x^2 (no t dependence)", 0.0, 1.0, [](double x, double) { return Scalar(x * x); },
      [](double x) { return x * x; });
  return {{"demo", "product"}, {"nx", d.nx}, {"ny", d.ny}, {"cases", out}};
}

Json demo_kernel(const DemoArgs& d) {
  const KernelSpec spec = laplace_kernel(d.probes, d.T, d.h);
  Vector f(static_cast<Eigen::Index>(spec.y.nodes.size()));
  for (std::size_t j = 0; j < spec.y.nodes.size(); ++j) f[static_cast<Eigen::Index>(j)] = std::exp(-spec.y.nodes[j]);
  const KernelResult r = kernel_as_condexp(spec, f);
  Json rows = Json::array();
  for (std::size_t i = 0; i < d.probes.size(); ++i)
    rows.push_back({{"x", number(d.probes[i])},
                    {"via_condexp", number(r.via_condexp[static_cast<Eigen::Index>(i)].real())},
                    {"direct", number(r.direct[static_cast<Eigen::Index>(i)].real())},
                    {"exact", number(1.0 / (d.probes[i] + 1.0))}});
  return {{"demo", "kernel"}, {"kernel", spec.name}, {"f", "exp(-t)"}, {"rows", rows},
          {"relative_difference", number(r.relative_difference)}, {"y_mass", number(r.y_mass)}};
}

Json demo_convolution(const DemoArgs& d, std::uint64_t seed) {
  std::vector<Scalar> w(d.conv.begin(), d.conv.end());
  const KernelSpec spec = convolution_kernel(w);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vector f(static_cast<Eigen::Index>(w.size()));
  for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = g(rng);
  const KernelResult r = kernel_as_condexp(spec, f);
  return {{"demo", "convolution"}, {"n", w.size()}, {"f", complex_list(f)}, {"via_condexp", complex_list(r.via_condexp)},
          {"direct", complex_list(r.direct)}, {"relative_difference", number(r.relative_difference)}};
}

int cmd_demo(const Globals& g, const DemoArgs& d) {
  Timer timer;
  const std::uint64_t seed = resolve_seed(g, nullptr);
  Json body;
  if (d.name == "laplace") {
    Json tables = Json::array();
    for (double a : d.a) tables.push_back(laplace_json(laplace_demo(a, d.probes, d.T, d.h)));
    body = {{"demo", "laplace"}, {"tables", tables}};
  } else if (d.name == "product") {
    body = demo_product(d);
  } else if (d.name == "kernel") {
    body = demo_kernel(d);
  } else {
    body = demo_convolution(d, seed);
  }
  body["seed"] = seed;
  Writer(g).report("demo", body, timer.seconds());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional-type operator laboratory"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed_flag = 0;
  auto* seed_opt = app.add_option("--seed", seed_flag, "Oracle seed (overrides CONDOP_SEED and the scenario)");
  app.add_option("--out", g.out_dir, "Write reports into this directory instead of stdout");
  app.add_flag("--strict-oracle", g.strict_oracle, "Exit 4 when an oracle value is only an upper bound");

  std::string path;
  auto* classify = app.add_subcommand("classify", "Run the scenario's analyses (all applicable ones if none listed)");
  classify->add_option("scenario", path, "Scenario file")->required();
  auto* audit = app.add_subcommand("audit", "Like classify, exit 3 when a consistency audit fails");
  audit->add_option("scenario", path, "Scenario file")->required();

  std::optional<int> first, last;
  auto* sweep = app.add_subcommand("sweep", "Fredholm sweep over dyadic levels");
  sweep->add_option("scenario", path, "Scenario file")->required();
  sweep->add_option("--first", first, "First level");
  sweep->add_option("--last", last, "Last level");

  auto* recognize = app.add_subcommand("recognize", "Recover a conditional-type structure from a matrix");
  recognize->add_option("scenario", path, "Scenario file")->required();

  DemoArgs d;
  auto* demo = app.add_subcommand("demo", "Gallery examples");
  demo->add_option("name", d.name, "product, kernel, laplace or convolution")
      ->required()
      ->check(CLI::IsMember({"product", "kernel", "laplace", "convolution"}));
  demo->add_option("--a", d.a, "Decay rates for the laplace demo");
  demo->add_option("--probes", d.probes, "Evaluation points x")->delimiter(',');
  demo->add_option("--T", d.T, "Truncation of [0, inf)");
  demo->add_option("--step", d.h, "Trapezoid step");
  demo->add_option("--nx", d.nx, "x nodes for the product demo");
  demo->add_option("--ny", d.ny, "y nodes for the product demo");
  demo->add_option("--w", d.conv, "Convolution weights on Z_n")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }
  if (*seed_opt) g.seed = seed_flag;

  try {
    if (*classify) return cmd_analyses(g, path, false);
    if (*audit) return cmd_analyses(g, path, true);
    if (*sweep) return cmd_sweep(g, path, first, last);
    if (*recognize) return cmd_recognize(g, path);
    return cmd_demo(g, d);
  } catch (const ValidationError& e) {
    std::cerr << "condop: invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const DomainError& e) {
    std::cerr << "condop: invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "condop: " << e.what() << "\n";
    return kFailure;
  }
}
