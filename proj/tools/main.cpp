// skewrank: rank correlations of skew-elliptical scale-mixture copulas.
//
// Subcommands: eval, curve, invert, estimate, selftest. Exit codes:
//   0 success
//   1 selftest failure
//   2 usage, parse, or validation error
//   3 numerical or estimation failure (no convergence, non-finite
//     integrand, targets that do not identify the parameters)
//   4 target outside the attainable range (the range is printed)
//   5 tied data where ranks are required

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "skewrank/copula_doc.hpp"
#include "skewrank/errors.hpp"
#include "skewrank/estimate.hpp"
#include "skewrank/mixing.hpp"
#include "skewrank/orthant.hpp"
#include "skewrank/qmc.hpp"
#include "skewrank/rankcorr.hpp"
#include "skewrank/sampler.hpp"
#include "skewrank/specfun.hpp"

namespace {

using nlohmann::json;
using namespace skewrank;

std::string fmt17(double x) {
  char b[64];
  std::snprintf(b, sizeof b, "%.17g", x);
  return b;
}

std::string measure_name(Measure m) {
  return m == Measure::Kendall ? "tau" : "rhos";
}

std::string method_name(Method m) {
  switch (m) {
    case Method::ClosedForm:
      return "closed-form";
    case Method::ThmExpectation:
      return "thm-expectation";
    case Method::CorBivariate:
      return "cor-bivariate";
  }
  return "closed-form";
}

// ---------------------------------------------------------------- options

struct QmcFlags {
  int points = 1 << 14;
  int replicates = 8;
  std::uint64_t seed = 1234;

  QmcConfig config() const { return {points, replicates, seed}; }
};

void add_qmc_flags(CLI::App* cmd, QmcFlags& q) {
  cmd->add_option("--points", q.points,
                  "QMC points per replicate (power of two, >= 16)");
  cmd->add_option("--replicates", q.replicates, "QMC replicates (>= 2)");
  cmd->add_option("--seed", q.seed, "QMC seed");
}

struct SpecFlags {
  std::string file;
  std::string family;
  double rho = 0.0;
  std::vector<double> skew;
  double nu = 0.0;
  std::string mixing;

  CLI::Option* rho_opt = nullptr;
  CLI::Option* nu_opt = nullptr;
};

void add_spec_flags(CLI::App* cmd, SpecFlags& s) {
  auto* file = cmd->add_option("--spec", s.file, "JSON spec file");
  auto* fam = cmd->add_option(
      "--family", s.family,
      "mn | msn | gh-skew-t | ac-skew-t | skew-normal | gaussian | "
      "student-t");
  s.rho_opt = cmd->add_option("--rho", s.rho, "pseudo-correlation in [-1, 1]");
  auto* skew = cmd->add_option("--skew", s.skew, "skew pair, e.g. --skew 1,2")
                   ->expected(2)
                   ->delimiter(',');
  s.nu_opt = cmd->add_option("--nu", s.nu, "degrees of freedom (t families)");
  auto* mix = cmd->add_option(
      "--mixing", s.mixing,
      "degenerate | gamma:<shape>:<rate> | inverse-gamma:<shape>:<rate>");
  for (CLI::Option* o : {fam, s.rho_opt, skew, s.nu_opt, mix})
    file->excludes(o);
}

json doc_json_from_flags(const SpecFlags& s, const CLI::App* cmd) {
  json j;
  if (!s.family.empty()) j["family"] = s.family;
  if (s.rho_opt->count() > 0) j["rho"] = s.rho;
  if (s.skew.size() == 2) j["skew"] = {s.skew[0], s.skew[1]};
  if (s.nu_opt->count() > 0) j["nu"] = s.nu;
  if (cmd->count("--mixing") > 0) {
    std::istringstream in(s.mixing);
    std::string kind, shape, rate;
    std::getline(in, kind, ':');
    json m;
    m["kind"] = kind;
    if (std::getline(in, shape, ':')) {
      if (!std::getline(in, rate, ':'))
        throw std::invalid_argument(
            "--mixing needs kind:<shape>:<rate> for gamma kinds");
      try {
        m["shape"] = std::stod(shape);
        m["rate"] = std::stod(rate);
      } catch (const std::exception&) {
        throw std::invalid_argument("--mixing: shape/rate must be numbers");
      }
    }
    j["mixing"] = m;
  }
  return j;
}

CopulaDocument load_doc(const SpecFlags& s, const CLI::App* cmd) {
  json j;
  if (!s.file.empty()) {
    std::ifstream in(s.file);
    if (!in) throw std::invalid_argument("cannot open spec file " + s.file);
    in >> j;
  } else {
    j = doc_json_from_flags(s, cmd);
    if (!j.contains("family"))
      throw std::invalid_argument("give --spec FILE or at least --family");
  }
  return parse_copula_doc(j);
}

std::optional<Method> parse_method(const std::string& m) {
  if (m == "auto") return std::nullopt;
  if (m == "closed") return Method::ClosedForm;
  if (m == "thm") return Method::ThmExpectation;
  if (m == "cor-bivariate") return Method::CorBivariate;
  throw std::invalid_argument(
      "--method must be auto, closed, thm, or cor-bivariate");
}

void write_output(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::invalid_argument("cannot write to " + out);
  f << text;
}

json result_json(const RankResult& r) {
  json j;
  j["measure"] = measure_name(r.measure);
  j["method"] = method_name(r.method);
  j["value"] = r.value();
  j["raw"] = r.estimate.value;
  j["std_error"] = r.estimate.std_error;
  j["points_used"] = r.estimate.points_used;
  return j;
}

Eigen::MatrixX2d read_csv_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open data file " + path);
  std::vector<std::array<double, 2>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream ls(line);
    double a = 0.0, b = 0.0;
    if (ls >> a >> b) {
      rows.push_back({a, b});
    } else {
      std::istringstream probe(line);
      std::string tok;
      if (!(probe >> tok)) continue;  // blank line
      if (lineno == 1) continue;      // header
      throw std::invalid_argument(path + ": cannot parse line " +
                                  std::to_string(lineno));
    }
  }
  if (rows.size() < 2)
    throw std::invalid_argument(path + ": need at least 2 data rows");
  Eigen::MatrixX2d x(static_cast<Eigen::Index>(rows.size()), 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    x(static_cast<Eigen::Index>(i), 0) = rows[i][0];
    x(static_cast<Eigen::Index>(i), 1) = rows[i][1];
  }
  return x;
}

// --------------------------------------------------------------- selftest

// Checks route Owen's T through this pointer so a fault can be injected
// (--inject-negate-owen) to prove the checks can fail.
double (*g_owen)(double, double) = &owen_t;

struct CheckResult {
  std::string name;
  bool ok = false;
  std::string detail;
};

CheckResult run_check(const std::string& name,
                      const std::function<void(std::string&)>& body) {
  CheckResult r;
  r.name = name;
  try {
    std::string detail;
    body(detail);
    r.ok = detail.empty();
    r.detail = detail;
  } catch (const std::exception& e) {
    r.ok = false;
    r.detail = std::string("exception: ") + e.what();
  }
  return r;
}

void expect_near(std::string& detail, const std::string& what, double got,
                 double want, double tol) {
  if (!(std::abs(got - want) <= tol)) {
    detail = what + ": got " + fmt17(got) + ", want " + fmt17(want) +
             " (tol " + fmt17(tol) + ")";
  }
}

int run_selftest(const std::string& level) {
  std::vector<CheckResult> results;
  const QmcConfig small{1 << 10, 4, 99};
  const QmcConfig medium{1 << 11, 8, 99};

  results.push_back(run_check("normal-quantile-roundtrip", [](std::string& d) {
    for (double u : {1e-12, 1e-6, 0.025, 0.3, 0.5, 0.7, 0.975, 1 - 1e-6}) {
      const double r = norm_cdf(norm_quantile(u));
      if (std::abs(r - u) > 1e-12 * std::max(u, 1.0 - u)) {
        d = "u = " + fmt17(u) + " came back as " + fmt17(r);
        return;
      }
    }
  }));

  results.push_back(run_check("owen-t-identities", [](std::string& d) {
    for (double h : {0.1, 0.5, 1.0, 2.0}) {
      const double want = 0.5 * norm_cdf(h) * norm_cdf(-h);
      expect_near(d, "T(h, 1) at h = " + fmt17(h), g_owen(h, 1.0), want,
                  1e-13);
      if (!d.empty()) return;
      expect_near(d, "T odd in a at h = " + fmt17(h), g_owen(h, -2.0),
                  -g_owen(h, 2.0), 1e-15);
      if (!d.empty()) return;
    }
  }));

  results.push_back(run_check("skew-normal-cdf-consistency",
                              [](std::string& d) {
    for (double x : {-1.5, -0.2, 0.4, 2.0})
      for (double a : {-3.0, 0.5, 1.0}) {
        expect_near(d, "cdf at x = " + fmt17(x) + ", alpha = " + fmt17(a),
                    skew_norm_cdf(x, a), norm_cdf(x) - 2.0 * g_owen(x, a),
                    1e-13);
        if (!d.empty()) return;
      }
  }));

  results.push_back(run_check("bvn-consistency", [](std::string& d) {
    const double inf = std::numeric_limits<double>::infinity();
    expect_near(d, "margin", bvn_cdf(0.7, inf, 0.4), norm_cdf(0.7), 1e-14);
    if (!d.empty()) return;
    expect_near(d, "independence", bvn_cdf(0.3, -1.1, 0.0),
                norm_cdf(0.3) * norm_cdf(-1.1), 1e-14);
    if (!d.empty()) return;
    expect_near(d, "median orthant", bvn_cdf(0.0, 0.0, 0.5),
                0.25 + std::asin(0.5) / (2.0 * std::numbers::pi), 1e-14);
  }));

  results.push_back(run_check("gamma-inverse-roundtrip", [](std::string& d) {
    for (double a : {0.5, 1.0, 2.5, 7.0})
      for (double u : {0.01, 0.3, 0.7, 0.99}) {
        const double r = reg_gamma_lower(a, reg_gamma_lower_inv(a, u));
        if (std::abs(r - u) > 1e-10) {
          d = "a = " + fmt17(a) + ", u = " + fmt17(u) + " came back as " +
              fmt17(r);
          return;
        }
      }
  }));

  results.push_back(run_check("sobol-base-sequence", [](std::string& d) {
    const std::vector<double> p = sobol_points(1, 4, 0);
    const double want[4] = {0.5, 0.75, 0.25, 0.375};
    for (int i = 0; i < 4; ++i)
      if (p[static_cast<std::size_t>(i)] != want[i]) {
        d = "point " + std::to_string(i + 1) + " is " +
            fmt17(p[static_cast<std::size_t>(i)]);
        return;
      }
  }));

  results.push_back(run_check("orthant-identity-4d", [&](std::string& d) {
    const CorrMatrix id = CorrMatrix::from_matrix(Eigen::MatrixXd::Identity(4, 4));
    const QmcEstimate est = orthant_prob(id, small);
    expect_near(d, "Phi_4(0; I)", est.value, 1.0 / 16.0,
                6.0 * est.std_error + 1e-4);
  }));

  results.push_back(run_check("gaussian-closed-consistency",
                              [&](std::string& d) {
    CopulaSpec spec;  // gaussian copula
    const double rho = 0.6;
    spec.rho = rho;
    const RankResult qmc = rank_correlation(spec, Measure::Kendall, small,
                                            Method::ThmExpectation);
    expect_near(d, "tau", qmc.estimate.value, 2.0 * std::asin(rho) / std::numbers::pi,
                6.0 * qmc.estimate.std_error + 1e-12);
  }));

  results.push_back(run_check("msn-method-agreement", [&](std::string& d) {
    CopulaSpec spec;
    spec.family = Family::MSN;
    spec.rho = 0.4;
    spec.skew = Eigen::Vector2d(2.0, -1.0);
    spec.mixing = ig_from_dof(6.0);
    const RankResult a = rank_correlation(spec, Measure::Kendall, medium,
                                          Method::CorBivariate);
    const RankResult b = rank_correlation(spec, Measure::Kendall, medium,
                                          Method::ThmExpectation);
    expect_near(d, "tau(cor-bivariate) vs tau(thm)", a.estimate.value,
                b.estimate.value,
                6.0 * (a.estimate.std_error + b.estimate.std_error) + 2e-3);
  }));

  if (level == "full") {
    results.push_back(run_check("mn-sampling-oracle", [&](std::string& d) {
      CopulaSpec spec;
      spec.family = Family::MN;
      spec.rho = 0.5;
      spec.skew = Eigen::Vector2d(1.0, 0.5);
      spec.mixing = ig_from_dof(8.0);
      const RankResult an = rank_correlation(spec, Measure::Kendall, medium);
      CounterRng rng(20240817);
      const OracleEstimate mc =
          oracle_check(spec, Measure::Kendall, 20000, 10, rng);
      const double tol = 5.0 * std::sqrt(mc.std_error * mc.std_error +
                                         an.estimate.std_error *
                                             an.estimate.std_error) +
                         1e-3;
      expect_near(d, "tau analytic vs sampled", an.estimate.value, mc.value,
                  tol);
    }));

    results.push_back(run_check("msn-sampling-oracle", [&](std::string& d) {
      CopulaSpec spec;
      spec.family = Family::MSN;
      spec.rho = -0.3;
      spec.skew = Eigen::Vector2d(1.5, 1.5);
      spec.mixing = degenerate_mixing();
      const RankResult an = rank_correlation(spec, Measure::Kendall, medium);
      CounterRng rng(20240818);
      const OracleEstimate mc =
          oracle_check(spec, Measure::Kendall, 20000, 10, rng);
      const double tol = 5.0 * std::sqrt(mc.std_error * mc.std_error +
                                         an.estimate.std_error *
                                             an.estimate.std_error) +
                         1e-3;
      expect_near(d, "tau analytic vs sampled", an.estimate.value, mc.value,
                  tol);
    }));

    results.push_back(run_check("spearman-sampling-oracle",
                                [&](std::string& d) {
      CopulaSpec spec;
      spec.family = Family::MSN;
      spec.rho = 0.6;
      spec.skew = Eigen::Vector2d(0.0, 2.0);
      spec.mixing = degenerate_mixing();
      const RankResult an = rank_correlation(spec, Measure::Spearman, medium);
      CounterRng rng(20240819);
      const OracleEstimate mc =
          oracle_check(spec, Measure::Spearman, 20000, 10, rng);
      const double tol = 5.0 * std::sqrt(mc.std_error * mc.std_error +
                                         an.estimate.std_error *
                                             an.estimate.std_error) +
                         1e-3;
      expect_near(d, "rhos analytic vs sampled", an.estimate.value, mc.value,
                  tol);
    }));
  }

  int failures = 0;
  for (const CheckResult& r : results) {
    if (r.ok) {
      std::cout << "ok   " << r.name << "\n";
    } else {
      ++failures;
      std::cout << "FAIL " << r.name << ": " << r.detail << "\n";
    }
  }
  std::cout << "selftest (" << level << "): " << results.size()
            << " checks, " << failures << " failed\n";
  return failures == 0 ? 0 : 1;
}

// ------------------------------------------------------------- subcommands

std::vector<Measure> measures_from(const std::string& m) {
  if (m == "tau") return {Measure::Kendall};
  if (m == "rhos") return {Measure::Spearman};
  if (m == "both") return {Measure::Kendall, Measure::Spearman};
  throw std::invalid_argument("--measure must be tau, rhos, or both");
}

int cmd_eval(const SpecFlags& sf, const CLI::App* cmd, const QmcFlags& qf,
             const std::string& measure, const std::string& method,
             const std::string& out) {
  const CopulaDocument doc = load_doc(sf, cmd);
  if (!doc.rho)
    throw std::invalid_argument("eval needs 'rho' in the spec or --rho");
  const QmcConfig cfg = qf.config();
  const std::optional<Method> force = parse_method(method);

  json j;
  j["spec"] = spec_echo(doc.spec);
  j["qmc"] = {{"points", cfg.points},
              {"replicates", cfg.replicates},
              {"seed", cfg.seed}};
  j["results"] = json::array();
  for (Measure m : measures_from(measure))
    j["results"].push_back(result_json(rank_correlation(doc.spec, m, cfg, force)));
  write_output(out, j.dump(2) + "\n");
  return 0;
}

std::vector<double> parse_rho_grid(const std::string& grid) {
  double lo = 0.0, hi = 0.0, step = 0.0;
  char c1 = 0, c2 = 0;
  std::istringstream in(grid);
  if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' ||
      in.rdbuf()->in_avail() > 0)
    throw std::invalid_argument("--rho-grid must be lo:hi:step");
  if (!(step > 0.0) || !(lo <= hi) || !(std::abs(lo) <= 1.0) ||
      !(std::abs(hi) <= 1.0))
    throw std::invalid_argument(
        "--rho-grid needs -1 <= lo <= hi <= 1 and step > 0");
  std::vector<double> rhos;
  const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) {
    double r = lo + i * step;
    if (r > 1.0) r = 1.0;
    if (r < -1.0) r = -1.0;
    rhos.push_back(r);
  }
  return rhos;
}

int cmd_curve(const SpecFlags& sf, const CLI::App* cmd, const QmcFlags& qf,
              const std::string& grid, const std::string& method,
              const std::string& out) {
  const CopulaDocument doc = load_doc(sf, cmd);
  const QmcConfig cfg = qf.config();
  const std::optional<Method> force = parse_method(method);

  std::ostringstream csv;
  csv << "rho,tau,tau_se,rhos,rhos_se\n";
  for (double r : parse_rho_grid(grid)) {
    CopulaSpec spec = doc.spec;
    spec.rho = r;
    const RankResult t = rank_correlation(spec, Measure::Kendall, cfg, force);
    const RankResult s = rank_correlation(spec, Measure::Spearman, cfg, force);
    csv << fmt17(r) << ',' << fmt17(t.value()) << ','
        << fmt17(t.estimate.std_error) << ',' << fmt17(s.value()) << ','
        << fmt17(s.estimate.std_error) << '\n';
  }
  write_output(out, csv.str());
  return 0;
}

json estimate_json(const EstimateResult& er) {
  json j;
  j["rho_hat"] = er.rho_hat;
  j["residual"] = er.residual;
  j["iterations"] = er.iterations;
  j["bracket"] = {er.bracket.first, er.bracket.second};
  j["attainable"] = {er.attainable.first, er.attainable.second};
  return j;
}

int cmd_invert(const SpecFlags& sf, const CLI::App* cmd, const QmcFlags& qf,
               const CLI::Option* target_opt, double target,
               const std::string& measure, const CLI::Option* tau_opt,
               double tau_target, const CLI::Option* rhos_opt,
               double rhos_target, double tol, double a_max,
               const std::string& out) {
  const CopulaDocument doc = load_doc(sf, cmd);
  const QmcConfig cfg = qf.config();

  json j;
  if (tau_opt->count() > 0 || rhos_opt->count() > 0) {
    if (target_opt->count() > 0)
      throw std::invalid_argument(
          "give either --target with --measure, or both --tau-target and "
          "--rhos-target");
    if (tau_opt->count() == 0 || rhos_opt->count() == 0)
      throw std::invalid_argument(
          "equal-slant inversion needs both --tau-target and --rhos-target");
    if (std::abs(tau_target) > 1.0 || std::abs(rhos_target) > 1.0)
      throw std::invalid_argument("targets must lie in [-1, 1]");
    if (!doc.spec.skew.isZero(0.0))
      throw std::invalid_argument(
          "equal-slant inversion estimates the skew; drop 'skew' from the "
          "spec");
    const EquiSkewEstimate est =
        invert_equi_skew(doc.spec.family, doc.spec.mixing, tau_target,
                         rhos_target, cfg, tol, a_max);
    j["mode"] = "equi-skew";
    j["family"] = family_name(doc.spec.family);
    j["targets"] = {{"tau", tau_target}, {"rhos", rhos_target}};
    j["rho_hat"] = est.rho_hat;
    j["a_hat"] = est.a_hat;
    j["tau_residual"] = est.tau_residual;
    j["rhos_residual"] = est.rhos_residual;
    j["iterations"] = est.iterations;
  } else {
    if (target_opt->count() == 0)
      throw std::invalid_argument("invert needs --target");
    if (std::abs(target) > 1.0)
      throw std::invalid_argument("--target must lie in [-1, 1]");
    const std::vector<Measure> ms = measures_from(measure);
    if (ms.size() != 1)
      throw std::invalid_argument("invert needs --measure tau or rhos");
    const EstimateResult est =
        invert_rho(doc.spec, ms.front(), target, cfg, tol);
    j["mode"] = "rho";
    j["spec"] = spec_echo(doc.spec);
    j["measure"] = measure_name(ms.front());
    j["target"] = target;
    j.update(estimate_json(est));
  }
  write_output(out, j.dump(2) + "\n");
  return 0;
}

int cmd_estimate(const SpecFlags& sf, const CLI::App* cmd, const QmcFlags& qf,
                 const std::string& data, const std::string& measure,
                 double tol, const std::string& out) {
  const CopulaDocument doc = load_doc(sf, cmd);
  const QmcConfig cfg = qf.config();
  const Eigen::MatrixX2d x = read_csv_pairs(data);
  if (x.rows() < 30)
    throw std::invalid_argument(data + ": estimate needs at least 30 rows");

  json j;
  j["spec"] = spec_echo(doc.spec);
  j["n"] = static_cast<std::int64_t>(x.rows());
  j["empirical"] = {{"tau", empirical_kendall(x)},
                    {"rhos", empirical_spearman(x)}};
  j["inversion"] = json::object();
  std::vector<double> hats;
  for (Measure m : measures_from(measure)) {
    const double target = j["empirical"][measure_name(m)].get<double>();
    const EstimateResult est = invert_rho(doc.spec, m, target, cfg, tol);
    j["inversion"][measure_name(m)] = estimate_json(est);
    j["inversion"][measure_name(m)]["target"] = target;
    hats.push_back(est.rho_hat);
  }
  if (hats.size() == 2) j["rho_hat_discrepancy"] = std::abs(hats[0] - hats[1]);
  write_output(out, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rank correlations of skew-elliptical scale-mixture copulas"};
  app.require_subcommand(1);

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate tau / rhos for one spec");
  SpecFlags eval_spec;
  QmcFlags eval_qmc;
  std::string eval_measure = "both", eval_method = "auto", eval_out;
  add_spec_flags(eval, eval_spec);
  add_qmc_flags(eval, eval_qmc);
  eval->add_option("--measure", eval_measure, "tau | rhos | both");
  eval->add_option("--method", eval_method,
                   "auto | closed | thm | cor-bivariate");
  eval->add_option("--out", eval_out, "write JSON here instead of stdout");

  // curve
  auto* curve = app.add_subcommand("curve", "tau / rhos along a rho grid");
  SpecFlags curve_spec;
  QmcFlags curve_qmc;
  std::string curve_grid = "-0.9:0.9:0.1", curve_method = "auto", curve_out;
  add_spec_flags(curve, curve_spec);
  add_qmc_flags(curve, curve_qmc);
  curve->add_option("--rho-grid", curve_grid, "lo:hi:step (default -0.9:0.9:0.1)");
  curve->add_option("--method", curve_method,
                    "auto | closed | thm | cor-bivariate");
  curve->add_option("--out", curve_out, "write CSV here instead of stdout");

  // invert
  auto* invert = app.add_subcommand(
      "invert", "solve for rho (or rho and an equal slant) from targets");
  SpecFlags invert_spec;
  QmcFlags invert_qmc;
  double invert_target = 0.0, invert_tau = 0.0, invert_rhos = 0.0;
  double invert_tol = 1e-3, invert_amax = 8.0;
  std::string invert_measure = "tau", invert_out;
  add_spec_flags(invert, invert_spec);
  add_qmc_flags(invert, invert_qmc);
  auto* target_opt =
      invert->add_option("--target", invert_target, "target rank value");
  invert->add_option("--measure", invert_measure, "tau | rhos");
  auto* tau_opt = invert->add_option("--tau-target", invert_tau,
                                     "Kendall target (equal-slant mode)");
  auto* rhos_opt = invert->add_option("--rhos-target", invert_rhos,
                                      "Spearman target (equal-slant mode)");
  invert->add_option("--tol", invert_tol, "residual tolerance (default 1e-3)");
  invert->add_option("--a-max", invert_amax,
                     "slant search bound (equal-slant mode)");
  invert->add_option("--out", invert_out, "write JSON here instead of stdout");

  // estimate
  auto* estimate = app.add_subcommand(
      "estimate", "empirical rank statistics from data, then invert rho");
  SpecFlags est_spec;
  QmcFlags est_qmc;
  std::string est_data, est_measure = "both", est_out;
  double est_tol = 1e-3;
  add_spec_flags(estimate, est_spec);
  add_qmc_flags(estimate, est_qmc);
  estimate->add_option("--data", est_data, "CSV file with two columns")
      ->required();
  estimate->add_option("--measure", est_measure, "tau | rhos | both");
  estimate->add_option("--tol", est_tol, "residual tolerance (default 1e-3)");
  estimate->add_option("--out", est_out, "write JSON here instead of stdout");

  // selftest
  auto* selftest = app.add_subcommand("selftest", "run built-in checks");
  std::string st_level = "quick";
  bool st_inject = false;
  selftest->add_option("--level", st_level, "quick | full");
  selftest->add_flag("--inject-negate-owen", st_inject)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (eval->parsed())
      return cmd_eval(eval_spec, eval, eval_qmc, eval_measure, eval_method,
                      eval_out);
    if (curve->parsed())
      return cmd_curve(curve_spec, curve, curve_qmc, curve_grid, curve_method,
                       curve_out);
    if (invert->parsed())
      return cmd_invert(invert_spec, invert, invert_qmc, target_opt,
                        invert_target, invert_measure, tau_opt, invert_tau,
                        rhos_opt, invert_rhos, invert_tol, invert_amax,
                        invert_out);
    if (estimate->parsed())
      return cmd_estimate(est_spec, estimate, est_qmc, est_data, est_measure,
                          est_tol, est_out);
    if (selftest->parsed()) {
      if (st_level != "quick" && st_level != "full")
        throw std::invalid_argument("--level must be quick or full");
      if (st_inject)
        g_owen = [](double h, double a) { return -owen_t(h, a); };
      return run_selftest(st_level);
    }
  } catch (const out_of_attainable_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const tie_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const non_identified& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
