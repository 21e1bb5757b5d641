#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "elemodds/error.hpp"
#include "elemodds/fem1d.hpp"
#include "elemodds/fit.hpp"
#include "elemodds/freq.hpp"
#include "elemodds/io.hpp"
#include "elemodds/laws.hpp"
#include "elemodds/mc.hpp"

#ifndef ELEMODDS_VERSION
#define ELEMODDS_VERSION "0.0.0"
#endif

namespace elemodds::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kDefaultSeed = 1;

std::uint64_t default_seed() {
  const char* env = std::getenv("ELEMODDS_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  const auto parsed = parse_integer(env);
  if (!parsed || *parsed < 0) throw UsageError("ELEMODDS_SEED must be a nonnegative integer");
  return static_cast<std::uint64_t>(*parsed);
}

std::optional<std::string> manifest_timestamp() {
  const char* epoch = std::getenv("SOURCE_DATE_EPOCH");
  if (epoch == nullptr || *epoch == '\0') return std::nullopt;
  return std::string(epoch);
}

RunManifest manifest(std::string command, std::string invocation, std::optional<std::uint64_t> seed) {
  return {std::move(command), std::move(invocation), seed, ELEMODDS_VERSION, manifest_timestamp()};
}

// Canonical command line assembled from resolved values.
class Invocation {
 public:
  explicit Invocation(std::string command) : text_("elemodds " + std::move(command)) {}

  Invocation& flag(std::string_view name, std::string_view value) {
    text_ += " --";
    text_ += name;
    text_ += ' ';
    text_ += value;
    return *this;
  }
  Invocation& flag(std::string_view name, double value) { return flag(name, format_number(value)); }
  Invocation& flag(std::string_view name, std::int64_t value) { return flag(name, format_number(value)); }
  Invocation& flag(std::string_view name, int value) { return flag(name, std::int64_t{value}); }
  Invocation& flag(std::string_view name, std::uint64_t value) { return flag(name, std::to_string(value)); }
  Invocation& boolean(std::string_view name, bool on) {
    if (on) {
      text_ += " --";
      text_ += name;
    }
    return *this;
  }
  Invocation& positional(std::string_view value) {
    text_ += ' ';
    text_ += value;
    return *this;
  }

  [[nodiscard]] const std::string& str() const { return text_; }

 private:
  std::string text_;
};

// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot open output file " + path);
  file << content;
  if (!file) throw UsageError("failed writing " + path);
}

std::vector<double> curve_grid(const std::vector<double>& explicit_h, std::optional<double> h_min,
                               std::optional<double> h_max, int points, double h_star) {
  if (!explicit_h.empty()) return explicit_h;
  const double lo = h_min.value_or(h_star / 100);
  const double hi = h_max.value_or(h_star * 100);
  if (!(lo > 0) || !(hi >= lo)) throw UsageError("need 0 < --hmin <= --hmax");
  if (points < 1) throw UsageError("--points must be positive");
  return log_spaced(lo, hi, points);
}

void write_curve(std::ostream& out, const LawParams<double>& law, const std::vector<double>& hs) {
  out << "h,probability\n";
  for (const double h : hs) {
    const auto p = evaluate(law, h);
    out << format_number(h) << ',' << (p ? format_number(*p) : std::string("undefined")) << '\n';
  }
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string law;
  double p = 1;
  double q = 1;
  int delta = 1;
  double h_star = 0;
  std::vector<double> h;
  std::optional<double> h_min;
  std::optional<double> h_max;
  int points = 200;
  std::string out;
};

LawParams<double> law_from(const std::string& name, double p, double q, int delta, double h_star) {
  LawParams<double> law;
  if (name == "twostep")
    law = TwoStep<double>{h_star};
  else if (name == "sigmoid")
    law = Sigmoid<double>{h_star, delta};
  else
    law = GeneralizedBetaPrime<double>{p, q, delta, h_star};
  try {
    validate(law);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return law;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const auto law = law_from(a.law, a.p, a.q, a.delta, a.h_star);
  for (const double h : a.h)
    if (!(h > 0)) throw UsageError("--h values must be positive");
  const auto hs = curve_grid(a.h, a.h_min, a.h_max, a.points, a.h_star);

  Invocation inv("eval");
  inv.flag("law", a.law);
  if (a.law == "gbp") inv.flag("p", a.p).flag("q", a.q);
  if (a.law != "twostep") inv.flag("delta", a.delta);
  inv.flag("hstar", a.h_star);
  if (!a.h.empty()) {
    for (const double h : a.h) inv.flag("h", h);
  } else {
    inv.flag("hmin", hs.front()).flag("hmax", hs.back()).flag("points", a.points);
  }

  std::ostringstream buf;
  manifest("eval", inv.str(), std::nullopt).write(buf);
  write_curve(buf, law, hs);
  emit(a.out, buf.str(), out);
  return kOk;
}

// ---------------------------------------------------------------- mc

struct McArgs {
  std::string model = "gbp";
  std::optional<double> beta_lo;
  std::optional<double> beta_hi;
  std::optional<double> h_star;
  std::optional<double> h;
  int delta = 1;
  double p = 1;
  double q = 1;
  std::int64_t trials = 1000000;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out;
};

int cmd_mc(const McArgs& a, std::ostream& out) {
  if (a.trials < 1) throw UsageError("--trials must be at least 1");
  if (a.threads < 1) throw UsageError("--threads must be at least 1");
  const std::uint64_t seed = a.seed.value_or(default_seed());

  Invocation inv("mc");
  inv.flag("model", a.model);
  BetaPair<double> pair{};
  if (a.beta_lo || a.beta_hi) {
    if (!a.beta_lo || !a.beta_hi) throw UsageError("--beta-lo and --beta-hi go together");
    if (a.h_star || a.h) throw UsageError("give either --beta-lo/--beta-hi or --hstar/--h, not both");
    pair = {*a.beta_lo, *a.beta_hi};
    inv.flag("beta-lo", *a.beta_lo).flag("beta-hi", *a.beta_hi);
  } else {
    if (!a.h_star || !a.h) throw UsageError("need --beta-lo/--beta-hi or --hstar/--delta/--h");
    if (a.delta < 1 || !(*a.h_star > 0) || !(*a.h > 0)) throw UsageError("need --delta >= 1, --hstar > 0, --h > 0");
    pair = beta_pair(BoundModel<double>::with_h_star(1, 1 + a.delta, *a.h_star), *a.h);
    inv.flag("hstar", *a.h_star).flag("delta", a.delta).flag("h", *a.h);
  }
  try {
    validate(pair);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }

  McEstimate estimate;
  if (a.model == "gbp") {
    if (!(a.p > 0) || !(a.q > 0)) throw UsageError("--p and --q must be positive");
    inv.flag("p", a.p).flag("q", a.q);
    estimate = mc_prob_event(pair, a.p, a.q, a.trials, RngSeed{seed}, a.threads);
  } else {
    estimate = mc_prob_independent_uniform(pair, a.trials, RngSeed{seed}, a.threads);
  }
  inv.flag("trials", a.trials).flag("seed", seed);

  std::ostringstream buf;
  manifest("mc", inv.str(), seed).write(buf);
  buf << "trials,successes,estimate,std_error\n";
  buf << estimate.trials << ',' << estimate.successes << ',' << format_number(estimate.estimate) << ','
      << format_number(estimate.std_error) << '\n';
  emit(a.out, buf.str(), out);
  return kOk;
}

// ---------------------------------------------------------------- experiment

struct ExperimentArgs {
  int k1 = 1;
  int k2 = 2;
  double alpha = 500;
  double center = 0.5;
  double h_min = 1.0 / 128.0;
  double h_max = 0.5;
  int points = 16;
  std::int64_t trials = 100;
  double jitter = 0.3;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out;
};

int cmd_experiment(const ExperimentArgs& a, std::ostream& out) {
  if (a.k1 < 1 || a.k2 > 4 || a.k1 >= a.k2) throw UsageError("need 1 <= --k1 < --k2 <= 4");
  if (!(a.alpha > 0)) throw UsageError("--alpha must be positive");
  if (!(a.center > 0 && a.center < 1)) throw UsageError("--center must lie in (0, 1)");
  if (!(a.h_min > 0) || !(a.h_max >= a.h_min) || !(a.h_max < 1)) throw UsageError("need 0 < --hmin <= --hmax < 1");
  if (a.points < 1) throw UsageError("--points must be positive");
  if (a.trials < 1) throw UsageError("--trials must be at least 1");
  if (!(a.jitter >= 0 && a.jitter <= 0.49)) throw UsageError("--jitter must lie in [0, 0.49]");
  if (a.threads < 1) throw UsageError("--threads must be at least 1");
  const std::uint64_t seed = a.seed.value_or(default_seed());

  ExperimentConfig config;
  config.h_grid = log_spaced(a.h_min, a.h_max, a.points);
  config.trials_per_h = a.trials;
  config.jitter = a.jitter;
  config.seed = RngSeed{seed};
  config.threads = a.threads;
  const auto series =
      run_experiment(RungeProblem(a.alpha, a.k1, a.center), RungeProblem(a.alpha, a.k2, a.center), config);

  Invocation inv("experiment");
  inv.flag("k1", a.k1).flag("k2", a.k2).flag("alpha", a.alpha).flag("center", a.center);
  inv.flag("hmin", a.h_min).flag("hmax", a.h_max).flag("points", a.points);
  inv.flag("trials", a.trials).flag("jitter", a.jitter).flag("seed", seed);

  std::ostringstream buf;
  manifest("experiment", inv.str(), seed).write(buf);
  write_frequency_csv(buf, series);
  emit(a.out, buf.str(), out);
  return kOk;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string input;
  std::string law = "gbp";
  std::optional<int> delta;
  int max_iterations = 20000;
  double tolerance = 1e-10;
  int restarts = 8;
  bool weighted = false;
  std::string out;
  std::string curve;
  int curve_points = 200;
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
  std::ifstream file(a.input, std::ios::binary);
  if (!file) throw UsageError("cannot open " + a.input);
  ObservationTable table;
  try {
    table = read_observations(file);
  } catch (const ParseError& e) {
    throw UsageError(a.input + ": " + e.what());
  }
  if (table.rows.empty()) throw UsageError(a.input + ": no data rows");

  int delta = 0;
  if (a.delta) {
    delta = *a.delta;
  } else if (const auto k1 = table.meta.find("k1"), k2 = table.meta.find("k2");
             k1 != table.meta.end() && k2 != table.meta.end()) {
    delta = static_cast<int>(parse_integer(k2->second).value_or(0) - parse_integer(k1->second).value_or(0));
  } else if (const auto d = table.meta.find("delta"); d != table.meta.end()) {
    delta = static_cast<int>(parse_integer(d->second).value_or(0));
  }
  if (delta < 1) throw UsageError("--delta is required (>= 1) when the input does not record k1/k2");
  if (a.max_iterations < 1 || !(a.tolerance > 0) || a.restarts < 0)
    throw UsageError("need --max-iterations >= 1, --tolerance > 0, --restarts >= 0");
  if (a.law == "gbp" && table.rows.size() < 4)
    throw UsageError("--law gbp needs at least 4 rows (3 parameters + 1)");

  FitConfig config;
  config.max_iterations = a.max_iterations;
  config.simplex_tolerance = a.tolerance;
  config.restarts = a.restarts;
  config.delta = delta;
  config.wilson_weighting = a.weighted;
  const FitResult result = a.law == "gbp" ? fit_gbp(table.rows, config) : fit_sigmoid(table.rows, config);

  Invocation inv("fit");
  inv.positional(a.input).flag("law", a.law).flag("delta", delta).flag("max-iterations", a.max_iterations);
  inv.flag("tolerance", a.tolerance).flag("restarts", a.restarts).boolean("weighted", a.weighted);
  if (!a.out.empty()) inv.flag("out", a.out);
  if (!a.curve.empty()) inv.flag("curve", a.curve).flag("curve-points", a.curve_points);
  const auto run_manifest = manifest("fit", inv.str(), std::nullopt);

  std::ostringstream buf;
  run_manifest.write(buf);
  write_comment(buf, "law", a.law);
  write_comment(buf, "degenerate", result.degenerate ? "true" : "false");
  write_fit_csv(buf, result);
  emit(a.out, buf.str(), out);

  if (!a.curve.empty()) {
    if (a.curve_points < 1) throw UsageError("--curve-points must be positive");
    double lo = table.rows.front().h;
    double hi = table.rows.back().h;
    std::ostringstream curve;
    run_manifest.write(curve);
    write_curve(curve, result.params, log_spaced(lo, hi, a.curve_points));
    emit(a.curve, curve.str(), out);
  }
  return kOk;
}

// ---------------------------------------------------------------- validate

int cmd_validate(const ValidateOptions& options, std::ostream& out) {
  const auto outcomes = run_validation(options);
  bool ok = true;
  for (const auto& c : outcomes) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
    ok = ok && c.passed;
  }
  out << (ok ? "all checks passed\n" : "validation FAILED\n");
  return ok ? kOk : kValidationFailed;
}

}  // namespace

std::vector<CheckOutcome> run_validation(const ValidateOptions& options) {
  std::vector<CheckOutcome> outcomes;
  const int configs = options.quick ? 6 : 20;
  const std::int64_t trials = options.quick ? 100000 : 1000000;
  const int quadrature_sets = options.quick ? 3 : 10;
  const RngSeed seed{options.seed};
  const double perturb = options.perturb_h_star;

  // Random law parameters from a dedicated substream per configuration.
  auto random_law = [&](std::uint64_t stream, std::uint64_t index) {
    Rng rng = Rng::substream(seed, stream, index);
    GeneralizedBetaPrime<double> law{};
    law.p = 0.5 + 4.5 * rng.uniform();
    law.q = 0.5 + 4.5 * rng.uniform();
    law.delta = 1 + static_cast<int>(rng() % 3);
    law.h_star = std::exp(std::log(0.01) + rng.uniform() * (std::log(0.5) - std::log(0.01)));
    const double h = law.h_star * std::exp(rng.uniform() * 1.4 - 0.7);
    return std::pair{law, h};
  };
  auto closed_form = [&](GeneralizedBetaPrime<double> law) {
    law.h_star *= perturb;
    return law;
  };

  {
    double worst = 0;
    for (int s = 0; s < quadrature_sets; ++s) {
      const auto law = random_law(1, static_cast<std::uint64_t>(s)).first;
      for (const double h : log_spaced(law.h_star / 100, law.h_star * 100, 50)) {
        worst = std::max(worst, std::abs(prob_gbp(closed_form(law), h) - gbp_tail_by_quadrature(law, h)));
        worst = std::max(worst, std::abs(prob_gbp(closed_form(law), h) + gbp_head_by_quadrature(law, h) - 1));
      }
    }
    outcomes.push_back({"closed form vs density quadrature", worst <= 1e-8, "max abs diff " + format_number(worst)});
  }
  {
    double worst = 0;
    for (int s = 0; s < configs; ++s) {
      const auto [law, h] = random_law(2, static_cast<std::uint64_t>(s));
      const auto model = BoundModel<double>::with_h_star(1, 1 + law.delta, law.h_star);
      worst = std::max(worst, std::abs(prob_gbp(closed_form(law), h) - cdf_Z_at_zero(beta_pair(model, h), law.p, law.q)));
    }
    outcomes.push_back({"closed form vs F_Z(0) from bound model", worst <= 1e-12, "max abs diff " + format_number(worst)});
  }
  {
    int passed = 0;
    for (int s = 0; s < configs; ++s) {
      const auto [law, h] = random_law(3, static_cast<std::uint64_t>(s));
      const auto pair = beta_pair(BoundModel<double>::with_h_star(1, 1 + law.delta, law.h_star), h);
      const auto mc = mc_prob_event(pair, law.p, law.q, trials, RngSeed{mix64(options.seed ^ (1000 + s))}, options.threads);
      if (std::abs(mc.estimate - prob_gbp(closed_form(law), h)) <= 3 * mc.std_error) ++passed;
    }
    const int needed = configs - std::max(1, configs / 20);
    outcomes.push_back({"generalized Beta prime law vs Monte Carlo", passed >= needed,
                        std::to_string(passed) + "/" + std::to_string(configs) + " within 3 sigma"});
  }
  {
    int passed = 0;
    for (int s = 0; s < configs; ++s) {
      const auto [law, h] = random_law(4, static_cast<std::uint64_t>(s));
      const auto pair = beta_pair(BoundModel<double>::with_h_star(1, 1 + law.delta, law.h_star), h);
      const auto mc = mc_prob_independent_uniform(pair, trials, RngSeed{mix64(options.seed ^ (2000 + s))}, options.threads);
      const double expected = prob_sigmoid(Sigmoid<double>{law.h_star * perturb, law.delta}, h);
      if (std::abs(mc.estimate - expected) <= 3 * mc.std_error) ++passed;
    }
    const int needed = configs - std::max(1, configs / 20);
    outcomes.push_back({"sigmoid law vs Monte Carlo", passed >= needed,
                        std::to_string(passed) + "/" + std::to_string(configs) + " within 3 sigma"});
  }
  {
    double worst = 0;
    for (int s = 0; s < configs; ++s) {
      auto law = random_law(5, static_cast<std::uint64_t>(s)).first;
      law.q = law.p;
      worst = std::max(worst, std::abs(prob_gbp(closed_form(law), law.h_star) - 0.5));
      worst = std::max(worst, std::abs(prob_sigmoid(Sigmoid<double>{law.h_star * perturb, law.delta}, law.h_star) - 0.5));
    }
    outcomes.push_back({"midpoint identity at h*", worst <= 1e-12, "max abs diff " + format_number(worst)});
  }
  return outcomes;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Probability laws for the relative accuracy of two Lagrange finite elements"};
  app.name("elemodds");
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", ELEMODDS_VERSION);

  const std::vector<std::string> law_names{"twostep", "sigmoid", "gbp"};

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Tabulate a probability law over mesh sizes");
  eval_cmd->add_option("--law", eval.law, "twostep | sigmoid | gbp")->required()->check(CLI::IsMember(law_names));
  eval_cmd->add_option("--p", eval.p, "Beta shape p (gbp)");
  eval_cmd->add_option("--q", eval.q, "Beta shape q (gbp)");
  eval_cmd->add_option("--delta", eval.delta, "k2 - k1 (sigmoid, gbp)");
  eval_cmd->add_option("--hstar", eval.h_star, "critical mesh size h*")->required();
  eval_cmd->add_option("--h", eval.h, "explicit mesh sizes (repeatable)");
  eval_cmd->add_option("--hmin", eval.h_min, "grid start (default h*/100)");
  eval_cmd->add_option("--hmax", eval.h_max, "grid end (default 100 h*)");
  eval_cmd->add_option("--points", eval.points, "log-spaced grid points")->capture_default_str();
  eval_cmd->add_option("--out", eval.out, "output file (default stdout)");

  McArgs mc;
  auto* mc_cmd = app.add_subcommand("mc", "Monte-Carlo estimate of Prob{X(k2) <= X(k1)}");
  mc_cmd->add_option("--model", mc.model, "gbp (Beta-distributed errors) | uniform (independent uniforms)")
      ->check(CLI::IsMember({"gbp", "uniform"}))
      ->capture_default_str();
  mc_cmd->add_option("--beta-lo", mc.beta_lo, "error bound of the lower degree");
  mc_cmd->add_option("--beta-hi", mc.beta_hi, "error bound of the higher degree");
  mc_cmd->add_option("--hstar", mc.h_star, "critical mesh size (with --h, --delta)");
  mc_cmd->add_option("--h", mc.h, "mesh size");
  mc_cmd->add_option("--delta", mc.delta, "k2 - k1")->capture_default_str();
  mc_cmd->add_option("--p", mc.p, "Beta shape p")->capture_default_str();
  mc_cmd->add_option("--q", mc.q, "Beta shape q")->capture_default_str();
  mc_cmd->add_option("--trials", mc.trials, "number of trials")->capture_default_str();
  mc_cmd->add_option("--seed", mc.seed, "RNG seed (default $ELEMODDS_SEED or 1)");
  mc_cmd->add_option("--threads", mc.threads, "worker threads")->capture_default_str();
  mc_cmd->add_option("--out", mc.out, "output file (default stdout)");

  ExperimentArgs ex;
  auto* ex_cmd = app.add_subcommand("experiment", "Random-mesh frequency experiment with a Runge solution");
  ex_cmd->add_option("--k1", ex.k1, "lower element degree")->capture_default_str();
  ex_cmd->add_option("--k2", ex.k2, "higher element degree")->capture_default_str();
  ex_cmd->add_option("--alpha", ex.alpha, "Runge parameter")->capture_default_str();
  ex_cmd->add_option("--center", ex.center, "Runge peak location")->capture_default_str();
  ex_cmd->add_option("--hmin", ex.h_min, "smallest mesh size")->capture_default_str();
  ex_cmd->add_option("--hmax", ex.h_max, "largest mesh size")->capture_default_str();
  ex_cmd->add_option("--points", ex.points, "log-spaced mesh sizes")->capture_default_str();
  ex_cmd->add_option("--trials", ex.trials, "mesh pairs per mesh size")->capture_default_str();
  ex_cmd->add_option("--jitter", ex.jitter, "node jitter in [0, 0.49]")->capture_default_str();
  ex_cmd->add_option("--seed", ex.seed, "RNG seed (default $ELEMODDS_SEED or 1)");
  ex_cmd->add_option("--threads", ex.threads, "worker threads")->capture_default_str();
  ex_cmd->add_option("--out", ex.out, "output file (default stdout)");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Least-squares fit of a law to a frequency table");
  fit_cmd->add_option("input", fit.input, "frequency CSV or h,probability curve")->required();
  fit_cmd->add_option("--law", fit.law, "sigmoid | gbp")->check(CLI::IsMember({"sigmoid", "gbp"}))->capture_default_str();
  fit_cmd->add_option("--delta", fit.delta, "k2 - k1 (default: from the input's k1/k2 comments)");
  fit_cmd->add_option("--max-iterations", fit.max_iterations, "per optimizer run")->capture_default_str();
  fit_cmd->add_option("--tolerance", fit.tolerance, "objective spread tolerance")->capture_default_str();
  fit_cmd->add_option("--restarts", fit.restarts, "multi-start count (gbp)")->capture_default_str();
  fit_cmd->add_flag("--weighted", fit.weighted, "weight rows by inverse squared Wilson half-width");
  fit_cmd->add_option("--out", fit.out, "fit result file (default stdout)");
  fit_cmd->add_option("--curve", fit.curve, "also write the fitted curve here");
  fit_cmd->add_option("--curve-points", fit.curve_points, "fitted curve points")->capture_default_str();

  ValidateOptions val;
  std::optional<std::uint64_t> val_seed;
  auto* val_cmd = app.add_subcommand("validate", "Cross-check closed forms against quadrature and Monte Carlo");
  val_cmd->add_flag("--quick", val.quick, "reduced trial counts");
  val_cmd->add_option("--seed", val_seed, "RNG seed (default $ELEMODDS_SEED or 1)");
  val_cmd->add_option("--threads", val.threads, "worker threads")->capture_default_str();
  val_cmd->add_option("--perturb-hstar", val.perturb_h_star, "fault injection: scale h* on the closed-form side");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (eval_cmd->parsed()) return cmd_eval(eval, out);
    if (mc_cmd->parsed()) return cmd_mc(mc, out);
    if (ex_cmd->parsed()) return cmd_experiment(ex, out);
    if (fit_cmd->parsed()) return cmd_fit(fit, out);
    if (val_cmd->parsed()) {
      val.seed = val_seed.value_or(default_seed());
      if (val.threads < 1) throw UsageError("--threads must be at least 1");
      if (!(val.perturb_h_star > 0)) throw UsageError("--perturb-hstar must be positive");
      return cmd_validate(val, out);
    }
  } catch (const UsageError& e) {
    err << "elemodds: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "elemodds: " << e.what() << '\n';
    return kUsage;
  } catch (const InsufficientDataError& e) {
    err << "elemodds: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "elemodds: internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}

}  // namespace elemodds::cli
