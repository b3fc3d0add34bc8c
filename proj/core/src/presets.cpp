#include <algorithm>
#include <cmath>
#include <filesystem>

#include "birchmax/expsum.hpp"
#include "birchmax/forms.hpp"
#include "birchmax/lattice.hpp"
#include "birchmax/maxop.hpp"
#include "birchmax/multiplier.hpp"
#include "birchmax/oscillatory.hpp"
#include "birchmax/padic.hpp"
#include "birchmax/report.hpp"
#include "birchmax/rng.hpp"

namespace birchmax::report {

namespace {

using report::CellType;

Form parse_config_form(const ExperimentConfig& cfg, const std::string& key) {
  try {
    return Form::parse(cfg.str(key));
  } catch (const Error& e) {
    throw ConfigInvalid("config key '" + key + "': " + e.what());
  }
}

multiplier::ApproxConfig multiplier_config(const ExperimentConfig& cfg, const Form& form) {
  multiplier::ApproxConfig mc;
  mc.series_q_max = static_cast<int>(cfg.i64("series_q_max"));
  mc.l_max = static_cast<int>(cfg.i64("l_max"));
  mc.dsig_tol = cfg.real("dsig_tol");
  mc.shell.tol = mc.dsig_tol;
  mc.shell.cell_budget = cfg.u64("budget_quad_cells");
  // reference-path step for low-arity forms; diagonal forms take the
  // factorized route where the step is not used
  mc.shell.h = form.n_vars() <= 2 ? 0.02 : 0.05;
  mc.shell.eps = 0.05;
  return mc;
}

Report preset_count(const ExperimentConfig& cfg) {
  Report rep;
  Form form = parse_config_form(cfg, "form");
  lattice::EnumBudget budget{cfg.u64("budget_point_visits")};
  std::vector<long long> radii = cfg.i64_list("radii");

  rep.table.columns = {{"radius", CellType::Integer}, {"count", CellType::Integer}};
  lattice::GrowthFit fit = lattice::growth_fit(form, radii, lattice::EnumStrategy::Auto, budget);
  for (std::size_t i = 0; i < radii.size(); ++i)
    rep.table.add_row({format_int(fit.radii[i]), format_int(fit.counts[i])});
  rep.add_summary_real("slope", fit.slope);
  rep.add_summary_real("residual", fit.residual);

  double slope_min = cfg.real("count_slope_min");
  double slope_max = cfg.real("count_slope_max");
  if (fit.slope < slope_min || fit.slope > slope_max)
    rep.fail("growth slope " + format_real(fit.slope) + " outside [" + format_real(slope_min) +
             ", " + format_real(slope_max) + "]");

  // dyadic count ratios from the shell profile
  long long kmax = cfg.i64("count_ratio_kmax");
  std::vector<long long> profile = lattice::radius_profile(form, 1LL << (kmax + 1), budget);
  double worst_ratio = 0;
  for (long long k = 0; k <= kmax; ++k) {
    double ratio = static_cast<double>(profile[static_cast<std::size_t>(1LL << (k + 1))]) /
                   static_cast<double>(profile[static_cast<std::size_t>(1LL << k)]);
    worst_ratio = std::max(worst_ratio, ratio);
  }
  rep.add_summary_real("max_dyadic_ratio", worst_ratio);
  double ratio_max = cfg.real("count_ratio_max");
  if (worst_ratio > ratio_max)
    rep.fail("dyadic count ratio " + format_real(worst_ratio) + " above " +
             format_real(ratio_max));
  return rep;
}

Report preset_expsum_decay(const ExperimentConfig& cfg) {
  Report rep;
  Form form = parse_config_form(cfg, "form");
  expsum::SumBudget budget{cfg.u64("budget_sum_terms")};
  std::vector<long long> primes;
  for (long long p : primes_up_to(cfg.i64("primes_max")))
    if (p > 2) primes.push_back(p);

  expsum::PrimeDecayFit fit = expsum::prime_decay_fit(
      form, primes, static_cast<int>(cfg.i64("expsum_coord_samples")), cfg.u64("seed"), budget);

  rep.table.columns = {{"prime", CellType::Integer}, {"sup_abs", CellType::Real}};
  for (std::size_t i = 0; i < primes.size(); ++i)
    rep.table.add_row({format_int(primes[i]), format_real(fit.sup_values[i])});
  rep.add_summary_real("slope", fit.slope);

  double lo = cfg.real("expsum_slope_min"), hi = cfg.real("expsum_slope_max");
  if (fit.slope < lo || fit.slope > hi)
    rep.fail("sum decay slope " + format_real(fit.slope) + " outside [" + format_real(lo) + ", " +
             format_real(hi) + "]");

  if (cfg.i64("expsum_control") != 0) {
    Form control = Form::parse("x1^2");
    expsum::PrimeDecayFit cf = expsum::prime_decay_fit(control, primes, 0, cfg.u64("seed"), budget);
    rep.add_summary_real("control_slope", cf.slope);
    double clo = cfg.real("gauss_slope_min"), chi = cfg.real("gauss_slope_max");
    if (cf.slope < clo || cf.slope > chi)
      rep.fail("control decay slope " + format_real(cf.slope) + " outside [" + format_real(clo) +
               ", " + format_real(chi) + "]");
  }
  return rep;
}

Report preset_lemma2_sweep(const ExperimentConfig& cfg) {
  Report rep;
  Form small = parse_config_form(cfg, "form2");
  Form big = parse_config_form(cfg, "form");
  expsum::SumBudget budget{cfg.u64("budget_sum_terms")};
  long long lcm_max = cfg.i64("lcm_max");
  double tol = cfg.real("lemma2_tol");

  expsum::VanishingSweep exhaustive = expsum::vanishing_sweep_exhaustive(small, lcm_max, budget);
  expsum::VanishingSweep sampled = expsum::vanishing_sweep_sampled(
      big, lcm_max, static_cast<int>(cfg.i64("lemma2_samples")), cfg.u64("seed"), budget);

  rep.table.columns = {{"family", CellType::Text},
                       {"cases", CellType::Integer},
                       {"max_abs", CellType::Real},
                       {"worst_q", CellType::Integer}};
  rep.table.add_row({"exhaustive", format_int(static_cast<long long>(exhaustive.cases)),
                     format_real(exhaustive.max_abs), format_int(exhaustive.worst_q)});
  rep.table.add_row({"sampled", format_int(static_cast<long long>(sampled.cases)),
                     format_real(sampled.max_abs), format_int(sampled.worst_q)});
  rep.add_summary_real("max_abs", std::max(exhaustive.max_abs, sampled.max_abs));

  if (exhaustive.max_abs >= tol)
    rep.fail("exhaustive vanishing case of size " + format_real(exhaustive.max_abs));
  if (sampled.max_abs >= tol)
    rep.fail("sampled vanishing case of size " + format_real(sampled.max_abs));
  return rep;
}

Report preset_lemma4_check(const ExperimentConfig& cfg) {
  Report rep;
  std::vector<std::pair<std::string, Form>> forms = {
      {"form2", parse_config_form(cfg, "form2")},
      {"form", parse_config_form(cfg, "form")},
  };
  expsum::SumBudget budget{cfg.u64("budget_sum_terms")};
  long long q_max = cfg.i64("lemma4_q_max");
  int trials = static_cast<int>(cfg.i64("lemma4_trials"));
  double tol = cfg.real("lemma4_tol");

  rep.table.columns = {{"form", CellType::Text},
                       {"q", CellType::Integer},
                       {"trials", CellType::Integer},
                       {"discrepancy", CellType::Real}};
  double worst = 0;
  for (const auto& [label, form] : forms) {
    for (long long q = 1; q <= q_max; ++q) {
      double d = expsum::verify_divisor_identity(form, q, trials, cfg.u64("seed"), budget);
      worst = std::max(worst, d);
      rep.table.add_row({label, format_int(q), format_int(trials), format_real(d)});
      if (d >= tol)
        rep.fail("regrouping identity discrepancy " + format_real(d) + " at q=" + format_int(q) +
                 " (" + label + ")");
    }
  }
  rep.add_summary_real("max_discrepancy", worst);
  return rep;
}

Report preset_lemma14_sweep(const ExperimentConfig& cfg) {
  Report rep;
  Form form = parse_config_form(cfg, "form");
  padic::CountBudget budget{cfg.u64("budget_point_visits")};
  long long q_max = cfg.i64("q_max");

  padic::CountSweep sweep = padic::normalized_count_sweep(form, q_max, budget);
  rep.table.columns = {{"q", CellType::Integer},
                       {"count", CellType::Integer},
                       {"normalized", CellType::Real},
                       {"method", CellType::Text}};
  for (const auto& row : sweep.rows)
    rep.table.add_row({format_int(row.q), row.count.str(), format_real(row.normalized), "crt"});
  rep.add_summary_real("max_normalized", sweep.max_ratio);
  rep.add_summary_int("argmax_q", sweep.argmax_q);

  double cap = cfg.real("lemma14_ratio_max");
  if (sweep.max_ratio > cap)
    rep.fail("normalized count " + format_real(sweep.max_ratio) + " above " + format_real(cap));

  // multiplicativity across coprime splits
  long long split_max = cfg.i64("mult_check_max");
  long long violations = 0;
  for (long long q1 = 2; q1 <= split_max; ++q1) {
    for (long long q2 = q1; q1 * q2 <= split_max; ++q2) {
      if (expsum::gcd_ll(q1, q2) != 1) continue;
      BigInt lhs = padic::count_solutions_direct(form, q1 * q2, budget).count;
      BigInt rhs = padic::count_solutions_direct(form, q1, budget).count *
                   padic::count_solutions_direct(form, q2, budget).count;
      if (lhs != rhs) ++violations;
    }
  }
  rep.add_summary_int("multiplicativity_violations", violations);
  if (violations > 0) rep.fail("multiplicativity violated on coprime splits");
  return rep;
}

Report preset_multiplier_error(const ExperimentConfig& cfg) {
  Report rep;
  Form form = parse_config_form(cfg, "form");
  lattice::EnumBudget budget{cfg.u64("budget_point_visits")};
  std::vector<long long> radii = cfg.i64_list("mult_radii");

  std::vector<lattice::PointCloud> clouds;
  clouds.reserve(radii.size());
  for (long long r : radii)
    clouds.push_back(lattice::enumerate_points(form, r, lattice::EnumStrategy::Auto, budget));
  std::vector<const lattice::PointCloud*> cloud_ptrs;
  for (const auto& c : clouds) cloud_ptrs.push_back(&c);

  multiplier::Engine engine(form, multiplier_config(cfg, form));
  multiplier::MultiplierReport mr = engine.approximation_error_sweep(
      cloud_ptrs, cfg.u64("seed"), static_cast<int>(cfg.i64("grid_points")));

  rep.table.columns = {{"radius", CellType::Integer},
                       {"sup_error", CellType::Real},
                       {"argmax_xi", CellType::Text}};
  for (const auto& row : mr.per_radius) {
    std::string xi;
    for (std::size_t i = 0; i < row.argmax_xi.size(); ++i) {
      if (i) xi += " ";
      xi += format_real(row.argmax_xi[i]);
    }
    rep.table.add_row({format_int(row.N), format_real(row.sup_error), xi});
  }
  rep.add_summary_real("zero_error", mr.zero_error);
  rep.add_summary_real("delta_hat", mr.delta_hat);
  rep.add_summary_int("strictly_decreasing", mr.strictly_decreasing ? 1 : 0);
  rep.add_summary_int("kappa_defined", 1);
  rep.add_summary_real("kappa", engine.kappa());

  if (!mr.strictly_decreasing) rep.fail("sup errors are not strictly decreasing");
  if (!mr.per_radius.empty()) {
    double first = mr.per_radius.front().sup_error;
    double last = mr.per_radius.back().sup_error;
    double ratio = cfg.real("mult_final_ratio");
    if (!(last < ratio * first))
      rep.fail("final sup error " + format_real(last) + " not below " + format_real(ratio) +
               " of the first " + format_real(first));
  }
  if (mr.zero_error >= cfg.real("mult_zero_tol"))
    rep.fail("zero-frequency normalization error " + format_real(mr.zero_error));
  return rep;
}

Report preset_decomposition(const ExperimentConfig& cfg) {
  Report rep;
  std::vector<std::pair<std::string, Form>> forms = {
      {"form", parse_config_form(cfg, "form")},
      {"form2", parse_config_form(cfg, "form2")},
  };
  long long N = cfg.i64("decomp_radius");
  int samples = static_cast<int>(cfg.i64("decomp_samples"));
  double tol = cfg.real("decomp_tol");

  rep.table.columns = {{"form", CellType::Text},
                       {"block_index", CellType::Integer},
                       {"radius", CellType::Integer},
                       {"samples", CellType::Integer},
                       {"discrepancy", CellType::Real}};
  double worst = 0;
  for (const auto& [label, form] : forms) {
    multiplier::Engine engine(form, multiplier_config(cfg, form));
    for (long long j : cfg.i64_list("decomp_j_list")) {
      TorusSequence seq(form.n_vars(), mix_key(cfg.u64("seed"), static_cast<std::uint64_t>(j)));
      std::vector<multiplier::TorusPoint> pts;
      for (int k = 0; k < samples; ++k)
        pts.push_back(multiplier::TorusPoint::reduce(seq.point(static_cast<std::uint64_t>(k))));
      double d = engine.verify_decomposition(N, static_cast<int>(j), pts);
      worst = std::max(worst, d);
      rep.table.add_row({label, format_int(j), format_int(N), format_int(samples),
                         format_real(d)});
      if (d >= tol)
        rep.fail("decomposition discrepancy " + format_real(d) + " at j=" + format_int(j) + " (" +
                 label + ")");
    }
  }
  rep.add_summary_real("max_discrepancy", worst);
  return rep;
}

Report preset_oscillatory_decay(const ExperimentConfig& cfg) {
  Report rep;
  Form form = parse_config_form(cfg, "form");
  oscillatory::ShellSpec spec;
  spec.scale = 1;
  spec.h = cfg.real("osc_h");
  spec.tol = cfg.real("osc_tol");
  spec.cell_budget = cfg.u64("budget_quad_cells");

  std::vector<double> direction = {1.0, 0.7071, 1.0 / 3.0, 2.0 / 7.0, 0.2};
  direction.resize(static_cast<std::size_t>(form.n_vars()), 0.1);

  std::vector<double> magnitudes;
  for (long long m : cfg.i64_list("osc_magnitudes")) magnitudes.push_back(static_cast<double>(m));

  oscillatory::RayDecayFit fit = oscillatory::ray_decay_fit(form, direction, magnitudes, spec);
  rep.table.columns = {{"magnitude", CellType::Real},
                       {"abs_value", CellType::Real},
                       {"error_estimate", CellType::Real}};
  for (std::size_t i = 0; i < magnitudes.size(); ++i)
    rep.table.add_row({format_real(fit.magnitudes[i]), format_real(fit.values[i]),
                       format_real(fit.errors[i])});
  rep.add_summary_real("slope", fit.slope);
  double cap = cfg.real("osc_slope_max");
  if (!(fit.slope <= cap))
    rep.fail("ray decay slope " + format_real(fit.slope) + " above " + format_real(cap));
  return rep;
}

Report preset_ionescu(const ExperimentConfig& cfg) {
  Report rep;
  Form form = parse_config_form(cfg, "form");
  lattice::EnumBudget budget{cfg.u64("budget_point_visits")};
  int k_max = static_cast<int>(cfg.i64("ionescu_k_max"));

  lattice::PointCloud cloud =
      lattice::enumerate_points(form, 1LL << k_max, lattice::EnumStrategy::Auto, budget);
  std::vector<long long> counts = lattice::radius_profile(form, 1LL << k_max, budget);
  std::vector<maxop::PartialSumRow> rows = maxop::point_mass_partial_sums(cloud, counts, k_max);

  rep.table.columns = {{"k", CellType::Integer},
                       {"l1_partial", CellType::Real},
                       {"l15_partial", CellType::Real},
                       {"l1_increment", CellType::Real},
                       {"l15_increment", CellType::Real}};
  for (const auto& row : rows)
    rep.table.add_row({format_int(row.k), format_real(row.l1), format_real(row.l15),
                       format_real(row.l1_increment), format_real(row.l15_increment)});

  if (!rows.empty()) {
    double mean_inc = 0;
    for (const auto& row : rows) mean_inc += row.l1_increment;
    mean_inc /= static_cast<double>(rows.size());
    double last_inc = rows.back().l1_increment;
    double l1_floor = cfg.real("ionescu_l1_floor");
    rep.add_summary_real("l1_last_over_mean", last_inc / mean_inc);
    if (!(last_inc >= l1_floor * mean_inc))
      rep.fail("l1 increments plateau: last/mean = " + format_real(last_inc / mean_inc));

    double l15_total = rows.back().l15;
    double l15_last = rows.back().l15_increment;
    double cap = cfg.real("ionescu_l15_cap");
    rep.add_summary_real("l15_last_over_total", l15_last / l15_total);
    if (!(l15_last <= cap * l15_total))
      rep.fail("l15 increments do not plateau: last/total = " + format_real(l15_last / l15_total));
  }
  return rep;
}

Report preset_partial_max(const ExperimentConfig& cfg) {
  Report rep;
  Form form = parse_config_form(cfg, "form");
  lattice::EnumBudget budget{cfg.u64("budget_point_visits")};

  std::vector<maxop::WindowMaxRow> rows = maxop::window_max_lower_bounds(
      form, cfg.real("partial_p"), cfg.i64_list("partial_n0_list"),
      static_cast<int>(cfg.i64("partial_trials")), cfg.u64("seed"), budget);

  rep.table.columns = {{"n0", CellType::Integer},
                       {"lower_bound", CellType::Real},
                       {"best_trial", CellType::Text}};
  for (const auto& row : rows)
    rep.table.add_row({format_int(row.n0), format_real(row.lower_bound), row.best_trial});
  // lower bounds only; no pass criterion beyond successful evaluation
  return rep;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "count",        "expsum-decay", "lemma2-sweep",     "lemma4-check",
      "lemma14-sweep", "multiplier-error", "decomposition", "oscillatory-decay",
      "ionescu",      "partial-max"};
  return names;
}

PresetOutcome run_preset(const std::string& name, const ExperimentConfig& config,
                         const std::string& out_dir) {
  Report rep;
  if (name == "count")
    rep = preset_count(config);
  else if (name == "expsum-decay")
    rep = preset_expsum_decay(config);
  else if (name == "lemma2-sweep")
    rep = preset_lemma2_sweep(config);
  else if (name == "lemma4-check")
    rep = preset_lemma4_check(config);
  else if (name == "lemma14-sweep")
    rep = preset_lemma14_sweep(config);
  else if (name == "multiplier-error")
    rep = preset_multiplier_error(config);
  else if (name == "decomposition")
    rep = preset_decomposition(config);
  else if (name == "oscillatory-decay")
    rep = preset_oscillatory_decay(config);
  else if (name == "ionescu")
    rep = preset_ionescu(config);
  else if (name == "partial-max")
    rep = preset_partial_max(config);
  else
    throw UnknownPreset("no preset named '" + name + "'");

  rep.preset = name;
  rep.config_echo = config.entries();

  std::filesystem::create_directories(out_dir);
  PresetOutcome outcome;
  outcome.csv_path = out_dir + "/" + name + ".csv";
  outcome.json_path = out_dir + "/" + name + ".json";
  write_csv(rep, outcome.csv_path);
  write_json(rep, outcome.json_path);
  outcome.report = std::move(rep);
  return outcome;
}

}  // namespace birchmax::report
