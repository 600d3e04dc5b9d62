#include "beamstab_cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>

#include "beamstab/dynamics.hpp"
#include "beamstab/errors.hpp"
#include "beamstab/resolvent.hpp"
#include "beamstab_cli/output.hpp"

namespace beamstab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<double> spaced(double lo, double hi, int n, bool log) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    double f = n == 1 ? 0.0 : double(i) / (n - 1);
    v[i] = log ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
  }
  return v;
}

json number_json(const std::optional<StabilityNumber>& n) { return n ? json(n->value) : json(nullptr); }
json number_json(const std::optional<double>& n) { return n ? json(*n) : json(nullptr); }

// Fails with a spec error before any output when a Bresse mode up to n_top has a singular weight.
void precheck_modes(const SystemSpec& spec, int n_top) {
  if (!is_bresse(spec.model)) return;
  auto bad = mode_condition(spec.coeffs, std::max(1, n_top));
  if (!bad.empty())
    throw SpecError("l*ell = n*pi at mode " + std::to_string(bad.front()) + "; weight matrix singular");
}

int sweep_top_mode(const RunConfig& rc) {
  const auto& c = rc.spec.coeffs;
  double speed = std::sqrt(c.rho1 / c.k);
  int top = static_cast<int>(std::ceil(rc.sweep.lambda_max * speed * 4.0 * c.ell / M_PI));
  return std::max(top, rc.sweep.n_max);
}

struct Context {
  const RunConfig& rc;
  fs::path dir;
  std::ostream& log;

  fs::path file(const std::string& name) const { return dir / name; }
};

int cmd_stability(const Context& cx) {
  const auto& spec = cx.rc.spec;
  StabilityReport r = stability_numbers(spec);
  PhysicalCheck ph = check_physical(spec.coeffs, r);
  json j;
  j["command"] = "stability";
  j["model"] = to_string(spec.model);
  j["chi0"] = number_json(r.chi0);
  j["chi1"] = number_json(r.chi1);
  j["chi_g"] = number_json(r.chi_g);
  j["chi_h"] = number_json(r.chi_h);
  j["chi_sigma"] = number_json(r.chi_sigma);
  j["chi_tau"] = number_json(r.chi_tau);
  j["sigma_g"] = number_json(r.sigma_g);
  j["sigma_h"] = number_json(r.sigma_h);
  j["classification"] = to_string(r.classification);
  j["tolerance"] = r.tolerance;
  j["tolerance_note"] = "vanishing test |chi| <= tolerance * (sum of absolute term magnitudes)";
  j["phydef"] = {{"k0_equals_b_rho1_over_rho2", ph.phydef_k0}, {"b_greater_k_rho2_over_rho1", ph.phydef_b}};
  j["exp_condition_compatible"] = ph.exp_condition_compatible;
  write_json(cx.file("stability.json"), j, cx.rc.config_hash);
  cx.log << "model " << to_string(spec.model) << ": " << to_string(r.classification) << "\n";
  auto show = [&](const char* name, const std::optional<StabilityNumber>& n) {
    if (n) cx.log << "  " << name << " = " << fmt(n->value) << "\n";
  };
  show("chi0", r.chi0);
  show("chi1", r.chi1);
  show("chi_g", r.chi_g);
  show("chi_h", r.chi_h);
  show("chi_sigma", r.chi_sigma);
  show("chi_tau", r.chi_tau);
  return 0;
}

int cmd_sweep(const Context& cx) {
  const auto& rc = cx.rc;
  auto lambdas = spaced(rc.sweep.lambda_min, rc.sweep.lambda_max, rc.sweep.points, true);
  SweepOptions opt;
  opt.n_max = rc.sweep.n_max;
  opt.full_range = rc.sweep.full_range;
  auto samples = sweep(rc.spec, lambdas, opt, rc.memory);
  if (rc.output.csv) {
    CsvWriter csv(cx.file("sweep.csv"), rc.config_hash, {"lambda", "value", "argmax_n"});
    for (const auto& s : samples) csv.row({fmt(s.lambda), fmt(s.value), std::to_string(s.argmax)});
    csv.close();
  }
  json j;
  j["command"] = "sweep";
  j["model"] = to_string(rc.spec.model);
  j["points"] = samples.size();
  double lo = 1e300, hi = 0.0;
  for (const auto& s : samples) {
    lo = std::min(lo, s.value);
    hi = std::max(hi, s.value);
  }
  j["max_over_min"] = hi / lo;
  if (samples.size() >= 8) {
    GrowthFit fit = fit_growth(samples, rc.sweep.lambda_min, rc.sweep.lambda_max);
    j["fit"] = {{"exponent", fit.exponent}, {"intercept", fit.intercept}, {"residual", fit.residual}, {"count", fit.count}};
    cx.log << "growth exponent " << fmt(fit.exponent) << " (residual " << fmt(fit.residual) << ")\n";
  }
  j["note"] = "observed growth on a geometric grid with resonance-peak refinement; sup over the truncated mode set";
  write_json(cx.file("sweep_fit.json"), j, rc.config_hash);
  if (rc.output.svg) {
    SvgSeries s{"resolvent norm", {}, {}};
    for (const auto& p : samples) {
      s.x.push_back(p.lambda);
      s.y.push_back(p.value);
    }
    write_svg(cx.file("sweep.svg"), rc.config_hash, "resolvent norm along the imaginary axis", "lambda", "norm", {s},
              true, true);
  }
  return 0;
}

int cmd_lowerbound(const Context& cx) {
  const auto& rc = cx.rc;
  auto seq = lower_bound(rc.spec, rc.lowerbound.n_list);
  std::vector<DetCheck> dets;
  for (const auto& r : seq.records) dets.push_back(det_check(rc.spec, r.n));
  if (rc.output.csv) {
    CsvWriter csv(cx.file("lowerbound.csv"), rc.config_hash,
                  {"n", "omega", "lambda_n", "abs_A_n", "ratio", "cstar", "det_gap", "det_a_gap", "det_tolerance",
                   "cramer_gap", "re_det_scaled"});
    for (std::size_t i = 0; i < seq.records.size(); ++i) {
      const auto& r = seq.records[i];
      const auto& d = dets[i];
      csv.row({std::to_string(r.n), fmt(r.omega), fmt(r.lambda), fmt(r.amp_direct), fmt(r.ratio),
               fmt(seq.constants.cstar), fmt(d.gap), fmt(d.gap_a), fmt(d.tolerance), fmt(r.cramer_gap),
               fmt(d.real_scaled)});
    }
    csv.close();
  }
  const auto& k = seq.constants;
  json j;
  j["command"] = "lowerbound";
  j["model"] = to_string(rc.spec.model);
  j["c0"] = k.c0;
  j["beta0"] = k.beta0;
  j["cstar"] = k.cstar;
  j["chi_g"] = k.chi_g;
  j["sigma_g"] = k.sigma_g;
  if (is_bresse(rc.spec.model)) {
    j["chi_h"] = k.chi_h;
    j["sigma_h"] = k.sigma_h;
  }
  j["forcing_norm"] = seq.forcing_norm;
  j["notes"] = seq.notes;
  write_json(cx.file("lowerbound.json"), j, rc.config_hash);
  cx.log << "c0 = " << fmt(k.c0) << ", beta0 = " << fmt(k.beta0) << ", c* = " << fmt(k.cstar) << "\n";
  for (const auto& r : seq.records) cx.log << "  n = " << r.n << ": |A_n|/lambda_n = " << fmt(r.ratio) << "\n";
  if (rc.output.svg) {
    SvgSeries s{"|A_n|/lambda_n", {}, {}}, t{"c*", {}, {}};
    for (const auto& r : seq.records) {
      s.x.push_back(r.n);
      s.y.push_back(r.ratio);
      t.x.push_back(r.n);
      t.y.push_back(k.cstar);
    }
    write_svg(cx.file("lowerbound.svg"), rc.config_hash, "lower-bound sequence", "n", "ratio", {s, t}, true, false);
  }
  return 0;
}

int cmd_decay(const Context& cx) {
  const auto& rc = cx.rc;
  auto ts = spaced(rc.decay.t_min, rc.decay.t_max, rc.decay.points, rc.decay.log_spacing);
  auto series = semiuniform_norm(rc.spec, ts, rc.decay.n_max, rc.memory);
  DecayKind kind;
  if (rc.decay.kind == "auto")
    kind = stability_numbers(rc.spec).classification == Classification::ExponentiallyStable ? DecayKind::Exponential
                                                                                            : DecayKind::Algebraic;
  else
    kind = rc.decay.kind == "exponential" ? DecayKind::Exponential : DecayKind::Algebraic;
  if (rc.output.csv) {
    CsvWriter csv(cx.file("decay.csv"), rc.config_hash, {"t", "value", "argmax_n"});
    for (std::size_t i = 0; i < series.t.size(); ++i)
      csv.row({fmt(series.t[i]), fmt(series.value[i]), std::to_string(series.argmax[i])});
    csv.close();
  }
  json j;
  j["command"] = "decay";
  j["model"] = to_string(rc.spec.model);
  j["n_max"] = series.n_max;
  j["note"] = "semiuniform norm on the N_max truncation";
  if (series.t.size() >= 8) {
    DecayFit fit = decay_fit(series.t, series.value, kind);
    j["fit"] = {{"kind", to_string(fit.kind)}, {"rate", fit.rate},     {"constant", fit.constant},
                {"residual", fit.residual},    {"t_min", fit.t_min},   {"t_max", fit.t_max},
                {"poor", fit.poor}};
    cx.log << to_string(fit.kind) << " fit: rate " << fmt(fit.rate) << " (residual " << fmt(fit.residual) << ")\n";
  }
  if (kind == DecayKind::Exponential) {
    auto ab = spectral_abscissa(rc.spec, rc.decay.n_max, rc.memory);
    j["spectral_abscissa"] = ab.global;
  }
  write_json(cx.file("decay_fit.json"), j, rc.config_hash);
  if (rc.output.svg)
    write_svg(cx.file("decay.svg"), rc.config_hash, "semiuniform norm", "t", "norm", {{"sup_n", series.t, series.value}},
              rc.decay.log_spacing, true);
  return 0;
}

int cmd_spectrum(const Context& cx) {
  const auto& rc = cx.rc;
  auto ab = spectral_abscissa(rc.spec, rc.sweep.n_max, rc.memory);
  if (rc.output.csv) {
    CsvWriter csv(cx.file("spectrum.csv"), rc.config_hash, {"n", "abscissa"});
    for (std::size_t i = 0; i < ab.per_mode.size(); ++i) csv.row({std::to_string(i + 1), fmt(ab.per_mode[i])});
    csv.close();
  }
  json j;
  j["command"] = "spectrum";
  j["model"] = to_string(rc.spec.model);
  j["n_max"] = ab.per_mode.size();
  j["global"] = ab.global;
  j["argmax_n"] = ab.argmax;
  j["all_negative"] = ab.global < 0.0;
  write_json(cx.file("spectrum.json"), j, rc.config_hash);
  cx.log << "spectral abscissa " << fmt(ab.global) << " at mode " << ab.argmax << "\n";
  if (rc.output.svg) {
    SvgSeries s{"-max Re", {}, {}};
    for (std::size_t i = 0; i < ab.per_mode.size(); ++i) {
      s.x.push_back(double(i + 1));
      s.y.push_back(-ab.per_mode[i]);
    }
    write_svg(cx.file("spectrum.svg"), rc.config_hash, "per-mode spectral abscissa", "n", "-abscissa", {s}, true, true);
  }
  return 0;
}

int cmd_limit(const Context& cx) {
  const auto& rc = cx.rc;
  auto rows = singular_limit(rc.spec, rc.limit.eps_list, rc.limit.m);
  if (rc.output.csv) {
    CsvWriter csv(cx.file("limit.csv"), rc.config_hash,
                  {"eps", "chi_g", "target_g", "gap_g", "chi_h", "target_h", "gap_h"});
    for (const auto& r : rows)
      csv.row({fmt(r.eps), fmt(r.chi_g), fmt(r.target_g), fmt(r.gap_g), r.chi_h ? fmt(*r.chi_h) : "",
               r.target_h ? fmt(*r.target_h) : "", r.gap_h ? fmt(*r.gap_h) : ""});
    csv.close();
  }
  json j;
  j["command"] = "limit";
  j["model"] = to_string(rc.spec.model);
  j["path"] = rc.limit.m ? "cg_mix" : "rescaled";
  bool mono = true;
  for (std::size_t i = 1; i < rows.size(); ++i) mono = mono && rows[i].gap_g < rows[i - 1].gap_g;
  j["gaps_decreasing"] = mono;
  j["final_gap_g"] = rows.back().gap_g;
  write_json(cx.file("limit.json"), j, rc.config_hash);
  for (const auto& r : rows) cx.log << "eps " << fmt(r.eps) << ": chi_g " << fmt(r.chi_g) << " gap " << fmt(r.gap_g) << "\n";
  return 0;
}

int cmd_check(const Context& cx) {
  const auto& rc = cx.rc;
  const auto& spec = rc.spec;
  json checks = json::array();
  bool all = true;
  auto record = [&](const std::string& name, bool pass, const std::string& detail) {
    checks.push_back({{"name", name}, {"pass", pass}, {"detail", detail}});
    all = all && pass;
    cx.log << (pass ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
  };

  if (heat_law(spec.model) == HeatLaw::GurtinPipkin) {
    for (const auto* k : {&spec.kernel_g, &spec.kernel_h}) {
      if (!*k) continue;
      auto rep = check_admissibility(**k);
      std::string detail;
      for (const auto& e : rep.entries) detail += e.name + (e.passed ? "=ok " : "=fail ");
      record(k == &spec.kernel_g ? "admissibility kernel_g" : "admissibility kernel_h", rep.ok(), detail);
    }
  }

  if (is_bresse(spec.model)) {
    auto bad = mode_condition(spec.coeffs, rc.check.n_max);
    record("weight nonsingular", bad.empty(), bad.empty() ? "l*ell != n*pi for all checked modes"
                                                          : "singular at mode " + std::to_string(bad.front()));
    if (!bad.empty()) {
      json j{{"command", "check"}, {"model", to_string(spec.model)}, {"checks", checks}, {"all_pass", false}};
      write_json(cx.file("check.json"), j, rc.config_hash);
      return 3;
    }
  }

  ModalAssembler assembler(spec, rc.memory);
  std::mt19937_64 rng(rc.check.seed);
  std::normal_distribution<double> nd;
  double worst = -1e300, worst_gap = 0.0, worst_margin = -1e300;
  bool has_memory = false;
  for (int n = 1; n <= rc.check.n_max; ++n) {
    ModeSystem mode = assembler.assemble(n);
    worst_margin = std::max(worst_margin, dissipativity_margin(mode));
    for (int s = 0; s < rc.check.states; ++s) {
      CVec u(mode.dim());
      for (int i = 0; i < mode.dim(); ++i) u(i) = {nd(rng), nd(rng)};
      auto r = dissipation_rate(mode, u, spec.coeffs.varpi);
      worst = std::max(worst, r.rate / r.norm_sq);
      if (r.has_memory) {
        has_memory = true;
        worst_gap = std::max(worst_gap, r.identity_gap);
      }
    }
  }
  record("dissipativity", worst <= 1e-10 && worst_margin <= 1e-10,
         "max Re<Gu,u>/||u||^2 = " + fmt(worst) + ", max Hermitian-part eigenvalue = " + fmt(worst_margin));
  if (has_memory) {
    double tol = rc.memory.scheme == MemoryScheme::PronyReduction ? 1e-6 : 1e-3;
    record("gamma identity", worst_gap < tol, "max relative gap " + fmt(worst_gap) + " (tolerance " + fmt(tol) + ")");
  }

  if (heat_law(spec.model) == HeatLaw::GurtinPipkin && rc.memory.scheme == MemoryScheme::PronyReduction) {
    bool exponential = true;
    SystemSpec mc;
    try {
      mc = mc_counterpart(spec);
    } catch (const UnsupportedMapError&) {
      exponential = false;
    }
    if (exponential) {
      ModalAssembler mca(mc);
      std::vector<double> ts;
      for (int i = 0; i <= 20; ++i) ts.push_back(rc.check.lambda_t_max * i / 20.0);
      double gap = 0.0;
      for (int n = 1; n <= rc.check.lambda_modes; ++n) {
        ModeSystem gm = assembler.assemble(n), mm = mca.assemble(n);
        CVec u0(gm.dim());
        for (int i = 0; i < gm.dim(); ++i) u0(i) = {nd(rng), nd(rng)};
        auto tg = propagate(gm, u0, ts);
        auto tm = propagate(mm, lambda_map(spec, gm, mm, u0), ts);
        double scale = weighted_norm_sq(mm.weight, tm.states[0]);
        for (std::size_t i = 0; i < ts.size(); ++i) {
          CVec d = lambda_map(spec, gm, mm, tg.states[i]) - tm.states[i];
          gap = std::max(gap, std::sqrt(weighted_norm_sq(mm.weight, d) / scale));
        }
      }
      record("lambda-map commutation", gap < 1e-8, "max relative trajectory gap " + fmt(gap));
    } else {
      record("lambda-map commutation", true, "skipped: kernels are not exponential");
    }
  }

  json j{{"command", "check"}, {"model", to_string(spec.model)}, {"checks", checks}, {"all_pass", all}};
  write_json(cx.file("check.json"), j, rc.config_hash);
  return all ? 0 : 3;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"stability", "sweep", "lowerbound", "decay",
                                                 "spectrum",  "limit", "check"};
  return names;
}

int run_command(const std::string& name, const RunConfig& rc, const CommandOptions& options, std::ostream& log) {
  // complete validation before anything is written
  if (name != "stability" && name != "limit") validate_for_assembly(rc.spec);
  if (name == "sweep") precheck_modes(rc.spec, sweep_top_mode(rc));
  if (name == "decay") precheck_modes(rc.spec, rc.decay.n_max);
  if (name == "spectrum") precheck_modes(rc.spec, rc.sweep.n_max);
  if (name == "lowerbound") {
    lower_bound_constants(rc.spec);
  }
  if (name == "limit" && heat_law(rc.spec.model) != HeatLaw::GurtinPipkin)
    throw SpecError("command 'limit' needs a Gurtin-Pipkin model");
  if (options.dump_modes > 0) precheck_modes(rc.spec, options.dump_modes);

  Context cx{rc, options.out_dir.empty() ? fs::path(rc.output.dir) : fs::path(options.out_dir), log};
  fs::create_directories(cx.dir);

  if (options.dump_modes > 0) {
    ModalAssembler assembler(rc.spec, rc.memory);
    for (int n = 1; n <= options.dump_modes; ++n) {
      std::ofstream out(cx.file("mode_" + std::to_string(n) + ".mtx"));
      out << "% beamstab " << kToolVersion << " config_hash=" << rc.config_hash << "\n";
      out << to_matrix_market(assembler.assemble(n));
    }
  }

  if (name == "stability") return cmd_stability(cx);
  if (name == "sweep") return cmd_sweep(cx);
  if (name == "lowerbound") return cmd_lowerbound(cx);
  if (name == "decay") return cmd_decay(cx);
  if (name == "spectrum") return cmd_spectrum(cx);
  if (name == "limit") return cmd_limit(cx);
  if (name == "check") return cmd_check(cx);
  throw SpecError("unknown command '" + name + "'");
}

int exit_code_for(const std::exception& error) {
  if (const auto* e = dynamic_cast<const Error*>(&error)) {
    switch (e->kind()) {
      case ErrorKind::Spec:
      case ErrorKind::Admissibility:
      case ErrorKind::Domain:
      case ErrorKind::Infeasible:
      case ErrorKind::UnsupportedMap:
      case ErrorKind::ConstructionUndefined: return 2;
      default: return 3;
    }
  }
  if (dynamic_cast<const nlohmann::json::exception*>(&error)) return 2;
  return 3;
}

}  // namespace beamstab::cli
