#pragma once

// Runs a Scenario: analyses in fixed order, CSV time series, JSON report.
// Wall-clock timings go to a separate timing.json so that every other
// output is byte-identical across runs of the same scenario.

#include "oqs/bosonic.hpp"
#include "oqs/coherence.hpp"
#include "oqs/csv.hpp"
#include "oqs/divisibility.hpp"
#include "oqs/projection.hpp"
#include "oqs/scenario.hpp"
#include "oqs/zassenhaus.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <typeinfo>
#include <vector>

namespace oqs {

inline constexpr const char *kReportSchemaVersion = "1.0";
inline constexpr const char *kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

namespace detail {

/// JSON has no infinities: non-finite values are written as strings.
inline Json number(double v) {
  if (std::isfinite(v))
    return v;
  if (std::isnan(v))
    return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline Json complex_json(Complex z) { return Json::array({number(z.real()), number(z.imag())}); }

inline Json matrix_json(const ComplexMatrix &m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c)
      row.push_back(complex_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline const char *error_kind(const std::exception &e) {
  if (dynamic_cast<const ParseError *>(&e))
    return "ParseError";
  if (dynamic_cast<const DimensionError *>(&e))
    return "DimensionError";
  if (dynamic_cast<const ContractViolation *>(&e))
    return "ContractViolation";
  if (dynamic_cast<const DegenerateEnvironment *>(&e))
    return "DegenerateEnvironment";
  if (dynamic_cast<const ParameterError *>(&e))
    return "ParameterError";
  if (dynamic_cast<const ValidationError *>(&e))
    return "ValidationError";
  if (dynamic_cast<const UnsupportedInput *>(&e))
    return "UnsupportedInput";
  if (dynamic_cast<const IoError *>(&e))
    return "IoError";
  return "Error";
}

inline std::string pair_label(const CoherencePair &p) {
  return std::to_string(p.first) + "_" + std::to_string(p.second);
}

} // namespace detail

inline Json scenario_json(const Scenario &s) {
  Json model;
  model["variant"] = to_string(s.model.variant);
  if (s.model.variant == ModelVariant::custom) {
    model["h_s"] = detail::matrix_json(s.custom->h_s);
    model["h_e"] = detail::matrix_json(s.custom->h_e);
    model["h_se"] = detail::matrix_json(s.custom->h_se);
  } else {
    model["j"] = s.model.j;
    model["omega"] = s.model.omega;
    if (s.model.variant == ModelVariant::dephasing) {
      Json modes = Json::array();
      for (const BosonMode &m : s.model.modes)
        modes.push_back({{"frequency", m.frequency}, {"coupling", detail::complex_json(m.coupling)}});
      model["modes"] = std::move(modes);
    } else {
      model["beta"] = s.model.beta;
      model["eta"] = s.model.eta;
    }
    model["n_max"] = s.model.n_max;
  }

  Json initial;
  if (const auto *p = std::get_if<StatePreset>(&s.system)) {
    initial["amplitudes"] = to_string(*p);
  } else {
    Json c = Json::array();
    for (const Complex &z : std::get<ComplexVector>(s.system))
      c.push_back(detail::complex_json(z));
    initial["amplitudes"] = std::move(c);
  }
  if (const auto *p = std::get_if<StatePreset>(&s.environment))
    initial["environment"] = to_string(*p);
  else
    initial["environment"] = std::get<std::vector<double>>(s.environment);

  Json analyses = Json::array();
  for (Analysis a : s.analyses)
    analyses.push_back(to_string(a));

  Json splits = Json::array();
  for (const SplitTriple &t : s.divisibility.splits)
    splits.push_back({t.t0, t.ts, t.t});
  Json pairs = Json::array();
  for (const CoherencePair &p : s.coherence.pairs)
    pairs.push_back({p.first, p.second});

  Json appendix = {{"n_max", s.appendix_e.n_max}, {"dt", s.appendix_e.dt}, {"t_max", s.appendix_e.t_max}};
  if (s.appendix_e.m1)
    appendix["m1"] = *s.appendix_e.m1;
  if (s.appendix_e.m2)
    appendix["m2"] = *s.appendix_e.m2;
  if (!s.appendix_e.times.empty())
    appendix["times"] = s.appendix_e.times;

  return {{"name", s.output.name},
          {"model", std::move(model)},
          {"initial", std::move(initial)},
          {"grid", {{"t0", s.grid.t0}, {"dt", s.grid.dt}, {"steps", s.grid.steps}, {"t_max", s.grid.end()}}},
          {"analyses", std::move(analyses)},
          {"divisibility", {{"tolerance", s.divisibility.tolerance}, {"splits", std::move(splits)}}},
          {"nz",
           {{"kept", s.nz.kept}, {"dt", s.nz.dt}, {"t_max", s.nz.t_max}, {"memory_time", s.nz.memory_time}}},
          {"coherence", {{"pairs", std::move(pairs)}}},
          {"zassenhaus", {{"dt", s.zassenhaus.dt}, {"levels", s.zassenhaus.levels}}},
          {"appendix-e", std::move(appendix)}};
}

/// Everything a run produces, before anything touches the filesystem.
struct RunResult {
  Json report;
  Json timing;
  std::map<std::string, CsvTable> tables; ///< file name -> table
  bool failed = false;

  int exit_code() const { return failed ? 1 : 0; }
};

namespace detail {

struct RunContext {
  const Scenario &scenario;
  const HamiltonianTriple &model;
  const InitialState &state;
  std::map<std::string, CsvTable> &tables;
};

inline Json run_markov(const RunContext &ctx) {
  const TimescaleEstimate est = markov_timescales(ctx.model);
  const CommutatorDiagnostics comm = commutator_diagnostics(ctx.model);
  const JointPropagator prop(ctx.model);
  const TimeGrid &grid = ctx.scenario.grid;
  Json samples = Json::array();
  for (double fraction : {0.25, 0.5, 1.0}) {
    const double elapsed = fraction * (grid.end() - grid.t0);
    const MarkovCheck check = markov_condition_check(prop, ctx.state, elapsed);
    samples.push_back({{"t", grid.t0 + elapsed},
                       {"correlation_ratio", number(check.correlation_ratio)},
                       {"env_drift", number(check.env_drift)}});
  }
  return {{"timescales",
           {{"delta_e", number(est.delta_e)},
            {"tau_e", number(est.tau_e)},
            {"coupling_norm", number(est.coupling_norm)},
            {"tau_s", number(est.tau_s)},
            {"phase", number(est.phase)},
            {"tau_ratio", number(est.tau_ratio)},
            {"markov_flag", est.markov_flag}}},
          {"comm_es", number(comm.comm_es)},
          {"comm_ss", number(comm.comm_ss)},
          {"condition_checks", std::move(samples)}};
}

inline Json run_divisibility(const RunContext &ctx) {
  const Scenario &s = ctx.scenario;
  const std::vector<SplitTriple> splits =
      s.divisibility.splits.empty() ? default_splits(s.grid.t0, s.grid.end()) : s.divisibility.splits;
  const DivisibilityReport report =
      analyze_divisibility(ctx.model, ctx.state.env_weights(), splits, s.divisibility.tolerance);
  const SuperMapBuilder builder(ctx.model, ctx.state.env_weights());

  CsvTable table;
  std::vector<double> t0, ts, t, comp, st;
  Json rows = Json::array();
  for (std::size_t k = 0; k < splits.size(); ++k) {
    const double state_res = state_divisibility_residual(builder, ctx.state, splits[k]);
    t0.push_back(splits[k].t0);
    ts.push_back(splits[k].ts);
    t.push_back(splits[k].t);
    comp.push_back(report.residuals[k]);
    st.push_back(state_res);
    rows.push_back({{"t0", splits[k].t0},
                    {"ts", splits[k].ts},
                    {"t", splits[k].t},
                    {"composition_residual", number(report.residuals[k])},
                    {"state_residual", number(state_res)}});
  }
  table.add("t0", t0).add("ts", ts).add("t", t).add("composition_residual", comp).add("state_residual", st);
  ctx.tables["divisibility.csv"] = std::move(table);
  return {{"verdict", to_string(report.verdict)},
          {"tolerance", report.tolerance},
          {"max_residual", number(report.max_residual())},
          {"comm_es", number(report.comm_es)},
          {"comm_ss", number(report.comm_ss)},
          {"splits", std::move(rows)}};
}

inline Json run_nz(const RunContext &ctx) {
  const NzOptions &opt = ctx.scenario.nz;
  const TimeGrid grid = opt.grid();
  const ProjectorPair pair = build_projectors(ctx.model.spec(), opt.kept);
  const ProjectedTrajectory traj = propagate_projected(ctx.model, ctx.state, pair, grid);
  const std::vector<double> memory = memory_term_series(ctx.model, pair, ctx.state, grid);
  const TimeLocalResult local = time_local_check(ctx.model, pair, ctx.state, grid);

  const double steps = (opt.memory_time - grid.t0) / grid.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9)
    throw ParameterError("nz: memory_time " + std::to_string(opt.memory_time) + " is not a grid point");
  const double memory_at = memory.at(static_cast<std::size_t>(std::llround(steps)));

  std::vector<double> p_norm, q_norm;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    p_norm.push_back(traj.p[k].norm());
    q_norm.push_back(traj.q[k].norm());
  }
  CsvTable table;
  table.add("t", traj.times).add("p_norm", p_norm).add("q_norm", q_norm).add("memory_term", memory);
  ctx.tables["nz.csv"] = std::move(table);

  return {{"kept", opt.kept},
          {"projected_coupling_norm", number(projected_coupling_norm(ctx.model, pair))},
          {"drift", number(traj.drift)},
          {"substeps", traj.substeps},
          {"accuracy_warning", traj.accuracy_warning()},
          {"memory_term", {{"t", opt.memory_time}, {"value", number(memory_at)}}},
          {"max_memory_term", number(*std::max_element(memory.begin(), memory.end()))},
          {"time_local", {{"local", local.local}, {"max_deviation", number(local.max_deviation)}}}};
}

inline Json run_coherence(const RunContext &ctx) {
  const Index n = ctx.model.spec().system_dim();
  std::vector<CoherencePair> pairs = ctx.scenario.coherence.pairs;
  if (pairs.empty())
    for (Index a = 0; a < n; ++a)
      for (Index b = a + 1; b < n; ++b)
        pairs.emplace_back(a, b);
  bool with_gamma = !pairs.empty();
  for (const CoherencePair &p : pairs)
    with_gamma = with_gamma && std::abs(ctx.state.system_density()(p.first, p.second)) > 0.0;

  const TimeGrid &grid = ctx.scenario.grid;
  const CoherenceTrace trace = coherence_trace(ctx.model, ctx.state, grid, pairs, with_gamma);
  const PopulationDrift drift = population_drift(ctx.model, ctx.state, grid);
  const CoherenceVerdict verdict = classify_coherence(trace.l1_coherence);

  CsvTable table;
  table.add("t", trace.times).add("l1_coherence", trace.l1_coherence);
  for (std::size_t k = 0; k < trace.populations.size(); ++k)
    table.add("population_" + std::to_string(k), trace.populations[k]);
  Json pair_json = Json::array();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const std::string label = pair_label(pairs[k]);
    table.add_complex("rho_" + label, trace.offdiag[k]);
    table.add("abs_rho_" + label, trace.offdiag_abs[k]);
    Json entry = {{"pair", {pairs[k].first, pairs[k].second}},
                  {"initial_abs", number(trace.offdiag_abs[k].front())},
                  {"final_abs", number(trace.offdiag_abs[k].back())}};
    if (with_gamma) {
      table.add("gamma_" + label, trace.gamma[k]);
      entry["gamma_max"] = number(*std::max_element(trace.gamma[k].begin(), trace.gamma[k].end()));
      entry["gamma_final"] = number(trace.gamma[k].back());
    }
    pair_json.push_back(std::move(entry));
  }
  ctx.tables["coherence.csv"] = std::move(table);

  const auto [lo, hi] = std::minmax_element(trace.l1_coherence.begin(), trace.l1_coherence.end());
  Json out = {{"verdict", to_string(verdict)},
              {"l1_initial", number(trace.l1_coherence.front())},
              {"l1_final", number(trace.l1_coherence.back())},
              {"l1_min", number(*lo)},
              {"l1_max", number(*hi)},
              {"population_drift",
               {{"max_drift", number(drift.max_drift)},
                {"precondition_holds", drift.precondition_holds},
                {"warning", drift.warning}}},
              {"pairs", std::move(pair_json)}};
  if (!with_gamma)
    out["gamma_note"] = "dephasing exponent omitted: some selected pair has zero initial coherence";
  return out;
}

inline Json run_zassenhaus(const RunContext &ctx) {
  const ZassenhausOptions &opt = ctx.scenario.zassenhaus;
  std::vector<double> dts;
  std::array<std::vector<double>, 4> printed;
  std::vector<double> standard;
  for (int level = 0; level < opt.levels; ++level) {
    const double dt = opt.dt / std::pow(2.0, level);
    const ZassenhausTerms terms = zassenhaus_terms(ctx.model, dt);
    dts.push_back(dt);
    for (int order = 1; order <= 4; ++order)
      printed[static_cast<std::size_t>(order - 1)].push_back(zassenhaus_error(terms, order));
    standard.push_back(zassenhaus_error(terms, 4, C4Variant::standard));
  }
  CsvTable table;
  table.add("dt", dts);
  for (int order = 1; order <= 4; ++order)
    table.add("error_order_" + std::to_string(order), printed[static_cast<std::size_t>(order - 1)]);
  table.add("error_order_4_standard", standard);
  ctx.tables["zassenhaus.csv"] = table;

  const ZassenhausTerms base = zassenhaus_terms(ctx.model, opt.dt);
  Json orders = Json::array();
  const auto monotone = [](const std::vector<double> &v) {
    for (std::size_t k = 1; k < v.size(); ++k)
      if (!(v[k] < v[k - 1]))
        return false;
    return true;
  };
  const auto ratio = [](const std::vector<double> &v) { return number(v[0] / v[1]); };
  for (int order = 1; order <= 4; ++order) {
    const auto &errors = printed[static_cast<std::size_t>(order - 1)];
    orders.push_back({{"order", order},
                      {"error", number(errors.front())},
                      {"halving_ratio", ratio(errors)},
                      {"monotone_in_dt", monotone(errors)}});
  }
  const bool decreasing = printed[1][0] < printed[0][0] && printed[2][0] < printed[1][0] &&
                          printed[3][0] < printed[2][0];
  const bool decreasing_standard =
      printed[1][0] < printed[0][0] && printed[2][0] < printed[1][0] && standard[0] < printed[2][0];
  return {{"dt", opt.dt},
          {"c2_norm", number(base.c2.norm())},
          {"c3_norm", number(base.c3.norm())},
          {"c4_norm", number(base.c4.norm())},
          {"c4_standard_norm", number(base.c4_standard.norm())},
          {"orders", std::move(orders)},
          {"order_4_standard",
           {{"error", number(standard.front())},
            {"halving_ratio", ratio(standard)},
            {"monotone_in_dt", monotone(standard)}}},
          {"error_decreases_with_order", decreasing},
          {"error_decreases_with_order_standard_c4", decreasing_standard}};
}

inline Json run_appendix_e(const RunContext &ctx) {
  const Scenario &s = ctx.scenario;
  if (s.model.variant != ModelVariant::jsquared)
    throw UnsupportedInput("appendix-e compares against the jsquared model only");
  const double m1 = s.appendix_e.m1.value_or(s.model.j);
  const double m2 = s.appendix_e.m2.value_or(-s.model.j);
  const AppendixEReport report =
      appendix_e_compare(s.model, m1, m2, s.appendix_e.sample_times(), s.appendix_e.n_max);

  std::vector<double> t, abs_dev, om_a, om_n, phase_dev;
  std::vector<Complex> analytic, numeric;
  for (const AppendixERow &row : report.rows) {
    t.push_back(row.t);
    analytic.push_back(row.analytic);
    numeric.push_back(row.numeric);
    abs_dev.push_back(row.abs_deviation);
    om_a.push_back(row.omega_analytic);
    om_n.push_back(row.omega_numeric);
    phase_dev.push_back(row.phase_deviation);
  }
  CsvTable table;
  table.add("t", t).add_complex("analytic", analytic).add_complex("numeric", numeric);
  table.add("abs_deviation", abs_dev).add("abs_omega_analytic", om_a).add("abs_omega_numeric", om_n);
  table.add("phase_deviation", phase_dev);
  ctx.tables["appendix_e.csv"] = std::move(table);

  const auto max_abs_dev = *std::max_element(abs_dev.begin(), abs_dev.end());
  return {{"j", report.j},
          {"m1", report.m1},
          {"m2", report.m2},
          {"polynomial_order", report.polynomial_order},
          {"tolerance", report.tolerance},
          {"t0_deviation", number(report.t0_deviation)},
          {"t0_pass", report.t0_pass()},
          {"max_phase_deviation", number(report.max_phase_deviation)},
          {"phase_pass", report.phase_pass()},
          {"max_omega_deviation", number(report.max_omega_deviation)},
          {"max_abs_deviation", number(max_abs_dev)},
          {"omega_analytic_at_0", number(omega_env(report.j, s.model.beta, s.model.eta, 0.0, report.polynomial_order).real())},
          {"samples", report.rows.size()}};
}

} // namespace detail

inline RunResult run_scenario(const Scenario &scenario) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  RunResult result;
  result.report["schema_version"] = kReportSchemaVersion;
  result.report["tool"] = {{"name", "oqslab"}, {"version", kToolVersion}, {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION)}};
  result.report["scenario"] = scenario_json(scenario);
  result.report["tolerances"] = {{"divisibility", scenario.divisibility.tolerance},
                                 {"divisibility_inconclusive_ceiling", kInconclusiveCeiling},
                                 {"hermitian", kHermitianTolerance},
                                 {"state", kStateTolerance},
                                 {"time_local", kTimeLocalTolerance},
                                 {"projected_drift_warning", kProjectedDriftWarning},
                                 {"appendix_e", kAppendixETolerance}};
  Json analyses = Json::object();
  Json stages = Json::object();

  // A model or state that fails to build turns every analysis into an error block.
  std::optional<HamiltonianTriple> model;
  std::optional<InitialState> state;
  Json setup_error;
  try {
    model.emplace(scenario.build_model());
    state.emplace(scenario.build_state(*model));
  } catch (const std::exception &e) {
    setup_error = {{"type", detail::error_kind(e)}, {"message", e.what()}};
  }

  for (Analysis a : scenario.analyses) {
    const auto stage_start = Clock::now();
    Json block;
    try {
      if (!setup_error.is_null())
        throw ValidationError("scenario setup failed: " + setup_error["message"].get<std::string>());
      const detail::RunContext ctx{scenario, *model, *state, result.tables};
      Json body;
      switch (a) {
      case Analysis::markov:
        body = detail::run_markov(ctx);
        break;
      case Analysis::divisibility:
        body = detail::run_divisibility(ctx);
        break;
      case Analysis::nz:
        body = detail::run_nz(ctx);
        break;
      case Analysis::coherence:
        body = detail::run_coherence(ctx);
        break;
      case Analysis::zassenhaus:
        body = detail::run_zassenhaus(ctx);
        break;
      case Analysis::appendix_e:
        body = detail::run_appendix_e(ctx);
        break;
      }
      block = {{"status", "ok"}, {"result", std::move(body)}};
    } catch (const std::exception &e) {
      result.failed = true;
      block = {{"status", "error"}, {"error", {{"type", detail::error_kind(e)}, {"message", e.what()}}}};
    }
    analyses[to_string(a)] = std::move(block);
    stages[to_string(a)] = std::chrono::duration<double>(Clock::now() - stage_start).count();
  }

  result.report["analyses"] = std::move(analyses);
  Json files = Json::array();
  for (const auto &[name, table] : result.tables)
    files.push_back(name);
  result.report["files"] = std::move(files);
  result.report["timing_file"] = "timing.json";
  result.report["status"] = result.failed ? "error" : "ok";
  result.timing = {{"stages_seconds", std::move(stages)},
                   {"total_seconds", std::chrono::duration<double>(Clock::now() - start).count()}};
  return result;
}

inline void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file)
    throw IoError("cannot open '" + path.string() + "' for writing");
  file << text;
  if (!file.flush())
    throw IoError("write to '" + path.string() + "' failed");
}

/// Writes report.json, timing.json and every CSV into `dir`.
inline void write_outputs(const RunResult &result, const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  for (const auto &[name, table] : result.tables)
    emit_timeseries(table, (dir / name).string());
  write_text(dir / "report.json", result.report.dump(2) + "\n");
  write_text(dir / "timing.json", result.timing.dump(2) + "\n");
}

} // namespace oqs
