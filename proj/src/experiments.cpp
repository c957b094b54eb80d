#include "fdcancel/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "fdcancel/errors.hpp"
#include "fdcancel/rng.hpp"

namespace fdcancel::experiments {

namespace {

// Substream roles hung off each run seed.
constexpr uint64_t kStreamOfdm = 1;
constexpr uint64_t kStreamTxPn = 2;
constexpr uint64_t kStreamRxPn = 3;
constexpr uint64_t kStreamAwgnSi = 4;
constexpr uint64_t kStreamAwgnRef0 = 5;  // reference n uses kStreamAwgnRef0 + n

std::vector<double> grid(double start, double stop, double step) {
  std::vector<double> v;
  for (int i = 0;; ++i) {
    const double x = start + step * i;
    if (x > stop + 1e-9) break;
    v.push_back(x);
  }
  return v;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void scale_inplace(SampleBuffer& x, double s) {
  for (cplx& v : x.samples) v *= s;
}

void add_inplace(SampleBuffer& x, const std::vector<cplx>& noise) {
  if (noise.size() != x.samples.size())
    throw ContractError("noise vector length mismatch");
  for (size_t k = 0; k < x.samples.size(); ++k) x.samples[k] += noise[k];
}

double sim_rate(const ScenarioPreset& p) {
  return kBaseRateHz * p.ofdm.upsample_factor;
}

bool wiener(const ScenarioPreset& p) {
  return p.phase_noise.kind == impairments::PhaseNoiseKind::Wiener &&
         p.phase_noise.sigma_eps_sq > 0.0;
}

// Reference delays of a curve at one sweep point.
std::vector<double> curve_ref_delays(const CurveSpec& c, double value_ns) {
  switch (c.ref_policy) {
    case RefDelayPolicy::FixedDelays:
      return c.ref_delays_ns;
    case RefDelayPolicy::HalfSweepValue:
      return {value_ns / 2.0};
    case RefDelayPolicy::SweepValue:
      return {value_ns};
  }
  throw ContractError("unknown ref policy");
}

channel::MultipathChannel swept_channel(const ScenarioPreset& p, double value_ns) {
  channel::MultipathChannel ch = p.si_channel;
  switch (p.sweep) {
    case SweepVariable::SiPathDelay:
      ch.paths.front().delay_ns = value_ns;
      break;
    case SweepVariable::PathSpread:
      ch.paths[1].delay_ns = ch.paths.front().delay_ns + value_ns;
      break;
    case SweepVariable::None:
      break;
  }
  return ch;
}

// Realized value of the swept quantity on the simulation clock.
double realized_sweep_ns(const ScenarioPreset& p, double value_ns) {
  const double fs = sim_rate(p);
  switch (p.sweep) {
    case SweepVariable::SiPathDelay:
      return channel::realized_delay_ns(value_ns, fs);
    case SweepVariable::PathSpread: {
      const double d0 = p.si_channel.paths.front().delay_ns;
      return channel::realized_delay_ns(d0 + value_ns, fs) -
             channel::realized_delay_ns(d0, fs);
    }
    case SweepVariable::None:
      return 0.0;
  }
  return 0.0;
}

// Digital-delay choice for a sweep point when the preset leaves it automatic.
// The configured value must cover the largest requested reference delay, but
// the shift itself is realized on the canceller clock while the analog delays
// are realized on the simulation clock, so the two roundings can disagree and
// leave an SI path at a negative lag. Pad up to the realized gap so every
// path stays causal, then for masked banks nudge onto the nearest value whose
// mask window contains the realized shift.
double auto_digital_delay(const ScenarioPreset& p,
                          const channel::MultipathChannel& ch,
                          const std::vector<double>& refs, bool masked) {
  const double fs = sim_rate(p);
  const double factor = p.ofdm.upsample_factor;
  const double ts_ns = 1e9 * factor / fs;
  double req_ns = 0.0;
  double ref_canc = 0.0;
  for (double r : refs) {
    req_ns = std::max(req_ns, r);
    ref_canc = std::max(
        ref_canc, static_cast<double>(channel::delay_to_samples(r, fs)) / factor);
  }
  double path_canc = std::numeric_limits<double>::infinity();
  for (const auto& pa : ch.paths)
    path_canc = std::min(path_canc, static_cast<double>(channel::delay_to_samples(
                                        pa.delay_ns, fs)) /
                                        factor);
  if (!std::isfinite(path_canc)) path_canc = ref_canc;
  const double need = std::max(0.0, std::ceil(ref_canc - path_canc - 1e-9));
  double dp = std::max(need * ts_ns, req_ns);
  if (!masked) {
    // A path landing a fraction of a sample into the adaptation window needs
    // taps on both sides to interpolate; hard against the causal edge the
    // left tail is cut off and the filter stalls well short of the floor.
    const double lag = dp / ts_ns + path_canc - ref_canc;
    const double frac = lag - std::floor(lag);
    if (frac > 1e-6 && frac < 1.0 - 1e-6 && lag < 2.0)
      dp += std::ceil(2.0 - lag - 1e-9) * ts_ns;
  }
  if (masked) {
    const double m = dp / ts_ns;
    const long long shift = std::llround(m);
    const long long lag = std::max<long long>(
        0, static_cast<long long>(std::ceil(m - 1e-9)) - 1);
    if (lag != shift) dp = (static_cast<double>(shift) + 0.25) * ts_ns;
  }
  return dp;
}

// Closed-form residual for a single-reference curve of a one-path delay
// sweep; empty when the model does not apply.
std::optional<double> theory_for(const ScenarioPreset& p, const CurveSpec& c,
                                 double value_ns) {
  if (p.sweep != SweepVariable::SiPathDelay) return std::nullopt;
  if (p.si_channel.paths.size() != 1) return std::nullopt;
  if (c.kind != CancellerKind::SingleTap) return std::nullopt;
  const std::vector<double> refs = curve_ref_delays(c, value_ns);
  if (refs.size() != 1) return std::nullopt;

  const double fs = sim_rate(p);
  const double delta_ir_s = (channel::realized_delay_ns(value_ns, fs) -
                             channel::realized_delay_ns(refs[0], fs)) *
                            1e-9;
  // Only the receive-time oscillator decoheres the pair: the transmit walk
  // rides inside the reference waveform, so whatever tap lag aligns the
  // delays also aligns that walk and it subtracts out. The receive walk is
  // stamped at arrival and ends up offset by delta_ir between the branches.
  double k = 1.0;
  if (c.phase_noise && p.rx_phase_noise)
    k *= impairments::coherence_weight(p.phase_noise, delta_ir_s);

  const double gain_db = p.si_channel.paths.front().gain_db;
  const double p_i_dbm = c.tx_power_dbm + gain_db;
  // Direct-chain floor plus the floor regenerated through the canceller tap.
  const double n_mw = dbm_to_mw(p.noise.floor_dbm) * (1.0 + db_to_lin(gain_db));
  return canceller::residual_theory_from_k(p_i_dbm, k, mw_to_dbm(n_mw));
}

struct SeedContext {
  uint64_t seed = 0;
  SampleBuffer x_plain;  // wideband tx signal at 0 dBm, clean oscillator
  SampleBuffer x_txpn;   // same with the tx oscillator walk applied
  bool has_rx_trace = false;
  impairments::PhaseNoiseTrace rx_trace;  // one LO shared by all receivers
  std::vector<std::vector<cplx>> chain_noise;  // [0] direct, [1+n] reference n
};

SeedContext build_context(const ScenarioPreset& p, uint64_t seed, int max_refs) {
  SeedContext ctx;
  ctx.seed = seed;
  signal::OfdmConfig ocfg = p.ofdm;
  ocfg.tx_power_dbm = 0.0;
  const SampleBuffer base =
      signal::generate_ofdm(ocfg, derive_stream(seed, kStreamOfdm));
  ctx.x_plain = signal::upsample_shape(base, ocfg.upsample_factor);
  const size_t n = ctx.x_plain.samples.size();

  if (wiener(p) && p.tx_phase_noise) {
    const auto tx_trace = impairments::gen_phase_trace(
        p.phase_noise, n, derive_stream(seed, kStreamTxPn));
    ctx.x_txpn = impairments::apply_phase_noise(ctx.x_plain, tx_trace);
  } else {
    ctx.x_txpn = ctx.x_plain;
  }
  if (wiener(p) && p.rx_phase_noise) {
    ctx.rx_trace = impairments::gen_phase_trace(
        p.phase_noise, n, derive_stream(seed, kStreamRxPn));
    ctx.has_rx_trace = true;
  }

  // White noise is injected on the wideband clock; the matched decimator
  // attenuates it by its tap energy, so pre-compensate to land the floor
  // exactly at floor_dbm on the canceller clock.
  const double inj_dbm =
      p.noise.floor_dbm -
      10.0 * std::log10(signal::downsample_noise_power_gain(p.ofdm.upsample_factor));
  const double sd = std::sqrt(dbm_to_mw(inj_dbm));
  ctx.chain_noise.resize(static_cast<size_t>(1 + max_refs));
  for (int i = 0; i <= max_refs; ++i) {
    const uint64_t stream =
        (i == 0) ? kStreamAwgnSi : kStreamAwgnRef0 + static_cast<uint64_t>(i - 1);
    GaussianRng rng(derive_stream(seed, stream));
    auto& vec = ctx.chain_noise[static_cast<size_t>(i)];
    vec.resize(n);
    for (size_t k = 0; k < n; ++k) vec[k] = sd * rng.complex_gaussian();
  }
  return ctx;
}

struct PointOutcome {
  double residual_dbm = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  bool diverged = false;
};

PointOutcome run_point(const ScenarioPreset& p, const CurveSpec& c,
                       const channel::MultipathChannel& ch,
                       const std::vector<double>& refs_ns, double dprime_ns,
                       const SeedContext& ctx) {
  const int factor = p.ofdm.upsample_factor;
  const bool pn = c.phase_noise;
  const double s = std::sqrt(dbm_to_mw(c.tx_power_dbm));
  const SampleBuffer& xsrc = pn ? ctx.x_txpn : ctx.x_plain;

  PointOutcome out;
  try {
    SampleBuffer yi = channel::apply_channel(xsrc, ch);
    scale_inplace(yi, s);
    if (pn && ctx.has_rx_trace) yi = impairments::apply_phase_noise(yi, ctx.rx_trace);
    add_inplace(yi, ctx.chain_noise[0]);
    yi = signal::downsample_matched(yi, factor);
    yi = channel::digital_delay(yi, dprime_ns);

    std::vector<SampleBuffer> yrs;
    yrs.reserve(refs_ns.size());
    for (size_t i = 0; i < refs_ns.size(); ++i) {
      channel::PathSpec tap;
      tap.delay_ns = refs_ns[i];
      SampleBuffer r = channel::apply_path(xsrc, tap);
      scale_inplace(r, s);
      if (pn && ctx.has_rx_trace) r = impairments::apply_phase_noise(r, ctx.rx_trace);
      add_inplace(r, ctx.chain_noise[1 + i]);
      yrs.push_back(signal::downsample_matched(r, factor));
    }

    canceller::CancellerConfig ccfg;
    ccfg.n_refs = static_cast<int>(refs_ns.size());
    ccfg.taps_per_branch = p.taps_per_branch;
    ccfg.ref_delays_ns = refs_ns;
    ccfg.digital_delay_ns = dprime_ns;
    ccfg.step_size = p.step_size;
    ccfg.sample_period_s = 1.0 / yi.rate_hz;
    ccfg.ref_spacing_s = refs_ns.size() >= 2
                             ? (refs_ns[1] - refs_ns[0]) * 1e-9
                             : ccfg.sample_period_s;

    const canceller::CancellationReport rep =
        c.kind == CancellerKind::SingleTap
            ? canceller::run_single_tap(yi, yrs[0], ccfg)
            : canceller::run_multi_tap(yi, yrs, ccfg);
    out.residual_dbm = rep.residual_power_dbm;
    out.converged = rep.converged;
  } catch (const DivergenceError&) {
    out.diverged = true;
  }
  return out;
}

int curve_n_refs(const CurveSpec& c) {
  return c.ref_policy == RefDelayPolicy::FixedDelays
             ? static_cast<int>(c.ref_delays_ns.size())
             : 1;
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig5", "fig6"}; }

ScenarioPreset preset_fig2() {
  ScenarioPreset p;
  p.name = "fig2";
  p.si_channel.paths = {{-50.0, 0.0, 0.0}};
  p.sweep = SweepVariable::SiPathDelay;
  p.sweep_values_ns = grid(0.0, 150.0, 10.0);

  CurveSpec c;
  c.kind = CancellerKind::SingleTap;
  c.ref_delays_ns = {0.0};
  c.label = "single_-30dbm";
  c.tx_power_dbm = 20.0;
  p.curves.push_back(c);
  c.label = "single_-40dbm";
  c.tx_power_dbm = 10.0;
  p.curves.push_back(c);
  return p;
}

ScenarioPreset preset_fig3() {
  ScenarioPreset p;
  p.name = "fig3";
  p.si_channel.paths = {{-50.0, 0.0, 0.0}, {-60.0, 0.0, 0.0}};
  p.sweep = SweepVariable::PathSpread;
  p.sweep_values_ns = grid(0.0, 150.0, 10.0);

  CurveSpec c;
  c.kind = CancellerKind::SingleTap;
  c.tx_power_dbm = 20.0;
  c.label = "ref_at_first_path";
  c.ref_policy = RefDelayPolicy::FixedDelays;
  c.ref_delays_ns = {0.0};
  p.curves.push_back(c);
  c.label = "ref_at_half_spread";
  c.ref_policy = RefDelayPolicy::HalfSweepValue;
  p.curves.push_back(c);
  c.label = "ref_at_second_path";
  c.ref_policy = RefDelayPolicy::SweepValue;
  p.curves.push_back(c);
  return p;
}

ScenarioPreset preset_fig5() {
  ScenarioPreset p;
  p.name = "fig5";
  p.si_channel.paths = {{-50.0, 0.0, 0.0}};
  p.sweep = SweepVariable::SiPathDelay;
  p.sweep_values_ns = grid(0.0, 150.0, 10.0);

  const std::vector<double> two{0.0, 100.0};
  const std::vector<double> four{0.0, 100.0 / 3.0, 200.0 / 3.0, 100.0};
  for (double tx : {20.0, 10.0}) {
    const std::string suffix = tx > 15.0 ? "_-30dbm" : "_-40dbm";
    CurveSpec c;
    c.tx_power_dbm = tx;
    c.kind = CancellerKind::SingleTap;
    c.ref_delays_ns = {0.0};
    c.label = "single" + suffix;
    p.curves.push_back(c);
    c.kind = CancellerKind::MultiTap;
    c.ref_delays_ns = two;
    c.label = "two_ref" + suffix;
    p.curves.push_back(c);
    c.ref_delays_ns = four;
    c.label = "four_ref" + suffix;
    p.curves.push_back(c);
  }
  return p;
}

ScenarioPreset preset_fig6() {
  ScenarioPreset p;
  p.name = "fig6";
  p.si_channel.paths = {{-50.0, 0.0, 0.0}, {-60.0, 0.0, 0.0}};
  p.sweep = SweepVariable::PathSpread;
  p.sweep_values_ns = grid(0.0, 150.0, 10.0);

  CurveSpec c;
  c.tx_power_dbm = 20.0;
  c.kind = CancellerKind::SingleTap;
  c.ref_delays_ns = {0.0};
  c.label = "single";
  p.curves.push_back(c);
  c.kind = CancellerKind::MultiTap;
  c.ref_delays_ns = {0.0, 100.0};
  c.label = "two_ref";
  p.curves.push_back(c);
  c.ref_delays_ns = {0.0, 100.0 / 3.0, 200.0 / 3.0, 100.0};
  c.label = "four_ref";
  p.curves.push_back(c);
  c.label = "four_ref_clean_osc";
  c.phase_noise = false;
  p.curves.push_back(c);
  return p;
}

ScenarioPreset preset_by_name(const std::string& name) {
  if (name == "fig2") return preset_fig2();
  if (name == "fig3") return preset_fig3();
  if (name == "fig5") return preset_fig5();
  if (name == "fig6") return preset_fig6();
  throw ConfigError("unknown preset: " + name);
}

void validate(const ScenarioPreset& p) {
  if (p.name.empty()) throw ConfigError("scenario: name must not be empty");
  if (p.curves.empty()) throw ConfigError("scenario: needs at least one curve");
  if (p.sweep_values_ns.empty())
    throw ConfigError("scenario: needs at least one sweep value");
  if (p.seeds.empty()) throw ConfigError("scenario: needs at least one seed");
  if (p.taps_per_branch < 1)
    throw ConfigError("scenario: taps_per_branch must be >= 1");
  if (!(p.step_size > 0.0 && p.step_size < 2.0))
    throw ConfigError("scenario: step_size must be in (0, 2)");
  channel::validate(p.si_channel);
  if (p.sweep == SweepVariable::PathSpread && p.si_channel.paths.size() < 2)
    throw ConfigError("scenario: spread sweep needs at least two paths");
  for (double v : p.sweep_values_ns)
    if (v < 0.0) throw ConfigError("scenario: sweep values must be >= 0");
  if (p.digital_delay_ns && *p.digital_delay_ns < 0.0)
    throw ConfigError("scenario: digital_delay_ns must be >= 0");
  if (wiener(p)) {
    const double fs = sim_rate(p);
    if (std::abs(p.phase_noise.model_rate_hz - fs) > 1e-3)
      throw ConfigError(
          "scenario: phase noise model rate must equal the wideband rate (" +
          fmt(fs) + " Hz)");
  }
  for (const CurveSpec& c : p.curves) {
    if (c.label.empty()) throw ConfigError("curve: label must not be empty");
    if (c.label.find(',') != std::string::npos)
      throw ConfigError("curve: label must not contain commas");
    if (c.ref_policy != RefDelayPolicy::FixedDelays) {
      if (c.kind != CancellerKind::SingleTap)
        throw ConfigError("curve: swept reference placement is single-reference");
      if (p.digital_delay_ns) {
        const double max_v = *std::max_element(p.sweep_values_ns.begin(),
                                               p.sweep_values_ns.end());
        const double max_ref =
            c.ref_policy == RefDelayPolicy::SweepValue ? max_v : max_v / 2.0;
        if (*p.digital_delay_ns + 1e-9 < max_ref)
          throw ConfigError(
              "scenario: digital_delay must be >= max reference delay");
      }
      continue;
    }
    if (c.ref_delays_ns.empty())
      throw ConfigError("curve: needs at least one reference delay");
    if (c.kind == CancellerKind::SingleTap && c.ref_delays_ns.size() != 1)
      throw ConfigError("curve: single-reference canceller takes one delay");
    for (size_t i = 0; i < c.ref_delays_ns.size(); ++i) {
      if (c.ref_delays_ns[i] < 0.0)
        throw ConfigError("curve: reference delays must be >= 0");
      if (i > 0 && c.ref_delays_ns[i] <= c.ref_delays_ns[i - 1])
        throw ConfigError("curve: reference delays must be strictly increasing");
    }
    if (c.ref_delays_ns.size() >= 3) {
      const double t0 = c.ref_delays_ns[1] - c.ref_delays_ns[0];
      for (size_t i = 2; i < c.ref_delays_ns.size(); ++i) {
        const double ti = c.ref_delays_ns[i] - c.ref_delays_ns[i - 1];
        if (std::abs(ti - t0) > 1e-6 * std::max(1.0, std::abs(t0)))
          throw ConfigError("curve: reference delays must be evenly spaced");
      }
    }
    if (p.digital_delay_ns &&
        *p.digital_delay_ns + 1e-9 < c.ref_delays_ns.back())
      throw ConfigError("scenario: digital_delay must be >= max reference delay");
  }
}

SweepResult run_scenario(const ScenarioPreset& p) {
  validate(p);
  const auto t_start = std::chrono::steady_clock::now();

  int max_refs = 1;
  for (const CurveSpec& c : p.curves) max_refs = std::max(max_refs, curve_n_refs(c));

  std::vector<SeedContext> ctxs;
  ctxs.reserve(p.seeds.size());
  for (uint64_t seed : p.seeds) ctxs.push_back(build_context(p, seed, max_refs));

  const size_t n_curves = p.curves.size();
  const size_t n_values = p.sweep_values_ns.size();
  const size_t n_seeds = p.seeds.size();

  struct Task {
    size_t curve, value, seed;
  };
  std::vector<Task> tasks;
  tasks.reserve(n_curves * n_values * n_seeds);
  for (size_t ci = 0; ci < n_curves; ++ci)
    for (size_t vi = 0; vi < n_values; ++vi)
      for (size_t si = 0; si < n_seeds; ++si) tasks.push_back({ci, vi, si});

  std::vector<PointOutcome> outcomes(tasks.size());
  auto worker_body = [&](size_t ti) {
    const Task& t = tasks[ti];
    const CurveSpec& c = p.curves[t.curve];
    const double v = p.sweep_values_ns[t.value];
    const channel::MultipathChannel ch = swept_channel(p, v);
    const std::vector<double> refs = curve_ref_delays(c, v);
    const double dprime = p.digital_delay_ns
                              ? *p.digital_delay_ns
                              : auto_digital_delay(
                                    p, ch, refs,
                                    c.kind == CancellerKind::MultiTap);
    outcomes[ti] = run_point(p, c, ch, refs, dprime, ctxs[t.seed]);
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned jobs =
      p.jobs > 0 ? static_cast<unsigned>(p.jobs) : hw;
  if (jobs <= 1 || tasks.size() <= 1) {
    for (size_t ti = 0; ti < tasks.size(); ++ti) worker_body(ti);
  } else {
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mu;
    auto loop = [&] {
      for (;;) {
        const size_t ti = next.fetch_add(1);
        if (ti >= tasks.size()) return;
        try {
          worker_body(ti);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    const unsigned count = std::min<size_t>(jobs, tasks.size());
    pool.reserve(count);
    for (unsigned i = 0; i < count; ++i) pool.emplace_back(loop);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  SweepResult res;
  res.preset = p;
  res.rows.reserve(n_curves * n_values);
  for (size_t ci = 0; ci < n_curves; ++ci) {
    const CurveSpec& c = p.curves[ci];
    for (size_t vi = 0; vi < n_values; ++vi) {
      const double v = p.sweep_values_ns[vi];
      SweepRow row;
      row.curve = c.label;
      row.sweep_value_ns = v;
      row.realized_delay_ns = realized_sweep_ns(p, v);
      row.theory_dbm = theory_for(p, c, v);
      row.residual_dbm_seeds.resize(n_seeds);
      double acc_mw = 0.0;
      size_t good = 0;
      bool all_converged = true;
      for (size_t si = 0; si < n_seeds; ++si) {
        const PointOutcome& o = outcomes[(ci * n_values + vi) * n_seeds + si];
        row.residual_dbm_seeds[si] = o.residual_dbm;
        if (o.diverged || !std::isfinite(o.residual_dbm)) {
          all_converged = false;
          continue;
        }
        acc_mw += dbm_to_mw(o.residual_dbm);
        ++good;
        all_converged = all_converged && o.converged;
      }
      row.residual_dbm_mean = good > 0
                                  ? mw_to_dbm(acc_mw / static_cast<double>(good))
                                  : std::numeric_limits<double>::quiet_NaN();
      row.converged = all_converged && good == n_seeds;
      res.rows.push_back(std::move(row));
    }
  }

  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return res;
}

std::vector<TheoryRow> theory_overlay(const ScenarioPreset& p) {
  validate(p);
  if (p.sweep != SweepVariable::SiPathDelay)
    throw NotApplicableError("theory overlay needs a path-delay sweep");
  if (p.si_channel.paths.size() != 1)
    throw NotApplicableError("theory overlay needs a one-path channel");
  std::vector<TheoryRow> rows;
  for (const CurveSpec& c : p.curves) {
    for (double v : p.sweep_values_ns) {
      const std::optional<double> t = theory_for(p, c, v);
      if (!t) continue;
      TheoryRow r;
      r.curve = c.label;
      r.sweep_value_ns = v;
      const double fs = sim_rate(p);
      r.delta_ir_ns = channel::realized_delay_ns(v, fs) -
                      channel::realized_delay_ns(curve_ref_delays(c, v)[0], fs);
      r.theory_dbm = *t;
      rows.push_back(r);
    }
  }
  if (rows.empty())
    throw NotApplicableError("theory overlay needs a single-reference curve");
  return rows;
}

void write_csv(const SweepResult& res, std::ostream& os) {
  const size_t n_seeds = res.preset.seeds.size();
  os << "sweep_value_ns,residual_dbm_mean";
  for (size_t i = 1; i <= n_seeds; ++i) os << ",residual_dbm_seed_" << i;
  os << ",theory_dbm,realized_delay_ns,curve,converged\n";
  for (const SweepRow& row : res.rows) {
    os << fmt(row.sweep_value_ns) << ',' << fmt(row.residual_dbm_mean);
    for (double v : row.residual_dbm_seeds) os << ',' << fmt(v);
    os << ',' << (row.theory_dbm ? fmt(*row.theory_dbm) : "");
    os << ',' << fmt(row.realized_delay_ns);
    os << ',' << row.curve << ',' << (row.converged ? 1 : 0) << '\n';
  }
}

void write_theory_csv(const std::vector<TheoryRow>& rows, std::ostream& os) {
  os << "curve,sweep_value_ns,delta_ir_ns,theory_dbm\n";
  for (const TheoryRow& r : rows)
    os << r.curve << ',' << fmt(r.sweep_value_ns) << ',' << fmt(r.delta_ir_ns)
       << ',' << fmt(r.theory_dbm) << '\n';
}

}  // namespace fdcancel::experiments
