#include "fdcancel/canceller.hpp"

#include <cmath>

#include "fdcancel/errors.hpp"

namespace fdcancel::canceller {

namespace {

// ceil with a guard against FP noise on exact-integer quotients.
long long ceil_guarded(double x) {
  return static_cast<long long>(std::ceil(x - 1e-9));
}

void validate_cfg(const CancellerConfig& cfg) {
  if (cfg.n_refs < 1) throw ConfigError("canceller: n_refs must be >= 1");
  if (cfg.taps_per_branch < 1)
    throw ConfigError("canceller: taps_per_branch must be >= 1");
  if (static_cast<int>(cfg.ref_delays_ns.size()) != cfg.n_refs)
    throw ConfigError("canceller: ref_delays_ns must have n_refs entries");
  if (!(cfg.step_size > 0.0 && cfg.step_size < 2.0))
    throw ConfigError("canceller: step_size must be in (0, 2)");
  if (cfg.sample_period_s <= 0.0)
    throw ConfigError("canceller: sample_period_s must be > 0");
  if (cfg.ref_spacing_s < cfg.sample_period_s * (1.0 - 1e-9))
    throw ConfigError("canceller: ref_spacing_s must be >= sample_period_s");
  if (cfg.digital_delay_ns < 0.0)
    throw ConfigError("canceller: digital_delay_ns must be >= 0");
  for (double d : cfg.ref_delays_ns)
    if (cfg.digital_delay_ns + 1e-9 < d)
      throw ConfigError("canceller: digital_delay must be >= max reference delay");
  if (cfg.mask_override) {
    if (static_cast<int>(cfg.mask_override->size()) != cfg.n_refs)
      throw ConfigError("canceller: mask_override must have n_refs masks");
    for (const MaskVector& m : *cfg.mask_override)
      if (static_cast<int>(m.entries.size()) != cfg.taps_per_branch)
        throw ConfigError("canceller: mask length must equal taps_per_branch");
  }
}

struct Measurement {
  double power_mw = 0.0;
  bool converged = false;
  size_t start = 0;
};

// Convergence is declared at the first pair of consecutive 2048-sample
// windows whose power differs by < 0.1 dB; measurement uses the frame tail
// from max(n/2, end of that pair) on.
Measurement measure_tail(const std::vector<cplx>& err) {
  const size_t n = err.size();
  const size_t win = 2048;
  Measurement m;
  size_t stable_end = n;
  double prev = -1.0;
  for (size_t j = 0; (j + 1) * win <= n; ++j) {
    double acc = 0.0;
    for (size_t k = j * win; k < (j + 1) * win; ++k) acc += std::norm(err[k]);
    const double pw = acc / static_cast<double>(win);
    const bool silent = j > 0 && prev == 0.0 && pw == 0.0;
    const bool flat = j > 0 && prev > 0.0 && pw > 0.0 &&
                      std::abs(10.0 * std::log10(pw / prev)) < 0.1;
    if (silent || flat) {
      stable_end = (j + 1) * win;
      m.converged = true;
      break;
    }
    prev = pw;
  }
  m.start = std::max(n / 2, m.converged ? stable_end : n / 2);
  // Keep a usable tail even when stability lands near the end of the frame.
  if (m.start > n / 2 && n - m.start < 1024) m.start = n / 2;
  double acc = 0.0;
  for (size_t k = m.start; k < n; ++k) acc += std::norm(err[k]);
  const size_t used = n - m.start;
  m.power_mw = used > 0 ? acc / static_cast<double>(used) : 0.0;
  return m;
}

CancellationReport run_engine(const SampleBuffer& y_i,
                              const std::vector<SampleBuffer>& refs,
                              const CancellerConfig& cfg,
                              const std::vector<MaskVector>& masks) {
  const int nb_count = cfg.n_refs;
  const int taps = cfg.taps_per_branch;
  const size_t n = y_i.samples.size();
  if (n == 0) throw ContractError("canceller: empty input");
  if (static_cast<int>(refs.size()) != nb_count)
    throw ContractError("canceller: reference count does not match n_refs");
  const double want_rate = 1.0 / cfg.sample_period_s;
  if (std::abs(y_i.rate_hz - want_rate) > 1e-6 * want_rate)
    throw ContractError("canceller: buffer rate does not match sample_period_s");
  for (const SampleBuffer& r : refs) {
    if (r.samples.size() != n)
      throw ContractError("canceller: stream lengths differ");
    if (r.rate_hz != y_i.rate_hz)
      throw ContractError("canceller: stream rates differ");
  }

  std::vector<std::vector<int>> act(static_cast<size_t>(nb_count));
  size_t total_active = 0;
  for (int b = 0; b < nb_count; ++b) {
    for (int l = 0; l < taps; ++l)
      if (masks[static_cast<size_t>(b)].entries[static_cast<size_t>(l)])
        act[static_cast<size_t>(b)].push_back(l);
    total_active += act[static_cast<size_t>(b)].size();
  }

  std::vector<cplx> g(static_cast<size_t>(nb_count) * taps, cplx(0.0, 0.0));
  std::vector<cplx> err(n);
  std::vector<cplx> uact(total_active);
  const double mu = cfg.step_size;

  for (size_t k = 0; k < n; ++k) {
    cplx yhat(0.0, 0.0);
    double unorm = 0.0;
    size_t t = 0;
    for (int b = 0; b < nb_count; ++b) {
      const cplx* yr = refs[static_cast<size_t>(b)].samples.data();
      const size_t base = static_cast<size_t>(b) * taps;
      for (int l : act[static_cast<size_t>(b)]) {
        const cplx v =
            (k >= static_cast<size_t>(l)) ? yr[k - static_cast<size_t>(l)] : cplx(0.0, 0.0);
        yhat += std::conj(g[base + static_cast<size_t>(l)]) * v;
        unorm += std::norm(v);
        uact[t++] = v;
      }
    }
    const cplx e = y_i.samples[k] - yhat;
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
      throw DivergenceError("canceller: non-finite error at sample " +
                            std::to_string(k));
    if (unorm >= kNormFloor) {
      const cplx c = (mu / unorm) * std::conj(e);
      t = 0;
      for (int b = 0; b < nb_count; ++b) {
        const size_t base = static_cast<size_t>(b) * taps;
        for (int l : act[static_cast<size_t>(b)])
          g[base + static_cast<size_t>(l)] += c * uact[t++];
      }
    }
    err[k] = e;
  }

  const Measurement m = measure_tail(err);
  CancellationReport rep;
  rep.residual_power_dbm = mw_to_dbm(m.power_mw);
  rep.converged = m.converged;
  rep.samples_used = n - m.start;
  rep.branch_weight_energy.assign(static_cast<size_t>(nb_count), 0.0);
  for (int b = 0; b < nb_count; ++b) {
    double acc = 0.0;
    for (int l = 0; l < taps; ++l)
      acc += std::norm(g[static_cast<size_t>(b) * taps + static_cast<size_t>(l)]);
    rep.branch_weight_energy[static_cast<size_t>(b)] = acc;
  }
  rep.final_weights = std::move(g);
  if (cfg.keep_residual) rep.residual = std::move(err);
  return rep;
}

}  // namespace

std::vector<MaskVector> compute_masks(const CancellerConfig& cfg) {
  validate_cfg(cfg);
  const int taps = cfg.taps_per_branch;
  const double ts = cfg.sample_period_s;
  const double tp = cfg.ref_spacing_s;

  long long d1 = ceil_guarded(cfg.digital_delay_ns * 1e-9 / ts);
  if (d1 < 1) d1 = 1;
  long long first = d1, last = d1;
  if (tp > 2.0 * ts * (1.0 + 1e-9)) {
    const long long d2 = ceil_guarded(tp / (2.0 * ts));
    first = d1 - d2;
    last = d1 + d2;
  } else if (tp > 2.0 * ts * (1.0 - 1e-9)) {
    last = d1 + 1;
  }
  first = std::max<long long>(1, first);
  last = std::min<long long>(taps, last);

  MaskVector m;
  m.entries.assign(static_cast<size_t>(taps), 0);
  for (long long i = first; i <= last; ++i) m.entries[static_cast<size_t>(i - 1)] = 1;
  return std::vector<MaskVector>(static_cast<size_t>(cfg.n_refs), m);
}

std::vector<cplx> build_input(const std::vector<std::vector<cplx>>& histories,
                              const std::vector<MaskVector>& masks) {
  if (histories.size() != masks.size())
    throw ContractError("build_input: branch count mismatch");
  std::vector<cplx> u;
  size_t total = 0;
  for (const auto& h : histories) total += h.size();
  u.reserve(total);
  for (size_t b = 0; b < histories.size(); ++b) {
    if (histories[b].size() != masks[b].entries.size())
      throw ContractError("build_input: history length does not match mask");
    for (size_t l = 0; l < histories[b].size(); ++l)
      u.push_back(masks[b].entries[l] ? histories[b][l] : cplx(0.0, 0.0));
  }
  return u;
}

NlmsResult nlms_step(FilterState& state, const std::vector<cplx>& u, cplx d,
                     double mu) {
  if (u.size() != state.weights.size())
    throw ContractError("nlms_step: input length does not match weights");
  if (!(mu > 0.0 && mu < 2.0))
    throw ConfigError("nlms_step: step size must be in (0, 2)");
  cplx yhat(0.0, 0.0);
  double unorm = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    yhat += std::conj(state.weights[i]) * u[i];
    unorm += std::norm(u[i]);
  }
  const cplx e = d - yhat;
  if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
    throw DivergenceError("nlms_step: non-finite error");
  if (unorm >= kNormFloor) {
    const cplx c = (mu / unorm) * std::conj(e);
    for (size_t i = 0; i < u.size(); ++i) state.weights[i] += c * u[i];
  }
  return {yhat, e};
}

CancellationReport run_single_tap(const SampleBuffer& y_i,
                                  const SampleBuffer& y_ref,
                                  const CancellerConfig& cfg) {
  if (cfg.n_refs != 1)
    throw ContractError("run_single_tap: cfg.n_refs must be 1");
  validate_cfg(cfg);
  MaskVector all_ones;
  all_ones.entries.assign(static_cast<size_t>(cfg.taps_per_branch), 1);
  return run_engine(y_i, {y_ref}, cfg, {all_ones});
}

CancellationReport run_multi_tap(const SampleBuffer& y_i,
                                 const std::vector<SampleBuffer>& refs,
                                 const CancellerConfig& cfg) {
  validate_cfg(cfg);
  const std::vector<MaskVector> masks =
      cfg.mask_override ? *cfg.mask_override : compute_masks(cfg);
  return run_engine(y_i, refs, cfg, masks);
}

double residual_theory_from_k(double p_i_dbm, double k, double n_dbm) {
  if (!(k >= 0.0 && k <= 1.0))
    throw ContractError("residual_theory: coherence weight outside [0, 1]");
  const double p = dbm_to_mw(p_i_dbm) * (1.0 - k * k) + dbm_to_mw(n_dbm);
  return mw_to_dbm(p);
}

double residual_theory(double p_i_dbm, const impairments::PhaseNoiseModel& model,
                       double delta_ir_s, double n_dbm) {
  return residual_theory_from_k(
      p_i_dbm, impairments::coherence_weight(model, delta_ir_s), n_dbm);
}

}  // namespace fdcancel::canceller
