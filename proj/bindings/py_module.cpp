#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fdcancel/canceller.hpp"
#include "fdcancel/channel.hpp"
#include "fdcancel/config.hpp"
#include "fdcancel/errors.hpp"
#include "fdcancel/experiments.hpp"
#include "fdcancel/impairments.hpp"
#include "fdcancel/signal.hpp"
#include "fdcancel/version.hpp"

namespace py = pybind11;
using namespace fdcancel;

PYBIND11_MODULE(_fdcancel, m) {
  m.doc() = "Baseband toolkit for full-duplex self-interference cancellation";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);
  py::register_exception<NotApplicableError>(m, "NotApplicableError", PyExc_ValueError);

  py::class_<SampleBuffer>(m, "SampleBuffer")
      .def(py::init<>())
      .def(py::init([](std::vector<cplx> samples, double rate_hz) {
             SampleBuffer b;
             b.samples = std::move(samples);
             b.rate_hz = rate_hz;
             return b;
           }),
           py::arg("samples"), py::arg("rate_hz"))
      .def_readwrite("samples", &SampleBuffer::samples)
      .def_readwrite("rate_hz", &SampleBuffer::rate_hz)
      .def("__len__", [](const SampleBuffer& b) { return b.samples.size(); });

  m.attr("BASE_RATE_HZ") = kBaseRateHz;
  m.attr("SIM_RATE_HZ") = kSimRateHz;
  m.def("mean_power_mw", &mean_power_mw);
  m.def("set_power", &set_power, py::arg("x"), py::arg("power_dbm"));

  py::enum_<signal::Constellation>(m, "Constellation")
      .value("QPSK", signal::Constellation::Qpsk)
      .value("QAM16", signal::Constellation::Qam16);

  py::class_<signal::OfdmConfig>(m, "OfdmConfig")
      .def(py::init<>())
      .def_readwrite("fft_size", &signal::OfdmConfig::fft_size)
      .def_readwrite("num_symbols", &signal::OfdmConfig::num_symbols)
      .def_readwrite("cp_len", &signal::OfdmConfig::cp_len)
      .def_readwrite("occupied_subcarriers", &signal::OfdmConfig::occupied_subcarriers)
      .def_readwrite("upsample_factor", &signal::OfdmConfig::upsample_factor)
      .def_readwrite("constellation", &signal::OfdmConfig::constellation)
      .def_readwrite("tx_power_dbm", &signal::OfdmConfig::tx_power_dbm);

  m.def("generate_ofdm", &signal::generate_ofdm, py::arg("cfg"), py::arg("seed"));
  m.def("upsample_shape", &signal::upsample_shape, py::arg("x"), py::arg("factor"));
  m.def("downsample_matched", &signal::downsample_matched, py::arg("y"), py::arg("factor"));
  m.def("pulse_shaping_taps", &signal::pulse_shaping_taps, py::arg("factor"));
  m.def("cascade_group_delay_samples", &signal::cascade_group_delay_samples, py::arg("factor"));
  m.def("downsample_noise_power_gain", &signal::downsample_noise_power_gain, py::arg("factor"));

  py::enum_<impairments::PhaseNoiseKind>(m, "PhaseNoiseKind")
      .value("WIENER", impairments::PhaseNoiseKind::Wiener)
      .value("NONE", impairments::PhaseNoiseKind::None);

  py::class_<impairments::PhaseNoiseModel>(m, "PhaseNoiseModel")
      .def(py::init<>())
      .def_readwrite("sigma_eps_sq", &impairments::PhaseNoiseModel::sigma_eps_sq)
      .def_readwrite("model_rate_hz", &impairments::PhaseNoiseModel::model_rate_hz)
      .def_readwrite("kind", &impairments::PhaseNoiseModel::kind);

  py::class_<impairments::PhaseNoiseTrace>(m, "PhaseNoiseTrace")
      .def(py::init<>())
      .def_readwrite("phi", &impairments::PhaseNoiseTrace::phi)
      .def_readwrite("rate_hz", &impairments::PhaseNoiseTrace::rate_hz);

  py::enum_<impairments::NoiseChain>(m, "NoiseChain")
      .value("RX_CHAIN", impairments::NoiseChain::RxChain)
      .value("REF_CHAIN", impairments::NoiseChain::RefChain);

  py::class_<impairments::NoiseModel>(m, "NoiseModel")
      .def(py::init<>())
      .def_readwrite("floor_dbm", &impairments::NoiseModel::floor_dbm)
      .def_readwrite("applies_to", &impairments::NoiseModel::applies_to);

  m.def("gen_phase_trace", &impairments::gen_phase_trace, py::arg("model"),
        py::arg("length"), py::arg("seed"));
  m.def("apply_phase_noise", &impairments::apply_phase_noise, py::arg("x"), py::arg("trace"));
  m.def("add_awgn", &impairments::add_awgn, py::arg("x"), py::arg("noise"), py::arg("seed"));
  m.def("diff_process_variance", &impairments::diff_process_variance,
        py::arg("model"), py::arg("delta_s"));
  m.def("coherence_weight", &impairments::coherence_weight, py::arg("model"),
        py::arg("delta_s"));

  py::class_<channel::PathSpec>(m, "PathSpec")
      .def(py::init<>())
      .def(py::init([](double gain_db, double phase_rad, double delay_ns) {
             return channel::PathSpec{gain_db, phase_rad, delay_ns};
           }),
           py::arg("gain_db") = 0.0, py::arg("phase_rad") = 0.0,
           py::arg("delay_ns") = 0.0)
      .def_readwrite("gain_db", &channel::PathSpec::gain_db)
      .def_readwrite("phase_rad", &channel::PathSpec::phase_rad)
      .def_readwrite("delay_ns", &channel::PathSpec::delay_ns);

  py::class_<channel::MultipathChannel>(m, "MultipathChannel")
      .def(py::init<>())
      .def_readwrite("paths", &channel::MultipathChannel::paths);

  py::class_<channel::ReferenceTapBank>(m, "ReferenceTapBank")
      .def(py::init<>())
      .def_readwrite("taps", &channel::ReferenceTapBank::taps);

  m.def("delay_to_samples", &channel::delay_to_samples, py::arg("delay_ns"), py::arg("rate_hz"));
  m.def("realized_delay_ns", &channel::realized_delay_ns, py::arg("delay_ns"), py::arg("rate_hz"));
  m.def("apply_path", &channel::apply_path, py::arg("x"), py::arg("path"));
  m.def("apply_channel", &channel::apply_channel, py::arg("x"), py::arg("channel"));
  m.def("digital_delay", &channel::digital_delay, py::arg("x"), py::arg("delay_ns"));

  py::class_<canceller::MaskVector>(m, "MaskVector")
      .def(py::init<>())
      .def_readwrite("entries", &canceller::MaskVector::entries);

  py::class_<canceller::CancellerConfig>(m, "CancellerConfig")
      .def(py::init<>())
      .def_readwrite("n_refs", &canceller::CancellerConfig::n_refs)
      .def_readwrite("taps_per_branch", &canceller::CancellerConfig::taps_per_branch)
      .def_readwrite("ref_delays_ns", &canceller::CancellerConfig::ref_delays_ns)
      .def_readwrite("digital_delay_ns", &canceller::CancellerConfig::digital_delay_ns)
      .def_readwrite("step_size", &canceller::CancellerConfig::step_size)
      .def_readwrite("sample_period_s", &canceller::CancellerConfig::sample_period_s)
      .def_readwrite("ref_spacing_s", &canceller::CancellerConfig::ref_spacing_s)
      .def_readwrite("mask_override", &canceller::CancellerConfig::mask_override)
      .def_readwrite("keep_residual", &canceller::CancellerConfig::keep_residual);

  py::class_<canceller::FilterState>(m, "FilterState")
      .def(py::init<>())
      .def_readwrite("weights", &canceller::FilterState::weights)
      .def_readwrite("history", &canceller::FilterState::history);

  py::class_<canceller::NlmsResult>(m, "NlmsResult")
      .def_readonly("y_hat", &canceller::NlmsResult::y_hat)
      .def_readonly("error", &canceller::NlmsResult::error);

  py::class_<canceller::CancellationReport>(m, "CancellationReport")
      .def_readonly("residual_power_dbm", &canceller::CancellationReport::residual_power_dbm)
      .def_readonly("theory_power_dbm", &canceller::CancellationReport::theory_power_dbm)
      .def_readonly("converged", &canceller::CancellationReport::converged)
      .def_readonly("samples_used", &canceller::CancellationReport::samples_used)
      .def_readonly("realized_delays_ns", &canceller::CancellationReport::realized_delays_ns)
      .def_readonly("branch_weight_energy", &canceller::CancellationReport::branch_weight_energy)
      .def_readonly("final_weights", &canceller::CancellationReport::final_weights)
      .def_readonly("residual", &canceller::CancellationReport::residual);

  m.def("compute_masks", &canceller::compute_masks, py::arg("cfg"));
  m.def("build_input", &canceller::build_input, py::arg("histories"), py::arg("masks"));
  m.def("nlms_step", &canceller::nlms_step, py::arg("state"), py::arg("u"),
        py::arg("d"), py::arg("mu"));
  m.def("run_single_tap", &canceller::run_single_tap, py::arg("y_i"),
        py::arg("y_ref"), py::arg("cfg"));
  m.def("run_multi_tap", &canceller::run_multi_tap, py::arg("y_i"),
        py::arg("refs"), py::arg("cfg"));
  m.def("residual_theory", &canceller::residual_theory, py::arg("p_i_dbm"),
        py::arg("model"), py::arg("delta_ir_s"), py::arg("n_dbm"));
  m.def("residual_theory_from_k", &canceller::residual_theory_from_k,
        py::arg("p_i_dbm"), py::arg("k"), py::arg("n_dbm"));

  py::enum_<experiments::CancellerKind>(m, "CancellerKind")
      .value("SINGLE_TAP", experiments::CancellerKind::SingleTap)
      .value("MULTI_TAP", experiments::CancellerKind::MultiTap);

  py::enum_<experiments::RefDelayPolicy>(m, "RefDelayPolicy")
      .value("FIXED_DELAYS", experiments::RefDelayPolicy::FixedDelays)
      .value("HALF_SWEEP_VALUE", experiments::RefDelayPolicy::HalfSweepValue)
      .value("SWEEP_VALUE", experiments::RefDelayPolicy::SweepValue);

  py::enum_<experiments::SweepVariable>(m, "SweepVariable")
      .value("SI_PATH_DELAY", experiments::SweepVariable::SiPathDelay)
      .value("PATH_SPREAD", experiments::SweepVariable::PathSpread)
      .value("NONE", experiments::SweepVariable::None);

  py::class_<experiments::CurveSpec>(m, "CurveSpec")
      .def(py::init<>())
      .def_readwrite("label", &experiments::CurveSpec::label)
      .def_readwrite("kind", &experiments::CurveSpec::kind)
      .def_readwrite("ref_policy", &experiments::CurveSpec::ref_policy)
      .def_readwrite("ref_delays_ns", &experiments::CurveSpec::ref_delays_ns)
      .def_readwrite("tx_power_dbm", &experiments::CurveSpec::tx_power_dbm)
      .def_readwrite("phase_noise", &experiments::CurveSpec::phase_noise);

  py::class_<experiments::ScenarioPreset>(m, "ScenarioPreset")
      .def(py::init<>())
      .def_readwrite("name", &experiments::ScenarioPreset::name)
      .def_readwrite("ofdm", &experiments::ScenarioPreset::ofdm)
      .def_readwrite("phase_noise", &experiments::ScenarioPreset::phase_noise)
      .def_readwrite("tx_phase_noise", &experiments::ScenarioPreset::tx_phase_noise)
      .def_readwrite("rx_phase_noise", &experiments::ScenarioPreset::rx_phase_noise)
      .def_readwrite("noise", &experiments::ScenarioPreset::noise)
      .def_readwrite("si_channel", &experiments::ScenarioPreset::si_channel)
      .def_readwrite("sweep", &experiments::ScenarioPreset::sweep)
      .def_readwrite("sweep_values_ns", &experiments::ScenarioPreset::sweep_values_ns)
      .def_readwrite("seeds", &experiments::ScenarioPreset::seeds)
      .def_readwrite("taps_per_branch", &experiments::ScenarioPreset::taps_per_branch)
      .def_readwrite("step_size", &experiments::ScenarioPreset::step_size)
      .def_readwrite("digital_delay_ns", &experiments::ScenarioPreset::digital_delay_ns)
      .def_readwrite("curves", &experiments::ScenarioPreset::curves)
      .def_readwrite("jobs", &experiments::ScenarioPreset::jobs);

  py::class_<experiments::SweepRow>(m, "SweepRow")
      .def_readonly("curve", &experiments::SweepRow::curve)
      .def_readonly("sweep_value_ns", &experiments::SweepRow::sweep_value_ns)
      .def_readonly("realized_delay_ns", &experiments::SweepRow::realized_delay_ns)
      .def_readonly("residual_dbm_seeds", &experiments::SweepRow::residual_dbm_seeds)
      .def_readonly("residual_dbm_mean", &experiments::SweepRow::residual_dbm_mean)
      .def_readonly("theory_dbm", &experiments::SweepRow::theory_dbm)
      .def_readonly("converged", &experiments::SweepRow::converged);

  py::class_<experiments::SweepResult>(m, "SweepResult")
      .def_readonly("preset", &experiments::SweepResult::preset)
      .def_readonly("rows", &experiments::SweepResult::rows)
      .def_readonly("wall_seconds", &experiments::SweepResult::wall_seconds);

  py::class_<experiments::TheoryRow>(m, "TheoryRow")
      .def_readonly("curve", &experiments::TheoryRow::curve)
      .def_readonly("sweep_value_ns", &experiments::TheoryRow::sweep_value_ns)
      .def_readonly("delta_ir_ns", &experiments::TheoryRow::delta_ir_ns)
      .def_readonly("theory_dbm", &experiments::TheoryRow::theory_dbm);

  m.def("preset_names", &experiments::preset_names);
  m.def("preset_by_name", &experiments::preset_by_name, py::arg("name"));
  m.def("preset_fig2", &experiments::preset_fig2);
  m.def("preset_fig3", &experiments::preset_fig3);
  m.def("preset_fig5", &experiments::preset_fig5);
  m.def("preset_fig6", &experiments::preset_fig6);
  m.def("validate_preset",
        [](const experiments::ScenarioPreset& p) { experiments::validate(p); });
  m.def("run_scenario", &experiments::run_scenario, py::arg("preset"),
        py::call_guard<py::gil_scoped_release>());
  m.def("theory_overlay", &experiments::theory_overlay, py::arg("preset"));
  m.def("csv_text", [](const experiments::SweepResult& res) {
    std::ostringstream os;
    experiments::write_csv(res, os);
    return os.str();
  });
  m.def("theory_csv_text", [](const std::vector<experiments::TheoryRow>& rows) {
    std::ostringstream os;
    experiments::write_theory_csv(rows, os);
    return os.str();
  });

  m.def("parse_config_text", &config::parse_text, py::arg("text"));
  m.def("load_config_file", &config::load_file, py::arg("path"));
  m.def("manifest_text", &config::manifest_text, py::arg("result"), py::arg("csv_name"));
}
