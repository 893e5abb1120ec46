#include "resetsim/device.hpp"

#include "resetsim/errors.hpp"
#include "resetsim/units.hpp"

namespace resetsim {

Device Device::design_defaults() {
  Device d;
  d.lowpass = {nh(4.488), pf(1.809)};
  d.highpass = {pf(0.266), nh(0.660)};
  d.line.z0_ohm = 50.0;
  d.line.length_m = 25e-3;
  d.line.phase_velocity_m_s = kSpeedOfLight / std::sqrt(11.0);
  d.line.attenuation_np_m = 0.0;
  return d.calibrated();
}

rf::NetworkChain Device::lowpass_chain() const { return rf::make_ladder(lowpass_topology, lowpass, z_ref_ohm); }

rf::NetworkChain Device::highpass_chain() const { return rf::make_ladder(highpass_topology, highpass, z_ref_ohm); }

rf::NetworkChain Device::dissipator_chain() const {
  const auto lp = lowpass_chain();
  return lp.then(rf::TwoPortElement::line(line)).then(lp.reversed());
}

rf::DiplexerSpec Device::diplexer() const { return {lowpass_chain(), highpass_chain(), z_ref_ohm}; }

modes::ReflectionFn Device::mirror() const { return modes::filter_boundary(lowpass_chain().reversed(), line.z0_ohm); }

Device Device::calibrated() const {
  Device d = *this;
  const auto m = mirror();
  d.line.phase_velocity_m_s = modes::calibrate_phase_velocity(line, m, m, design_mode_freq_hz, mode_order);
  return d;
}

void Device::validate() const {
  lowpass_topology.validate();
  highpass_topology.validate();
  if (lowpass_topology.kind != rf::FilterKind::LowPass) throw DomainError("lowpass topology must be low-pass");
  if (highpass_topology.kind != rf::FilterKind::HighPass) throw DomainError("highpass topology must be high-pass");
  for (double v : {lowpass.series, lowpass.shunt, highpass.series, highpass.shunt})
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("filter element values must be > 0");
  line.validate();
  if (!(z_ref_ohm > 0.0)) throw DomainError("reference impedance must be > 0");
  if (!(design_mode_freq_hz > 0.0)) throw DomainError("design mode frequency must be > 0");
  if (mode_order < 1) throw DomainError("mode order must be >= 1");
}

std::vector<rf::FitTarget> default_lowpass_targets() {
  return {rf::CutoffTarget{ghz(3.35)}, rf::ImageImpedanceTarget{50.0}, rf::StopbandTarget{ghz(4.23), -30.0}};
}

std::vector<rf::FitTarget> default_highpass_targets() {
  return {rf::CutoffTarget{ghz(6.50)}, rf::ImageImpedanceTarget{50.0}, rf::StopbandTarget{ghz(4.23), -30.0}};
}

DeviceFit fit_device(const Device& start, const rf::FitOptions& options) {
  DeviceFit out;
  const auto lp_targets = default_lowpass_targets();
  const auto hp_targets = default_highpass_targets();
  out.lowpass = rf::fit_elements(start.lowpass_topology, lp_targets, start.lowpass, start.z_ref_ohm, options);
  out.highpass = rf::fit_elements(start.highpass_topology, hp_targets, start.highpass, start.z_ref_ohm, options);
  out.device = start;
  out.device.lowpass = out.lowpass.values;
  out.device.highpass = out.highpass.values;
  out.device = out.device.calibrated();
  return out;
}

}  // namespace resetsim
