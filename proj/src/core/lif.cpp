#include "neurodsp/lif.hpp"

#include <algorithm>
#include <ostream>

namespace neurodsp {

void LifParams::validate() const {
  require(tau > 0.0, ErrorCode::InvalidArgument, "LIF: tau must be > 0");
  require(dt > 0.0, ErrorCode::InvalidArgument, "LIF: dt must be > 0");
  require(dt <= tau / 2.0, ErrorCode::InvalidArgument, "LIF: dt must be <= tau/2");
  require(r_mem > 0.0, ErrorCode::InvalidArgument, "LIF: membrane resistance must be > 0");
  require(t_ref >= 0.0, ErrorCode::InvalidArgument, "LIF: t_ref must be >= 0");
  require(v_th > v_reset && v_reset >= v_rest, ErrorCode::InvalidArgument,
          "LIF: need v_th > v_reset >= v_rest");
}

LifStepResult lif_step(const LifState& s, const LifParams& p, double i_in) noexcept {
  // Remaining refractory time below a sliver of dt is float residue.
  const double eps = p.dt * 1e-9;
  if (s.refractory_remaining > eps) {
    double left = s.refractory_remaining - p.dt;
    if (left <= eps) left = 0.0;
    return {{p.v_reset, left}, false};
  }
  // A membrane already at threshold (e.g. an externally set state) fires now.
  if (s.v >= p.v_th) return {{p.v_reset, p.t_ref}, true};
  const double v = s.v + (p.dt / p.tau) * (-(s.v - p.v_rest) + p.r_mem * i_in);
  if (v >= p.v_th) return {{p.v_reset, p.t_ref}, true};
  return {{v, 0.0}, false};
}

LifTrace lif_run_trace(const LifParams& p, const std::vector<double>& currents) {
  p.validate();
  LifTrace out;
  out.spikes.reserve(currents.size());
  out.v.reserve(currents.size());
  LifState s = LifState::at_rest(p);
  for (double i : currents) {
    const auto r = lif_step(s, p, i);
    s = r.state;
    out.spikes.push_back(r.spiked);
    out.v.push_back(s.v);
  }
  return out;
}

std::vector<bool> lif_run(const LifParams& p, const std::vector<double>& currents) {
  return lif_run_trace(p, currents).spikes;
}

std::vector<double> rate_decode(const std::vector<bool>& spikes, std::size_t window) {
  require(window >= 1, ErrorCode::InvalidArgument, "rate_decode: window must be >= 1");
  std::vector<double> out;
  out.reserve(spikes.size());
  std::size_t count = 0;
  for (std::size_t n = 0; n < spikes.size(); ++n) {
    count += spikes[n] ? 1 : 0;
    if (n >= window && spikes[n - window]) --count;
    out.push_back(static_cast<double>(count) / static_cast<double>(window));
  }
  return out;
}

std::vector<double> rate_encode(const Trace& x, double i_scale) {
  require(i_scale > 0.0, ErrorCode::InvalidArgument, "rate_encode: i_scale must be > 0");
  std::vector<double> out;
  out.reserve(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) out.push_back(i_scale * std::max(0.0, x.value(n)));
  return out;
}

void write_spikes_csv(std::ostream& out, const std::vector<bool>& spikes) {
  out << "n,spike\n";
  for (std::size_t n = 0; n < spikes.size(); ++n) out << n << ',' << (spikes[n] ? 1 : 0) << '\n';
}

}  // namespace neurodsp
