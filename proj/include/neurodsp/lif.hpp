#pragma once

#include <iosfwd>
#include <vector>

#include "neurodsp/signals.hpp"

namespace neurodsp {

/// Leaky integrate-and-fire parameters (SI units). Membrane capacitance is
/// tau / r_mem.
struct LifParams {
  double tau = 0.01;
  double v_rest = 0.0;
  double r_mem = 1.0;
  double v_th = 1.0;
  double v_reset = 0.0;
  double t_ref = 0.0;
  double dt = 0.001;

  void validate() const;
  double capacitance() const noexcept { return tau / r_mem; }
};

struct LifState {
  double v = 0.0;
  double refractory_remaining = 0.0;

  static LifState at_rest(const LifParams& p) noexcept { return {p.v_rest, 0.0}; }
};

struct LifStepResult {
  LifState state;
  bool spiked = false;
};

/// One forward-Euler step of tau dV/dt = -(V - V_rest) + R I.
/// Threshold is inclusive; a spike resets to v_reset and arms t_ref.
LifStepResult lif_step(const LifState& s, const LifParams& p, double i_in) noexcept;

struct LifTrace {
  std::vector<bool> spikes;
  std::vector<double> v;  // membrane potential after each step
};

LifTrace lif_run_trace(const LifParams& p, const std::vector<double>& currents);
std::vector<bool> lif_run(const LifParams& p, const std::vector<double>& currents);

/// Causal moving average of the spike indicator over `window` steps; the
/// history before n = 0 counts as silent.
std::vector<double> rate_decode(const std::vector<bool>& spikes, std::size_t window);

/// i_n = i_scale * max(0, x_n)
std::vector<double> rate_encode(const Trace& x, double i_scale);

/// CSV: `n,spike`
void write_spikes_csv(std::ostream& out, const std::vector<bool>& spikes);

/// Stateful wrapper used by the C API.
class LifNeuron {
public:
  explicit LifNeuron(const LifParams& p) : p_(p), s_(LifState::at_rest(p)) { p_.validate(); }

  bool step(double i_in) noexcept {
    const auto r = lif_step(s_, p_, i_in);
    s_ = r.state;
    return r.spiked;
  }
  void reset() noexcept { s_ = LifState::at_rest(p_); }

  const LifState& state() const noexcept { return s_; }
  const LifParams& params() const noexcept { return p_; }

private:
  LifParams p_;
  LifState s_;
};

}  // namespace neurodsp
