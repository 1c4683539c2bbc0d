#pragma once

// Time-mode (pulse-width) arithmetic. Widths are seconds; every produced
// width lies in [0, T_clk]. Inputs that would fully discharge the storage
// capacitor early are rejected rather than clamped.

#include <iosfwd>
#include <span>
#include <vector>

namespace neurodsp {

struct TimePulse {
  double width = 0.0;

  friend bool operator==(TimePulse, TimePulse) = default;
};

struct TimeClock {
  static constexpr double kDuty = 0.25;  // SET pulse duty cycle
  double t_clk = 0.0;

  void validate() const;
};

/// T_out = T_clk - T_in
TimePulse time_register(TimePulse t_in, TimeClock clk);
/// T_out = T_clk - a T_in, a = W_b2 / W_b1
TimePulse time_amplifier(TimePulse t_in, TimeClock clk, double gain);
/// T_out = T_clk - sum T_in
TimePulse time_adder(std::span<const TimePulse> t_ins, TimeClock clk);

struct CascadeRecord {
  std::size_t k = 0;
  double width_in = 0.0;
  double width_out = 0.0;
};

/// Four time registers in series (AMP-TR with gain a, TR, AMP-TR with gain 1,
/// TR). The two complement pairs cancel, so the output at cycle k is
/// a * T_in(k - 1); the first output is 0.
class ZDelay {
public:
  ZDelay(TimeClock clk, double gain = 1.0);

  /// Feeds T_in(k) and returns T_out(k).
  TimePulse step(TimePulse t_in);
  /// Output of the next cycle without consuming an input.
  TimePulse pending() const noexcept { return held_; }
  void reset() noexcept { held_ = {}; }

private:
  TimeClock clk_;
  double gain_;
  TimePulse held_{};  // OUT2 latched for the second pair
};

std::vector<TimePulse> z_delay(std::span<const TimePulse> pulses, TimeClock clk,
                               double gain = 1.0);
std::vector<CascadeRecord> z_delay_trace(std::span<const TimePulse> pulses, TimeClock clk,
                                         double gain = 1.0);

/// CSV: `k,width_in,width_out`
void write_cascade_csv(std::ostream& out, std::span<const CascadeRecord> rows);

}  // namespace neurodsp
