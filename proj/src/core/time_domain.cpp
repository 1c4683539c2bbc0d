#include "neurodsp/time_domain.hpp"

#include <ostream>
#include <string>

#include "neurodsp/error.hpp"
#include "neurodsp/signals.hpp"

namespace neurodsp {

namespace {

void check_width(TimePulse p, const char* where) {
  if (!(p.width >= 0.0)) {
    fail(ErrorCode::OutOfRange, std::string(where) + ": pulse width must be >= 0");
  }
}

}  // namespace

void TimeClock::validate() const {
  require(t_clk > 0.0, ErrorCode::InvalidArgument, "time clock: T_clk must be > 0");
}

TimePulse time_register(TimePulse t_in, TimeClock clk) {
  clk.validate();
  check_width(t_in, "time_register");
  if (t_in.width > clk.t_clk) {
    fail(ErrorCode::OutOfRange, "time_register: T_in exceeds T_clk");
  }
  return {clk.t_clk - t_in.width};
}

TimePulse time_amplifier(TimePulse t_in, TimeClock clk, double gain) {
  clk.validate();
  check_width(t_in, "time_amplifier");
  require(gain > 0.0, ErrorCode::InvalidArgument, "time_amplifier: gain must be > 0");
  const double scaled = gain * t_in.width;
  if (scaled > clk.t_clk) {
    fail(ErrorCode::OutOfRange, "time_amplifier: a * T_in exceeds T_clk");
  }
  return {clk.t_clk - scaled};
}

TimePulse time_adder(std::span<const TimePulse> t_ins, TimeClock clk) {
  clk.validate();
  double sum = 0.0;
  for (const auto& p : t_ins) {
    check_width(p, "time_adder");
    sum += p.width;
  }
  if (sum > clk.t_clk) fail(ErrorCode::OutOfRange, "time_adder: sum of T_in exceeds T_clk");
  return {clk.t_clk - sum};
}

ZDelay::ZDelay(TimeClock clk, double gain) : clk_(clk), gain_(gain) {
  clk_.validate();
  require(gain > 0.0, ErrorCode::InvalidArgument, "z_delay: gain must be > 0");
}

TimePulse ZDelay::step(TimePulse t_in) {
  auto stage = [](int n, auto&& f) {
    try {
      return f();
    } catch (const Error& e) {
      fail(e.code(), "z_delay stage " + std::to_string(n) + ": " + e.what());
    }
  };
  // Second pair releases what was latched last cycle.
  const TimePulse out3 = stage(3, [&] { return time_register(held_, clk_); });
  const TimePulse out4 = stage(4, [&] { return time_register(out3, clk_); });
  const TimePulse out1 = stage(1, [&] { return time_amplifier(t_in, clk_, gain_); });
  held_ = stage(2, [&] { return time_register(out1, clk_); });
  return out4;
}

std::vector<TimePulse> z_delay(std::span<const TimePulse> pulses, TimeClock clk, double gain) {
  ZDelay cascade(clk, gain);
  std::vector<TimePulse> out;
  out.reserve(pulses.size());
  for (const auto& p : pulses) out.push_back(cascade.step(p));
  return out;
}

std::vector<CascadeRecord> z_delay_trace(std::span<const TimePulse> pulses, TimeClock clk,
                                         double gain) {
  const auto out = z_delay(pulses, clk, gain);
  std::vector<CascadeRecord> rows;
  rows.reserve(out.size());
  for (std::size_t k = 0; k < out.size(); ++k) rows.push_back({k, pulses[k].width, out[k].width});
  return rows;
}

void write_cascade_csv(std::ostream& out, std::span<const CascadeRecord> rows) {
  out << "k,width_in,width_out\n";
  for (const auto& r : rows) {
    out << r.k << ',' << format_sig9(r.width_in) << ',' << format_sig9(r.width_out) << '\n';
  }
}

}  // namespace neurodsp
