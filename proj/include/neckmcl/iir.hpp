#pragma once

#include <complex>
#include <span>
#include <vector>

namespace neckmcl::iir {

/// One second-order section, a0 normalised to 1. Direct form II transposed.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  std::complex<double> response(double freq_hz, double sample_rate) const;
  double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
};

using Sos = std::vector<Biquad>;

/// Butterworth sections via the bilinear transform with frequency prewarping.
/// Order must be even and positive.
Sos butterworth_lowpass(int order, double cutoff_hz, double sample_rate);
Sos butterworth_highpass(int order, double cutoff_hz, double sample_rate);
/// Highpass at `low` cascaded with lowpass at `high`; total order `order`
/// (a multiple of 4), split evenly between the two edges.
Sos butterworth_bandpass(int order, double low_hz, double high_hz, double sample_rate);

std::complex<double> response(const Sos& sos, double freq_hz, double sample_rate);

/// Causal single pass, zero initial state.
std::vector<double> filter(const Sos& sos, std::span<const double> x);

/// Zero-phase forward-backward filtering. Odd-reflection padding of
/// 3 * (2 * sections + 1) samples and steady-state initial conditions, the
/// same edge treatment as scipy.signal.sosfiltfilt.
std::vector<double> filtfilt(const Sos& sos, std::span<const double> x);

}  // namespace neckmcl::iir
