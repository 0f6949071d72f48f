#include "neckmcl/iir.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "neckmcl/error.hpp"

namespace neckmcl::iir {

namespace {

void check_design(int order, double cutoff_hz, double sample_rate) {
  if (order <= 0 || order % 2 != 0) {
    throw Error(ErrorCode::InvalidInput, "butterworth: order must be even and positive");
  }
  if (!(sample_rate > 0.0) || !(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate / 2.0)) {
    throw Error(ErrorCode::InvalidInput, "butterworth: cutoff must lie in (0, fs/2)");
  }
}

// Q of each second-order factor of an even-order Butterworth polynomial.
std::vector<double> section_q(int order) {
  std::vector<double> q;
  for (int k = 0; k < order / 2; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + 1.0) / (2.0 * order);
    q.push_back(1.0 / (2.0 * std::cos(theta)));
  }
  return q;
}

struct State {
  double z1 = 0.0;
  double z2 = 0.0;
};

inline double step(const Biquad& s, State& st, double x) {
  const double y = s.b0 * x + st.z1;
  st.z1 = s.b1 * x - s.a1 * y + st.z2;
  st.z2 = s.b2 * x - s.a2 * y;
  return y;
}

// Steady-state section states for a constant unit input to the cascade.
std::vector<State> steady_state(const Sos& sos) {
  std::vector<State> zi(sos.size());
  double gain = 1.0;
  for (std::size_t k = 0; k < sos.size(); ++k) {
    const Biquad& s = sos[k];
    const double y = s.dc_gain();
    zi[k].z2 = gain * (s.b2 - s.a2 * y);
    zi[k].z1 = gain * (s.b1 + s.b2 - (s.a1 + s.a2) * y);
    gain *= y;
  }
  return zi;
}

void run(const Sos& sos, std::vector<State> state, std::vector<double>& x) {
  for (double& v : x) {
    double y = v;
    for (std::size_t k = 0; k < sos.size(); ++k) y = step(sos[k], state[k], y);
    v = y;
  }
}

std::vector<State> scaled(const std::vector<State>& zi, double x0) {
  std::vector<State> out = zi;
  for (State& s : out) {
    s.z1 *= x0;
    s.z2 *= x0;
  }
  return out;
}

}  // namespace

std::complex<double> Biquad::response(double freq_hz, double sample_rate) const {
  const std::complex<double> z1 = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / sample_rate);
  const std::complex<double> z2 = z1 * z1;
  return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
}

Sos butterworth_lowpass(int order, double cutoff_hz, double sample_rate) {
  check_design(order, cutoff_hz, sample_rate);
  const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate);
  Sos sos;
  for (double q : section_q(order)) {
    const double norm = 1.0 / (1.0 + k / q + k * k);
    Biquad s;
    s.b0 = k * k * norm;
    s.b1 = 2.0 * s.b0;
    s.b2 = s.b0;
    s.a1 = 2.0 * (k * k - 1.0) * norm;
    s.a2 = (1.0 - k / q + k * k) * norm;
    sos.push_back(s);
  }
  return sos;
}

Sos butterworth_highpass(int order, double cutoff_hz, double sample_rate) {
  check_design(order, cutoff_hz, sample_rate);
  const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate);
  Sos sos;
  for (double q : section_q(order)) {
    const double norm = 1.0 / (1.0 + k / q + k * k);
    Biquad s;
    s.b0 = norm;
    s.b1 = -2.0 * norm;
    s.b2 = norm;
    s.a1 = 2.0 * (k * k - 1.0) * norm;
    s.a2 = (1.0 - k / q + k * k) * norm;
    sos.push_back(s);
  }
  return sos;
}

Sos butterworth_bandpass(int order, double low_hz, double high_hz, double sample_rate) {
  if (order <= 0 || order % 4 != 0) {
    throw Error(ErrorCode::InvalidInput, "bandpass: order must be a positive multiple of 4");
  }
  if (!(low_hz > 0.0) || !(low_hz < high_hz) || !(high_hz < sample_rate / 2.0)) {
    throw Error(ErrorCode::InvalidInput, "bandpass: require 0 < low < high < fs/2");
  }
  Sos sos = butterworth_highpass(order / 2, low_hz, sample_rate);
  const Sos lp = butterworth_lowpass(order / 2, high_hz, sample_rate);
  sos.insert(sos.end(), lp.begin(), lp.end());
  return sos;
}

std::complex<double> response(const Sos& sos, double freq_hz, double sample_rate) {
  std::complex<double> h{1.0, 0.0};
  for (const Biquad& s : sos) h *= s.response(freq_hz, sample_rate);
  return h;
}

std::vector<double> filter(const Sos& sos, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  run(sos, std::vector<State>(sos.size()), y);
  return y;
}

std::vector<double> filtfilt(const Sos& sos, std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  if (n == 1) return {x[0] * std::abs(response(sos, 0.0, 1.0)) * std::abs(response(sos, 0.0, 1.0))};

  const std::size_t padlen = std::min<std::size_t>(3 * (2 * sos.size() + 1), n - 1);
  std::vector<double> ext;
  ext.reserve(n + 2 * padlen);
  for (std::size_t i = padlen; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= padlen; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const std::vector<State> zi = steady_state(sos);
  run(sos, scaled(zi, ext.front()), ext);
  std::reverse(ext.begin(), ext.end());
  run(sos, scaled(zi, ext.front()), ext);
  std::reverse(ext.begin(), ext.end());

  return {ext.begin() + static_cast<std::ptrdiff_t>(padlen),
          ext.begin() + static_cast<std::ptrdiff_t>(padlen + n)};
}

}  // namespace neckmcl::iir
