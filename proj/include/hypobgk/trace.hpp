#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "hypobgk/core.hpp"

namespace hypobgk {

/// Least-squares slope of -log(values) against time, restricted to the
/// window where values stay above 1e-12 of the initial value, with the
/// first 10% of that window discarded (transient + floating-point floor).
inline Real fit_decay_rate(const Vec& times, const Vec& values) {
  if (times.size() != values.size()) throw std::invalid_argument("fit_decay_rate: size mismatch");
  const Real v0 = values.size() > 0 ? values[0] : 0.0;
  std::vector<int> window;
  for (int i = 0; i < values.size(); ++i) {
    if (values[i] > 1e-12 * v0 && values[i] > 0.0) window.push_back(i);
  }
  const int skip = static_cast<int>(0.1 * window.size());
  if (static_cast<int>(window.size()) - skip < 2) return 0.0;

  Real st = 0, sy = 0, stt = 0, sty = 0;
  int n = 0;
  for (std::size_t w = skip; w < window.size(); ++w) {
    const Real t = times[window[w]];
    const Real y = std::log(values[window[w]]);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++n;
  }
  const Real denom = n * stt - st * st;
  if (denom == 0.0) return 0.0;
  return -(n * sty - st * sy) / denom;
}

/// Entropy and entropy production sampled along a trajectory.
struct EntropyTrace {
  Vec times;
  Vec entropy;
  Vec production;
  Real fitted_rate = 0.0;
};

/// One sampled row of a kinetic simulation run.
struct TraceRow {
  Real t = 0;
  Real e = 0;
  Real e_gamma = 0;
  Real l2_norm = 0;
  Real sigma0 = 0;
  Real tau0 = 0;
};

inline void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "t,e,e_gamma,l2_norm,sigma0,tau0\n";
  for (const auto& r : rows) {
    out << format_double(r.t) << ',' << format_double(r.e) << ',' << format_double(r.e_gamma)
        << ',' << format_double(r.l2_norm) << ',' << format_double(r.sigma0) << ','
        << format_double(r.tau0) << '\n';
  }
}

inline void write_entropy_trace_csv(const std::string& path, const EntropyTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "t,e,fisher\n";
  for (int i = 0; i < trace.times.size(); ++i) {
    out << format_double(trace.times[i]) << ',' << format_double(trace.entropy[i]) << ','
        << format_double(trace.production[i]) << '\n';
  }
}

}  // namespace hypobgk
