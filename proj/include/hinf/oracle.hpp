#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <thread>
#include <vector>

#include "hinf/certificate.hpp"
#include "hinf/state_space.hpp"
#include "hinf/types.hpp"

namespace hinf {

struct GridPeak {
  double theta_star = 0.0;
  double gain_star = 0.0;
};

struct VerifyResult {
  double power = 0.0;           // P_N, the final running average
  double relative_error = 0.0;  // |P_N - mu_opt| / max(1, mu_opt)
};

namespace detail {

inline int thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("HINF_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < hw)
      hw = static_cast<unsigned>(cap);
  }
  return static_cast<int>(hw);
}

/// Static index partition; results are merged by index, so the outcome does
/// not depend on the thread count.
inline void parallel_for(int count, const std::function<void(int)>& body) {
  const int threads = std::min(thread_budget(), std::max(1, count));
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < count; i += threads) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

/// Golden-section maximization of f on [a, b]; returns the best point among
/// all evaluations once the bracket shrinks below tol.
template <typename F>
GridPeak golden_max(F&& f, double a, double b, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  GridPeak best{a, f(a)};
  const double fb = f(b);
  if (fb > best.gain_star) best = {b, fb};

  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  if (f1 > best.gain_star) best = {x1, f1};
  if (f2 > best.gain_star) best = {x2, f2};
  return best;
}

}  // namespace detail

/// Independent ground truth for the band-restricted peak gain: a uniform
/// grid over the band's theta-range followed by golden-section refinement
/// around the most promising grid points. High bands are searched as two
/// segments; conjugate symmetry is never assumed.
inline GridPeak grid_norm(const StateSpace& sys, const FrequencyBand& band,
                          int grid_points = 4096, double refine_tol = 1e-8) {
  require_schur_stable(sys);
  if (grid_points < 64) throw InputError("grid_norm requires grid_points >= 64");

  const auto segments = band.canonical().segments();
  double total_len = 0.0;
  for (const auto& [a, b] : segments) total_len += b - a;

  struct Sample {
    double theta;
    double gain;
    int segment;
  };
  std::vector<Sample> samples;
  std::vector<std::pair<double, double>> seg_of;
  for (size_t s = 0; s < segments.size(); ++s) {
    const auto [a, b] = segments[s];
    int pts = std::max(
        2, static_cast<int>(std::lround(grid_points * (b - a) / total_len)));
    for (int i = 0; i < pts; ++i) {
      const double theta = a + (b - a) * i / (pts - 1);
      samples.push_back({theta, 0.0, static_cast<int>(s)});
    }
  }
  detail::parallel_for(static_cast<int>(samples.size()), [&](int i) {
    samples[static_cast<size_t>(i)].gain =
        gain(sys, samples[static_cast<size_t>(i)].theta);
  });

  // Candidate brackets: local maxima plus segment endpoints, best first.
  std::vector<size_t> candidates;
  for (size_t i = 0; i < samples.size(); ++i) {
    const bool left_edge = i == 0 || samples[i - 1].segment != samples[i].segment;
    const bool right_edge =
        i + 1 == samples.size() || samples[i + 1].segment != samples[i].segment;
    const bool up = left_edge || samples[i].gain >= samples[i - 1].gain;
    const bool down = right_edge || samples[i].gain >= samples[i + 1].gain;
    if (up && down) candidates.push_back(i);
  }
  std::sort(candidates.begin(), candidates.end(), [&](size_t a, size_t b) {
    if (samples[a].gain != samples[b].gain) return samples[a].gain > samples[b].gain;
    return a < b;
  });
  if (candidates.size() > 5) candidates.resize(5);

  GridPeak best{samples.front().theta, samples.front().gain};
  for (const auto& s : samples)
    if (s.gain > best.gain_star) best = {s.theta, s.gain};
  for (size_t idx : candidates) {
    const auto [seg_a, seg_b] = segments[static_cast<size_t>(samples[idx].segment)];
    double lo = idx > 0 && samples[idx - 1].segment == samples[idx].segment
                    ? samples[idx - 1].theta
                    : seg_a;
    double hi = idx + 1 < samples.size() &&
                        samples[idx + 1].segment == samples[idx].segment
                    ? samples[idx + 1].theta
                    : seg_b;
    const GridPeak refined = detail::golden_max(
        [&](double theta) { return gain(sys, theta); }, lo, hi, refine_tol);
    if (refined.gain_star > best.gain_star) best = refined;
  }
  return best;
}

/// Run the certificate's sinusoid through the plant and compare the achieved
/// running power average against the claimed mu_opt.
inline VerifyResult verify_certificate(const StateSpace& sys,
                                       const RankOneCertificate& cert,
                                       int steps) {
  if (std::abs(cert.w_opt.norm() - 1.0) > kCertificateTol)
    throw InputError("verify_certificate: ||w_opt|| must be 1");
  const std::vector<double> running =
      simulate(sys, Sinusoid(cert.w_opt, cert.theta_opt), steps);
  VerifyResult out;
  out.power = running.back();
  out.relative_error =
      std::abs(out.power - cert.mu_opt) / std::max(1.0, cert.mu_opt);
  return out;
}

}  // namespace hinf
