#include "orl/pointmass.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace orl {

double pm_clip(const PointMassSpec& p, double a) {
  return std::clamp(a, p.action_lo, p.action_hi);
}

Vec2 pm_reset(const PointMassSpec& p, Rng& rng) {
  return {rng.uniform(-p.init_pos, p.init_pos),
          rng.uniform(-p.init_vel, p.init_vel)};
}

PmStep pm_step(const PointMassSpec& p, const Vec2& s, double a, Rng& rng) {
  const double u = pm_clip(p, a);
  PmStep out;
  out.next[0] = p.a11 * s[0] + p.a12 * s[1] + p.b1 * u;
  out.next[1] = p.a21 * s[0] + p.a22 * s[1] + p.b2 * u;
  if (p.noise_std > 0.0) {
    out.next[0] += p.noise_std * rng.normal();
    out.next[1] += p.noise_std * rng.normal();
  }
  out.reward = -(p.state_cost * (s[0] * s[0] + s[1] * s[1]) +
                 p.action_cost * u * u);
  return out;
}

double expert_action(const PointMassSpec& p, const LinearGain& k,
                     const Vec2& s) {
  return pm_clip(p, -k.k1 * s[0] - k.k2 * s[1]);
}

double closed_loop_spectral_radius(const PointMassSpec& p,
                                   const LinearGain& k) {
  const double m11 = p.a11 - p.b1 * k.k1, m12 = p.a12 - p.b1 * k.k2;
  const double m21 = p.a21 - p.b2 * k.k1, m22 = p.a22 - p.b2 * k.k2;
  const double tr = m11 + m22, det = m11 * m22 - m12 * m21;
  const std::complex<double> disc =
      std::sqrt(std::complex<double>(tr * tr - 4.0 * det, 0.0));
  const std::complex<double> l1 = (tr + disc) / 2.0, l2 = (tr - disc) / 2.0;
  return std::max(std::abs(l1), std::abs(l2));
}

}  // namespace orl
