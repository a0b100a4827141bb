#include "sdg/isaacs.hpp"

#include <cmath>
#include <stdexcept>

namespace sdg {

double phi(const ControlAction& y, const ControlAction& z, const Vec& p,
           const Mat& S) {
  if (y.direction.size() != p.size() || z.direction.size() != p.size() ||
      S.rows() != p.size() || S.cols() != p.size())
    throw std::invalid_argument("phi: dimension mismatch");
  const Vec diff = y.direction - z.direction;
  const Vec sum = y.direction + z.direction;
  return -0.5 * diff.dot(S * diff) - (y.magnitude + z.magnitude) * sum.dot(p);
}

double lambda_analytic(const Vec& p, const Mat& S) {
  const double pn2 = p.squaredNorm();
  if (pn2 <= 0.0) throw std::invalid_argument("lambda_analytic: p must be nonzero");
  return p.dot(S * p) / pn2;
}

double psi(const FieldBundle& bundle, const ControlAction& y,
           const ControlAction& z) {
  return -bundle.h + phi(y, z, bundle.p, bundle.S);
}

std::vector<Vec> sphere_directions(int m, int n) {
  std::vector<Vec> dirs;
  if (m == 2) {
    if (n % 2 != 0) ++n;  // keep the set closed under negation
    dirs.reserve(n);
    for (int k = 0; k < n; ++k) {
      const double t = 2.0 * M_PI * k / n;
      Vec v(2);
      v << std::cos(t), std::sin(t);
      dirs.push_back(v);
    }
  } else if (m == 3) {
    // Fibonacci points on the upper half plus their antipodes.
    const int half = (n + 1) / 2;
    dirs.reserve(2 * half);
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int k = 0; k < half; ++k) {
      const double z = (k + 0.5) / half;  // (0,1]: strictly upper hemisphere
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double t = 2.0 * M_PI * k / golden;
      Vec v(3);
      v << r * std::cos(t), r * std::sin(t), z;
      dirs.push_back(v);
      dirs.push_back(-v);
    }
  } else {
    throw std::invalid_argument("sphere_directions: only m in {2,3} supported");
  }
  return dirs;
}

double supinf_phi_bruteforce(const Vec& p, const Mat& S,
                             const BruteForceOptions& opt) {
  const int m = static_cast<int>(p.size());
  if (m != 2 && m != 3)
    throw std::invalid_argument("supinf_phi_bruteforce: only m in {2,3}");
  if (p.norm() <= 0.0)
    throw std::invalid_argument("supinf_phi_bruteforce: p must be nonzero");

  auto dirs = sphere_directions(m, opt.n_dir);
  // Refine the mesh at +/- p/|p|.  The sup-inf error is otherwise first
  // order in the mesh spacing: an outer direction closer to -p/|p| than the
  // whole inner set cannot be punished by any discrete response, so the sup
  // harvests an O(spacing) gain.  With the pair included the set stays
  // closed under negation and the error returns to second order.
  const Vec pbar = p / p.norm();
  dirs.push_back(pbar);
  dirs.push_back(-pbar);
  const int n = static_cast<int>(dirs.size());

  // Precompute per-direction quantities.  For fixed b the inner value over
  // (a,c) with c in {0, d_max} is
  //   quad(a,b) - d*lin(a,b) - d_max*max(lin(a,b), 0),
  // quad(a,b) = -1/2 (a'Sa - 2 a'Sb + b'Sb), lin(a,b) = (a+b).p,
  // since phi is affine in c.
  std::vector<Vec> Sd(n);
  std::vector<double> dSd(n), dp(n);
  for (int i = 0; i < n; ++i) {
    Sd[i] = S * dirs[i];
    dSd[i] = dirs[i].dot(Sd[i]);
    dp[i] = dirs[i].dot(p);
  }

  double best_outer = -std::numeric_limits<double>::infinity();
  std::vector<double> quad(n), lin(n);
  for (int bi = 0; bi < n; ++bi) {
    for (int ai = 0; ai < n; ++ai) {
      quad[ai] = -0.5 * (dSd[ai] - 2.0 * dirs[ai].dot(Sd[bi]) + dSd[bi]);
      lin[ai] = dp[ai] + dp[bi];
    }
    for (double d : opt.d_grid) {
      double inner = std::numeric_limits<double>::infinity();
      for (int ai = 0; ai < n; ++ai) {
        const double v =
            quad[ai] - d * lin[ai] - opt.d_max * std::max(lin[ai], 0.0);
        inner = std::min(inner, v);
      }
      best_outer = std::max(best_outer, inner);
    }
  }
  return best_outer;
}

double lambda_supinf_bruteforce(const Vec& p, const Mat& S,
                                const BruteForceOptions& opt) {
  return -0.5 * supinf_phi_bruteforce(p, S, opt);
}

}  // namespace sdg
