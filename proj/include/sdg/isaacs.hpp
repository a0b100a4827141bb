#pragma once

#include <vector>

#include "sdg/problem.hpp"
#include "sdg/types.hpp"

namespace sdg {

// A point of the action set S^{m-1} x [0, inf).
struct ControlAction {
  Vec direction;     // unit vector
  double magnitude;  // nonnegative
};

// phi(a,b,c,d; p,S) = -1/2 (a-b)'S(a-b) - (c+d)(a+b).p
double phi(const ControlAction& y, const ControlAction& z, const Vec& p,
           const Mat& S);

// Lambda(p,S) = p'Sp / |p|^2
double lambda_analytic(const Vec& p, const Mat& S);

// psi(x,y,z) = -h(x) + phi(a,b,c,d; p(x), S(x))
double psi(const FieldBundle& bundle, const ControlAction& y,
           const ControlAction& z);

struct BruteForceOptions {
  int n_dir = 720;                               // directions per sphere
  std::vector<double> d_grid = {0.0, 1.0, 10.0, 100.0, 1000.0};
  double d_max = 1000.0;                         // truncation of [0,inf)
};

// sup over (b,d) of inf over (a,c) of phi, with both spheres discretized
// (m=2: uniform angles; m=3: antipodally symmetric Fibonacci set, both
// augmented with +/- p/|p|) and the magnitude rays truncated at d_max.
// Returns the raw sup-inf value, which equals -2 * Lambda(p,S) in the limit.
double supinf_phi_bruteforce(const Vec& p, const Mat& S,
                             const BruteForceOptions& opt = {});

// The sup-inf oracle on the Lambda scale: -1/2 * supinf_phi_bruteforce.
double lambda_supinf_bruteforce(const Vec& p, const Mat& S,
                                const BruteForceOptions& opt = {});

// Deterministic unit directions: uniform angular grid for m=2 (count rounded
// up to even), symmetrized Fibonacci-sphere set for m=3.  The set is closed
// under negation so the discretized game keeps its saddle structure.
std::vector<Vec> sphere_directions(int m, int n);

}  // namespace sdg
