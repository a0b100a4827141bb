#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sdg/geometry.hpp"
#include "sdg/types.hpp"

namespace sdg {

// All pointwise PDE quantities at a state x.
struct FieldBundle {
  Vec x;
  Vec p;          // Du(x)
  double p_norm;  // |Du|
  Vec p_bar;      // Du/|Du|
  Mat S;          // D^2 u(x)
  double inf_lap; // p_bar' S p_bar
  Vec q;          // (S p - inf_lap * p) / |p|^2
  double h;       // -2 * inf_lap
};

using ScalarField = std::function<double(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;
using MatrixField = std::function<Mat(const Vec&)>;

// A manufactured PDE instance: u is chosen with exact derivative evaluators,
// h := -2*inf_lap(u) and g := u restricted to the boundary, so u is an exact
// classical solution.  Immutable; field evaluation is pure.
class ProblemSpec {
 public:
  const std::string& name() const { return name_; }
  const Domain& domain() const { return domain_; }

  double u(const Vec& x) const { return u_eval_(x); }
  Vec grad(const Vec& x) const { return grad_eval_(x); }
  Mat hess(const Vec& x) const { return hess_eval_(x); }
  double g(const Vec& x) const { return u_eval_(x); }  // boundary data
  double h(const Vec& x) const;

  double h_sign() const { return h_sign_; }
  double h_lower_bound() const { return h_lower_; }   // underline-h
  double c0() const { return c0_; }
  double c1() const { return 4.0 * c0_ / h_lower_; }
  double lip_pbar_estimate() const { return lip_pbar_; }

  FieldBundle fields(const Vec& x) const;
  double pde_residual(const Vec& x) const;

  friend ProblemSpec manufacture(std::string name, Domain domain,
                                 ScalarField u, VectorField grad,
                                 MatrixField hess);

 private:
  ProblemSpec(Domain d) : domain_(std::move(d)) {}

  std::string name_;
  Domain domain_;
  ScalarField u_eval_;
  VectorField grad_eval_;
  MatrixField hess_eval_;
  double h_sign_ = 0.0;
  double h_lower_ = 0.0;
  double c0_ = 0.0;
  double lip_pbar_ = 0.0;
};

// Validates Du != 0 and the constant-sign condition on h over a fixed
// 10^4-point Halton grid, then freezes h_lower and c0 from grid extrema.
// Throws std::invalid_argument when the candidate u is rejected.
ProblemSpec manufacture(std::string name, Domain domain, ScalarField u,
                        VectorField grad, MatrixField hess);

struct AuditReport {
  int grid_size = 0;
  double max_grad_error = 0.0;   // vs central differences, step 1e-5
  double max_hess_error = 0.0;
  double lip_pbar_estimate = 0.0;  // grid lower bound, not certified
  bool grad_pass = false;          // max_grad_error <= 1e-6
  bool hess_pass = false;          // max_hess_error <= 1e-4
  bool pass() const { return grad_pass && hess_pass; }
};

// Independent finite-difference oracle for the supplied derivative
// evaluators.
AuditReport finite_difference_audit(const ProblemSpec& spec, int grid_size);

// Deterministic Halton-style quasi-random points in the closure of G.
std::vector<Vec> halton_grid(const Domain& domain, int n);

// Built-in catalogue.
ProblemSpec make_ms1();     // u = x^2/2 + y on ball((2,0),1); h < 0
ProblemSpec make_ms2();     // u = -(x^2/2 + y); h > 0
ProblemSpec make_ms1_3d();  // 3-d variant on ball((2,0,0),1)
ProblemSpec spec_by_name(const std::string& name);
std::vector<std::string> catalogue_names();

}  // namespace sdg
