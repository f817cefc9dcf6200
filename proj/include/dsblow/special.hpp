#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace dsblow {

namespace quad {

/// Gauss-Legendre nodes and weights on [-1, 1], Newton iteration on the
/// Legendre recurrence.
void gauss_legendre(int q, std::vector<double>& nodes, std::vector<double>& weights);

/// Adaptive Simpson integration of f over [a, b] to the given relative
/// tolerance. Throws std::runtime_error when the refinement limit is hit.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol);

}  // namespace quad

/// Evaluation context for the positive eigenfunction
///   phi1(x) = integral over S^{n-1} of e^{x.omega} d omega,
/// which satisfies Lap(phi1) = phi1, and the decaying weights built from it:
///   psi1(t, x) = e^{-t} phi1(x),
///   psi2(t, x) = e^{-(n(p-1)H/(2p) + 1) t} phi1(x).
///
/// The angular integral reduces to |S^{n-2}| int_0^pi e^{r cos a} sin^{n-2}a da
/// and is evaluated by Gauss-Legendre quadrature of order q, doubled until two
/// consecutive orders agree. Immutable after construction; safe to share
/// across threads.
class TestFunctionContext {
 public:
  explicit TestFunctionContext(int n, int q = 64, double p = 2.0, double hubble = 0.0);

  int n() const { return n_; }
  int q() const { return q_; }
  double p() const { return p_; }
  double hubble() const { return hubble_; }

  /// phi1(r). Throws std::overflow_error for r > 700 where e^r overflows;
  /// use phi1_scaled there.
  double phi1(double r) const;

  /// e^{-r} phi1(r); stable for every r >= 0.
  double phi1_scaled(double r) const;

  double psi1(double t, double r) const;

  /// Requires hubble > 0 (throws std::domain_error otherwise) and p > 1.
  double psi2(double t, double r) const;

  /// n(p-1)H/(2p) + 1, the decay rate of psi2.
  double psi2_decay_rate() const;

 private:
  struct Rule {
    std::vector<double> cos_m1;  // cos(theta_k) - 1
    std::vector<double> weight;  // GL weight * sin^{n-2}(theta_k) * |S^{n-2}| * pi/2
  };

  int n_ = 3;
  int q_ = 64;
  double p_ = 2.0;
  double hubble_ = 0.0;
  std::vector<Rule> ladder_;
};

struct EigenResidual {
  double residual = 0.0;         // max FD defect, normalized by max |f|
  bool coarse_grid_warning = false;  // set when h > 0.1
};

/// Finite-difference defect of the radial eigenfunction identity
///   f'' + (n-1)/r f' - f = 0
/// measured with centered differences on the uniform grid
/// {r_lo, r_lo + h, ..., <= r_hi}, r_lo > 0. Returns the maximum interior
/// defect normalized by max |f| over the grid.
EigenResidual eigenfunction_residual(const std::function<double(double)>& f, double r_lo,
                                     double r_hi, double h, int n);

/// eigenfunction_residual applied to phi1 from the context.
EigenResidual verify_eigenfunction(double r_lo, double r_hi, double h,
                                   const TestFunctionContext& ctx);

/// integral over {|x| <= t+1} of psi1(t,x)^{p/(p-1)} dx, evaluated as
/// |S^{n-1}| int_0^{t+1} psi1(t,r)^{p/(p-1)} r^{n-1} dr by adaptive
/// quadrature in scaled form (no overflow for large t).
double psi1_cone_integral(double t, const TestFunctionContext& ctx);

/// phi1(r) r^{(n-1)/2} e^{-r}; approaches a constant as r grows
/// (2*pi for n = 3, sqrt(2*pi) for n = 2). Requires r > 0.
double asymptotic_constant(double r, const TestFunctionContext& ctx);

}  // namespace dsblow
