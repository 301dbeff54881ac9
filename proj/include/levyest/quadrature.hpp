#pragma once

#include <functional>

namespace levyest {
namespace quad {

//! Outcome of an adaptive quadrature run.
struct QuadResult {
  double value = 0.0;      //!< integral estimate
  double error = 0.0;      //!< absolute error estimate
  int intervals = 0;       //!< number of subintervals used
  bool converged = false;  //!< error estimate met the requested tolerance
};

//! Adaptive Gauss-Kronrod (7-15) integration over a finite interval.
//!
//! Deterministic for a given integrand: subdivision order depends only on
//! the error estimates, never on timing or addresses.
//!
//! @param f integrand, evaluated only at interior nodes.
//! @param a,b integration bounds, a < b.
//! @param abs_tol,rel_tol stop once error <= max(abs_tol, rel_tol*|value|).
//! @param max_intervals subdivision budget.
QuadResult integrate(const std::function<double(double)>& f, double a,
                     double b, double abs_tol = 1e-10, double rel_tol = 1e-10,
                     int max_intervals = 2000);

//! Integral of f over the whole real line.
//!
//! The line is split into [-1, 1] plus two tails mapped onto (0, 1] via
//! x = 1/t, so heavy (e.g. Cauchy) tails are integrated without truncation.
QuadResult integrate_line(const std::function<double(double)>& f,
                          double abs_tol = 1e-10, double rel_tol = 1e-10,
                          int max_intervals = 6000);

//! Composite trapezoid rule with n uniform panels (n + 1 evaluations).
double trapezoid(const std::function<double(double)>& f, double a, double b,
                 int n);

}  // namespace quad
}  // namespace levyest
