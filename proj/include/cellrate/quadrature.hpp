#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cellrate {

// Thrown when an iterative numeric routine fails to converge. The CLI maps
// this to exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr double kGk15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kGk15Weights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kG7Weights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
void gk15(F& f, double a, double b, double& kronrod, double& err) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(mid);
  double resk = fc * kGk15Weights[7];
  double resg = fc * kG7Weights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kGk15Nodes[i];
    const double fsum = f(mid - dx) + f(mid + dx);
    resk += fsum * kGk15Weights[i];
    if (i % 2 == 1) resg += fsum * kG7Weights[i / 2];
  }
  kronrod = resk * half;
  err = std::abs((resk - resg) * half);
}

template <class F>
double adapt(F& f, double a, double b, double tol, int depth) {
  double k, err;
  gk15(f, a, b, k, err);
  if (err <= tol || err <= 1e-15 * std::abs(k)) return k;
  if (depth >= 60)
    throw NumericError("adaptive quadrature did not converge (depth 60)");
  const double mid = 0.5 * (a + b);
  return adapt(f, a, mid, 0.5 * tol, depth + 1) +
         adapt(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of f over [a, b] to absolute tolerance.
template <class F>
double quadrature(F&& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  return detail::adapt(f, a, b, tol, 0);
}

// Integrates f over [a, inf) after the exponential substitution
// x = a - tail_scale*log(1-u), u in (0,1). tail_scale sets the resolved
// decay length of f's tail.
template <class F>
double quadrature_to_infinity(F&& f, double a, double tail_scale, double tol) {
  auto g = [&](double u) {
    const double x = a - tail_scale * std::log1p(-u);
    return f(x) * tail_scale / (1.0 - u);
  };
  return detail::adapt(g, 0.0, 1.0, tol, 0);
}

// Integrates tau^(-q) * g(tau) over (0, b] for q in (0,1). The substitution
// tau = u^(1/(1-q)) absorbs the endpoint singularity exactly:
// integral = 1/(1-q) * int_0^{b^{1-q}} g(u^{1/(1-q)}) du.
template <class F>
double quadrature_power_singularity(F&& g, double q, double b, double tol) {
  if (b <= 0.0) return 0.0;
  const double p = 1.0 / (1.0 - q);
  auto h = [&](double u) { return g(std::pow(u, p)); };
  const double umax = std::pow(b, 1.0 - q);
  return p * detail::adapt(h, 0.0, umax, tol * (1.0 - q), 0);
}

// Bracketed scalar root finding (Brent). Requires fa*fb <= 0.
template <class F>
double find_root_brent(F&& f, double a, double b, double fa, double fb,
                       double xtol_rel = 1e-15, int max_iter = 200) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw NumericError("find_root_brent: root not bracketed");
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                        0.5 * xtol_rel * std::abs(b);
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
  }
  throw NumericError("find_root_brent: max iterations exceeded");
}

}  // namespace cellrate
