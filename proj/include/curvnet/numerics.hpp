#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "curvnet/errors.hpp"

namespace curvnet {

// Thomas algorithm, vector right-hand sides handled per component by the caller.
// a = sub-diagonal (a[0] unused), b = diagonal, c = super-diagonal (c[n-1] unused).
inline std::vector<double> solve_tridiagonal(std::vector<double> a,
                                             std::vector<double> b,
                                             std::vector<double> c,
                                             std::vector<double> d) {
  const size_t n = b.size();
  if (n == 0) return {};
  for (size_t i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1] / b[n - 1];
  for (size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
  return x;
}

// Cyclic tridiagonal system via the Sherman-Morrison correction.
// alpha couples row 0 to column n-1, beta couples row n-1 to column 0.
inline std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& a,
                                                    std::vector<double> b,
                                                    const std::vector<double>& c,
                                                    const std::vector<double>& d,
                                                    double alpha, double beta) {
  const size_t n = b.size();
  if (n < 3) throw InvalidArgument("cyclic tridiagonal needs n >= 3");
  const double gamma = -b[0];
  std::vector<double> bb = b;
  bb[0] -= gamma;
  bb[n - 1] -= alpha * beta / gamma;
  std::vector<double> x = solve_tridiagonal(a, bb, c, d);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  std::vector<double> z = solve_tridiagonal(a, bb, c, u);
  const double fact =
      (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
  for (size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
  return x;
}

// Dense Gaussian elimination with partial pivoting for the small Newton systems.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> A,
                                       std::vector<double> b) {
  const size_t n = b.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    if (std::fabs(A[piv][col]) < 1e-300) throw SolverFailed("singular matrix");
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (size_t r = col + 1; r < n; ++r) {
      const double w = A[r][col] / A[col][col];
      for (size_t cc = col; cc < n; ++cc) A[r][cc] -= w * A[col][cc];
      b[r] -= w * b[col];
    }
  }
  std::vector<double> x(n);
  for (size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (size_t j = i + 1; j < n; ++j) acc -= A[i][j] * x[j];
    x[i] = acc / A[i][i];
  }
  return x;
}

// Bracketed scalar root finding: secant acceleration with bisection fallback.
// f(lo) and f(hi) must have opposite signs.
inline double find_root(const std::function<double(double)>& f, double lo,
                        double hi, double tol, int max_iter = 200) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw SolverFailed("root not bracketed");
  double mid = lo;
  for (int it = 0; it < max_iter; ++it) {
    // secant trial, clipped into the bracket
    double trial = hi - fhi * (hi - lo) / (fhi - flo);
    if (!(trial > lo && trial < hi)) trial = 0.5 * (lo + hi);
    const double ft = f(trial);
    if (std::fabs(ft) < tol || hi - lo < 1e-15 * (1.0 + std::fabs(trial)))
      return trial;
    if ((ft > 0) == (flo > 0)) {
      lo = trial;
      flo = ft;
    } else {
      hi = trial;
      fhi = ft;
    }
    mid = trial;
  }
  return mid;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LineFit least_squares_line(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) throw InvalidArgument("need >= 2 points to fit");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (std::fabs(det) < 1e-300) throw SolverFailed("degenerate line fit");
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy * sxx - sx * sxy) / det;
  return fit;
}

}  // namespace curvnet
