#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "util.hpp"

namespace aetas::linalg {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw NumericError("matrix multiply: shape mismatch");
  Matrix out(a.rows(), b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double mx = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    mx = std::max(mx, std::abs(a.data()[i] - b.data()[i]));
  return mx;
}

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double cosine(std::span<const double> a, std::span<const double> b) {
  double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw NumericError("cosine of zero vector");
  double c = dot(a, b) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

namespace {

// One-sided Jacobi on the columns of a (m x n, m >= n), accumulating the
// rotations into v. On exit the columns of a are u_j * sigma_j.
void jacobi_sweep_svd(Matrix& a, Matrix& v) {
  const std::size_t n = a.cols();
  const std::size_t m = a.rows();
  const double eps = 1e-15;
  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          double ap = a(i, p), aq = a(i, q);
          alpha += ap * ap;
          beta += aq * aq;
          gamma += ap * aq;
        }
        double denom = std::sqrt(alpha * beta);
        if (denom == 0.0 || std::abs(gamma) <= eps * denom) continue;
        off = std::max(off, std::abs(gamma) / denom);
        double zeta = (beta - alpha) / (2.0 * gamma);
        double t = std::copysign(1.0, zeta) /
                   (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          double ap = a(i, p), aq = a(i, q);
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (off == 0.0) return;
  }
  throw NumericError("svd: Jacobi sweeps did not converge");
}

// Fills zero-norm columns of u with unit vectors orthogonal to the others so
// u keeps orthonormal columns even for rank-deficient inputs.
void complete_orthonormal(Matrix& u, const std::vector<bool>& zero_col) {
  const std::size_t m = u.rows(), n = u.cols();
  for (std::size_t j = 0; j < n; ++j) {
    if (!zero_col[j]) continue;
    for (std::size_t basis = 0; basis < m; ++basis) {
      std::vector<double> cand(m, 0.0);
      cand[basis] = 1.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == j) continue;
        double d = 0.0;
        for (std::size_t i = 0; i < m; ++i) d += cand[i] * u(i, k);
        for (std::size_t i = 0; i < m; ++i) cand[i] -= d * u(i, k);
      }
      double nn = 0.0;
      for (double x : cand) nn += x * x;
      nn = std::sqrt(nn);
      if (nn > 1e-6) {
        for (std::size_t i = 0; i < m; ++i) u(i, j) = cand[i] / nn;
        break;
      }
    }
  }
}

SvdResult svd_tall(const Matrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  Matrix a = m;
  Matrix v = Matrix::identity(cols);
  jacobi_sweep_svd(a, v);

  std::vector<double> sigma(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += a(i, j) * a(i, j);
    sigma[j] = std::sqrt(s);
  }

  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  SvdResult out;
  out.u = Matrix(rows, cols);
  out.v = Matrix(cols, cols);
  out.sigma.resize(cols);
  double smax = sigma.empty() ? 0.0 : sigma[order[0]];
  std::vector<bool> zero_col(cols, false);
  for (std::size_t j = 0; j < cols; ++j) {
    std::size_t src = order[j];
    out.sigma[j] = sigma[src];
    bool zero = sigma[src] <= smax * 1e-300 || sigma[src] == 0.0;
    zero_col[j] = zero;
    for (std::size_t i = 0; i < rows; ++i)
      out.u(i, j) = zero ? 0.0 : a(i, src) / sigma[src];
    for (std::size_t i = 0; i < cols; ++i) out.v(i, j) = v(i, src);
  }
  complete_orthonormal(out.u, zero_col);
  return out;
}

}  // namespace

SvdResult svd(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) throw NumericError("svd: empty matrix");
  if (!m.all_finite()) throw NumericError("svd: non-finite entries");
  if (m.rows() >= m.cols()) return svd_tall(m);
  SvdResult t = svd_tall(transpose(m));
  return SvdResult{std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

Matrix pca_project(const Matrix& points, std::size_t k) {
  const std::size_t n = points.rows(), d = points.cols();
  if (n < 2) throw DataError("pca_project: need at least 2 points");
  if (k == 0 || k > std::min(n, d))
    throw DataError("pca_project: k=" + std::to_string(k) + " exceeds min(n, dim)");

  Matrix centered(n, d);
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += points(i, j);
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) centered(i, j) = points(i, j) - mean;
  }

  SvdResult s = svd(centered);
  Matrix proj(n, k);
  for (std::size_t comp = 0; comp < k; ++comp) {
    // Sign convention: largest-magnitude loading positive.
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double mag = std::abs(s.v(i, comp));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    double sign = (s.v(arg, comp) < 0.0) ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) acc += centered(i, j) * s.v(j, comp);
      proj(i, comp) = sign * acc;
    }
  }
  return proj;
}

RegressionResult ols(const std::vector<double>& y, const Matrix& design) {
  const std::size_t n = design.rows(), p = design.cols();
  if (y.size() != n) throw DataError("ols: response length mismatch");
  if (n <= p) throw DataError("ols: need more observations than parameters");

  SvdResult s = svd(design);
  double smax = s.sigma.empty() ? 0.0 : s.sigma[0];
  for (double sv : s.sigma)
    if (sv <= smax * 1e-10)
      throw DataError("ols: rank-deficient design matrix");

  // beta = V diag(1/sigma) U^T y
  std::vector<double> uty(p, 0.0);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < n; ++i) uty[j] += s.u(i, j) * y[i];
  RegressionResult res;
  res.coefficients.assign(p, 0.0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      res.coefficients[i] += s.v(i, j) * uty[j] / s.sigma[j];

  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double fit = dot(design.row(i), res.coefficients);
    double r = y[i] - fit;
    rss += r * r;
  }
  double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double tss = 0.0;
  for (double yi : y) tss += (yi - mean_y) * (yi - mean_y);

  res.dof = n - p;
  double sigma2 = rss / static_cast<double>(res.dof);
  res.r_squared = (tss > 0.0) ? 1.0 - rss / tss : 0.0;
  if (res.r_squared < 0.0) res.r_squared = 0.0;

  // (X^T X)^{-1} diagonal from V diag(1/sigma^2) V^T.
  res.std_errors.assign(p, 0.0);
  res.t_stats.assign(p, 0.0);
  res.p_values.assign(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    double xtx_inv_ii = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      double vij = s.v(i, j);
      xtx_inv_ii += vij * vij / (s.sigma[j] * s.sigma[j]);
    }
    res.std_errors[i] = std::sqrt(sigma2 * xtx_inv_ii);
    if (res.std_errors[i] > 0.0) {
      res.t_stats[i] = res.coefficients[i] / res.std_errors[i];
      double tabs = std::abs(res.t_stats[i]);
      res.p_values[i] = incomplete_beta(
          static_cast<double>(res.dof) / 2.0, 0.5,
          static_cast<double>(res.dof) /
              (static_cast<double>(res.dof) + tabs * tabs));
    } else if (res.coefficients[i] == 0.0) {
      res.t_stats[i] = 0.0;
      res.p_values[i] = 1.0;
    } else {
      // Exact fit: the coefficient is infinitely many (zero-width) standard
      // errors away from zero.
      res.t_stats[i] = std::copysign(std::numeric_limits<double>::infinity(),
                                     res.coefficients[i]);
      res.p_values[i] = 0.0;
    }
  }
  return res;
}

namespace {

// Continued fraction for the incomplete beta (Lentz's method).
double betacf(double a, double b, double x) {
  const int max_iter = 300;
  const double eps = 1e-15, fpmin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw NumericError("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log(1.0 - x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
  double x = dof / (dof + t * t);
  double tail = 0.5 * incomplete_beta(dof / 2.0, 0.5, x);
  return (t >= 0.0) ? 1.0 - tail : tail;
}

}  // namespace aetas::linalg
