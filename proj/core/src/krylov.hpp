#pragma once

#include "homog/parallel.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace homog::detail {

using Vec = std::vector<double>;
using LinearMap = std::function<void(const Vec&, Vec&)>;

inline double dot(const Vec& a, const Vec& b) { return par::dot(a, b); }
inline double norm(const Vec& a) { return par::norm2(a); }

// y += a * x
inline void axpy(double a, const Vec& x, Vec& y) {
  const std::size_t n = y.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

struct KrylovResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

// Preconditioned CG for a symmetric positive (semi)definite operator. An
// optional projection keeps iterates out of a known kernel. Stops on the
// recursively updated residual ||r|| <= tol ||b||.
inline KrylovResult pcg(const LinearMap& apply, const LinearMap& precond, const Vec& b, Vec& x, double tol,
                        int max_iter, const std::function<void(Vec&)>& project = {}) {
  KrylovResult res;
  const std::size_t n = b.size();
  Vec r(n), z(n), p(n), q(n);
  apply(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  if (project) project(r);
  const double bnorm = norm(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }
  double rnorm = norm(r);
  if (rnorm <= tol * bnorm) {
    res.relative_residual = rnorm / bnorm;
    res.converged = true;
    return res;
  }
  precond(r, z);
  if (project) project(z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    apply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) {
      res.iterations = it;
      res.relative_residual = rnorm / bnorm;
      return res;
    }
    const double a = rz / pq;
    axpy(a, p, x);
    axpy(-a, q, r);
    if (project) project(r);
    rnorm = norm(r);
    res.iterations = it;
    res.relative_residual = rnorm / bnorm;
    if (rnorm <= tol * bnorm) {
      res.converged = true;
      return res;
    }
    precond(r, z);
    if (project) project(z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return res;
}

// Preconditioned MINRES for a symmetric (indefinite) operator with an SPD
// preconditioner. Stops when the preconditioned residual estimate drops
// below tol times its initial value.
inline KrylovResult minres(const LinearMap& apply, const LinearMap& precond, const Vec& b, Vec& x, double tol,
                           int max_iter) {
  KrylovResult res;
  const std::size_t n = b.size();
  Vec v_old(n, 0.0), v(n), v_new(n), z(n), z_new(n), w_old(n, 0.0), w(n, 0.0), w_new(n), az(n);
  apply(x, az);
  for (std::size_t i = 0; i < n; ++i) v[i] = b[i] - az[i];
  precond(v, z);
  double gamma = std::sqrt(std::max(dot(z, v), 0.0));
  if (gamma == 0.0) {
    res.converged = true;
    return res;
  }
  const double gamma0 = gamma;
  double gamma_old = 1.0;
  double eta = gamma;
  double s_old = 0.0, s = 0.0, c_old = 1.0, c = 1.0;
  for (int it = 1; it <= max_iter; ++it) {
    const double inv = 1.0 / gamma;
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) z[i] *= inv;
    apply(z, az);
    const double delta = dot(az, z);
    const double f1 = delta / gamma;
    const double f2 = gamma / gamma_old;
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) v_new[i] = az[i] - f1 * v[i] - f2 * v_old[i];
    precond(v_new, z_new);
    const double gamma_new = std::sqrt(std::max(dot(z_new, v_new), 0.0));
    const double a0 = c * delta - c_old * s * gamma;
    const double a1 = std::sqrt(a0 * a0 + gamma_new * gamma_new);
    const double a2 = s * delta + c_old * c * gamma;
    const double a3 = s_old * gamma;
    const double c_new = a0 / a1;
    const double s_new = gamma_new / a1;
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) w_new[i] = (z[i] - a3 * w_old[i] - a2 * w[i]) / a1;
    axpy(c_new * eta, w_new, x);
    eta = -s_new * eta;
    res.iterations = it;
    res.relative_residual = std::abs(eta) / gamma0;
    if (res.relative_residual <= tol || gamma_new == 0.0) {
      res.converged = true;
      return res;
    }
    std::swap(v_old, v);
    std::swap(v, v_new);
    std::swap(z, z_new);
    std::swap(w_old, w);
    std::swap(w, w_new);
    gamma_old = gamma;
    gamma = gamma_new;
    c_old = c;
    c = c_new;
    s_old = s;
    s = s_new;
  }
  return res;
}

}  // namespace homog::detail
