#pragma once

// Test-only reference routines, kept independent of the library paths they
// check: naive triple-loop products, dense eigensolves through Eigen, and
// finite-difference derivative probes.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "nmr/linalg.hpp"
#include "nmr/problems.hpp"
#include "nmr/rng.hpp"

namespace oracles {

// Plain nested-loop dense matvec; deliberately not the kernel path.
inline nmr::Vector triple_loop_matvec(const nmr::DenseSymmetricMatrix& m,
                                      const nmr::Vector& x) {
  const int d = m.dim();
  nmr::Vector out(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += m(i, j) * x[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

inline double quadratic_form(const nmr::DenseSymmetricMatrix& m,
                             const nmr::Vector& x) {
  const int d = m.dim();
  double s = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      s += x[static_cast<std::size_t>(i)] * m(i, j) * x[static_cast<std::size_t>(j)];
  return s;
}

inline Eigen::MatrixXd to_eigen(const nmr::DenseSymmetricMatrix& m) {
  const int d = m.dim();
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = m(i, j);
  return a;
}

inline double lambda_min_dense(const nmr::DenseSymmetricMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(m));
  return es.eigenvalues()(0);
}

inline double lambda_max_abs_dense(const nmr::DenseSymmetricMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(m));
  const auto& ev = es.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

inline nmr::DenseSymmetricMatrix random_symmetric(int d, nmr::Rng& rng,
                                                  double scale = 1.0) {
  std::vector<double> entries(static_cast<std::size_t>(d) * d);
  for (auto& e : entries) e = scale * rng.normal();
  return nmr::DenseSymmetricMatrix(d, std::move(entries));
}

// Dense symmetric matrix with all eigenvalues shifted positive.
inline nmr::DenseSymmetricMatrix random_spd(int d, nmr::Rng& rng) {
  nmr::DenseSymmetricMatrix m = random_symmetric(d, rng);
  const double lmin = lambda_min_dense(m);
  nmr::DenseSymmetricMatrix out(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      out.set(i, j, m(i, j) + (i == j ? (0.5 - lmin) : 0.0));
  return out;
}

inline double central_diff_directional(const nmr::Problem& p, const nmr::Vector& x,
                                       const nmr::Vector& v, double h) {
  nmr::Vector xp = nmr::add_scaled(x, h, v);
  nmr::Vector xm = nmr::add_scaled(x, -h, v);
  return (p.f(xp) - p.f(xm)) / (2.0 * h);
}

inline nmr::Vector central_diff_hv(const nmr::Problem& p, const nmr::Vector& x,
                                   const nmr::Vector& v, double h) {
  nmr::Vector gp = p.grad(nmr::add_scaled(x, h, v));
  nmr::Vector gm = p.grad(nmr::add_scaled(x, -h, v));
  nmr::Vector out(gp.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (gp[i] - gm[i]) / (2.0 * h);
  return out;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline double rel_err_vec(const nmr::Vector& got, const nmr::Vector& want) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    num += (got[i] - want[i]) * (got[i] - want[i]);
    den += want[i] * want[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

}  // namespace oracles
