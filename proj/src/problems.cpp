#include "nmr/problems.hpp"

#include <omp.h>

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "nmr/rng.hpp"

namespace nmr {

Problem::Problem(std::string name, int dim, FFn f, GradFn grad, HessFn hess)
    : name_(std::move(name)),
      dim_(dim),
      f_(std::move(f)),
      grad_(std::move(grad)),
      hess_(std::move(hess)),
      counter_(std::make_shared<OracleCounter>()) {}

double Problem::f(const Vector& x) const {
  ++counter_->f_evals;
  return f_(x);
}

Vector Problem::grad(const Vector& x) const {
  ++counter_->g_evals;
  return grad_(x);
}

SymmetricOperator Problem::hessian_at(const Vector& x) const {
  auto fn = hess_(x);
  auto ctr = counter_;
  return SymmetricOperator(
      dim_, [fn = std::move(fn), ctr](std::span<const double> v, std::span<double> out) {
        ++ctr->hv_evals;
        fn(v, out);
      });
}

SyntheticDataset synthetic_dataset(int n, int d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw std::invalid_argument("synthetic_dataset: bad shape");
  SyntheticDataset ds;
  ds.n = n;
  ds.d = d;
  ds.seed = seed;
  ds.rows.resize(static_cast<std::size_t>(n) * d);
  ds.labels.resize(static_cast<std::size_t>(n));

  Rng rng(Rng::mix(seed, 0x5eedda7aull));
  // Unit-scale hidden model keeps the logistic responses away from
  // saturation, so the fitted problem stays well conditioned.
  Vector x_true(static_cast<std::size_t>(d));
  for (auto& c : x_true) c = rng.normal();

  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < n; ++i) {
    double z = 0.0;
    for (int j = 0; j < d; ++j) {
      const double a = scale * rng.normal();
      ds.rows[static_cast<std::size_t>(i) * d + j] = a;
      z += a * x_true[static_cast<std::size_t>(j)];
    }
    const double p = 1.0 / (1.0 + std::exp(-z));
    ds.labels[static_cast<std::size_t>(i)] = rng.uniform01() < p ? 1.0 : 0.0;
  }
  return ds;
}

void dataset_to_csv(const SyntheticDataset& ds, std::ostream& os) {
  char buf[32];
  for (int i = 0; i < ds.n; ++i) {
    os << (ds.labels[static_cast<std::size_t>(i)] != 0.0 ? 1 : 0);
    for (int j = 0; j < ds.d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g",
                    ds.rows[static_cast<std::size_t>(i) * ds.d + j]);
      os << ',' << buf;
    }
    os << '\n';
  }
}

SyntheticDataset dataset_from_csv(std::istream& is) {
  SyntheticDataset ds;
  std::string line;
  int d = -1;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.empty()) continue;
    if (d < 0) d = static_cast<int>(vals.size()) - 1;
    if (static_cast<int>(vals.size()) != d + 1)
      throw std::runtime_error("dataset_from_csv: ragged row");
    ds.labels.push_back(vals[0] != 0.0 ? 1.0 : 0.0);
    ds.rows.insert(ds.rows.end(), vals.begin() + 1, vals.end());
  }
  ds.d = std::max(d, 0);
  ds.n = static_cast<int>(ds.labels.size());
  return ds;
}

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Per-thread partial accumulation folded in thread order keeps the row
// reductions reproducible for a fixed thread count.
template <typename Body>
void parallel_rows(int n, int nt, const Body& body) {
#pragma omp parallel num_threads(nt)
  {
    const int tid = omp_get_thread_num();
    const int lo = static_cast<int>(static_cast<long long>(n) * tid / nt);
    const int hi = static_cast<int>(static_cast<long long>(n) * (tid + 1) / nt);
    body(tid, lo, hi);
  }
}

}  // namespace

Problem regularized_nlls(const SyntheticDataset& data, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("regularized_nlls: lambda < 0");
  auto ds = std::make_shared<SyntheticDataset>(data);
  const int n = ds->n;
  const int d = ds->d;
  const bool par = kernels::backend() == kernels::Backend::openmp &&
                   static_cast<std::size_t>(n) * d >= kernels::parallel_grain();
  const int nt = par ? omp_get_max_threads() : 1;

  auto margins = [ds, n, d, nt](const Vector& x, std::vector<double>& z) {
    z.resize(static_cast<std::size_t>(n));
    parallel_rows(n, nt, [&](int, int lo, int hi) {
      for (int i = lo; i < hi; ++i) {
        const double* row = ds->rows.data() + static_cast<std::size_t>(i) * d;
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += row[j] * x[static_cast<std::size_t>(j)];
        z[static_cast<std::size_t>(i)] = s;
      }
    });
  };

  auto f = [ds, n, d, nt, lambda, margins](const Vector& x) {
    std::vector<double> z;
    margins(x, z);
    std::vector<double> partial(static_cast<std::size_t>(nt), 0.0);
    parallel_rows(n, nt, [&](int tid, int lo, int hi) {
      double s = 0.0;
      for (int i = lo; i < hi; ++i) {
        const double e = ds->labels[static_cast<std::size_t>(i)] -
                         logistic(z[static_cast<std::size_t>(i)]);
        s += e * e;
      }
      partial[static_cast<std::size_t>(tid)] = s;
    });
    double loss = 0.0;
    for (double p : partial) loss += p;
    loss /= n;
    double reg = 0.0;
    for (int j = 0; j < d; ++j) {
      const double xj = x[static_cast<std::size_t>(j)];
      reg += xj * xj / (1.0 + xj * xj);
    }
    return loss + lambda * reg;
  };

  auto grad = [ds, n, d, nt, lambda, margins](const Vector& x) {
    std::vector<double> z;
    margins(x, z);
    std::vector<double> partial(static_cast<std::size_t>(nt) * d, 0.0);
    parallel_rows(n, nt, [&](int tid, int lo, int hi) {
      double* acc = partial.data() + static_cast<std::size_t>(tid) * d;
      for (int i = lo; i < hi; ++i) {
        const double sg = logistic(z[static_cast<std::size_t>(i)]);
        const double coef =
            -2.0 * (ds->labels[static_cast<std::size_t>(i)] - sg) * sg * (1.0 - sg);
        const double* row = ds->rows.data() + static_cast<std::size_t>(i) * d;
        for (int j = 0; j < d; ++j) acc[j] += coef * row[j];
      }
    });
    Vector g(static_cast<std::size_t>(d), 0.0);
    for (int t = 0; t < nt; ++t) {
      const double* acc = partial.data() + static_cast<std::size_t>(t) * d;
      for (int j = 0; j < d; ++j) g[static_cast<std::size_t>(j)] += acc[j];
    }
    for (int j = 0; j < d; ++j) g[static_cast<std::size_t>(j)] /= n;
    for (int j = 0; j < d; ++j) {
      const double xj = x[static_cast<std::size_t>(j)];
      const double den = 1.0 + xj * xj;
      g[static_cast<std::size_t>(j)] += lambda * 2.0 * xj / (den * den);
    }
    return g;
  };

  auto hess = [ds, n, d, nt, lambda, margins](const Vector& x) {
    // Row curvatures and the regularizer diagonal depend on x only; each
    // product then costs two passes over the data.
    auto coef = std::make_shared<std::vector<double>>(static_cast<std::size_t>(n));
    auto diag = std::make_shared<std::vector<double>>(static_cast<std::size_t>(d));
    std::vector<double> z;
    margins(x, z);
    for (int i = 0; i < n; ++i) {
      const double sg = logistic(z[static_cast<std::size_t>(i)]);
      const double sp = sg * (1.0 - sg);
      const double spp = sp * (1.0 - 2.0 * sg);
      const double e = ds->labels[static_cast<std::size_t>(i)] - sg;
      (*coef)[static_cast<std::size_t>(i)] = 2.0 * (sp * sp - e * spp);
    }
    for (int j = 0; j < d; ++j) {
      const double xj = x[static_cast<std::size_t>(j)];
      const double den = 1.0 + xj * xj;
      (*diag)[static_cast<std::size_t>(j)] =
          lambda * (2.0 - 6.0 * xj * xj) / (den * den * den);
    }
    return [ds, coef, diag, n, d, nt](std::span<const double> v,
                                      std::span<double> out) {
      std::vector<double> av(static_cast<std::size_t>(n));
      parallel_rows(n, nt, [&](int, int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
          const double* row = ds->rows.data() + static_cast<std::size_t>(i) * d;
          double s = 0.0;
          for (int j = 0; j < d; ++j) s += row[j] * v[static_cast<std::size_t>(j)];
          av[static_cast<std::size_t>(i)] = (*coef)[static_cast<std::size_t>(i)] * s;
        }
      });
      std::vector<double> partial(static_cast<std::size_t>(nt) * d, 0.0);
      parallel_rows(n, nt, [&](int tid, int lo, int hi) {
        double* acc = partial.data() + static_cast<std::size_t>(tid) * d;
        for (int i = lo; i < hi; ++i) {
          const double* row = ds->rows.data() + static_cast<std::size_t>(i) * d;
          const double c = av[static_cast<std::size_t>(i)];
          for (int j = 0; j < d; ++j) acc[j] += c * row[j];
        }
      });
      for (int j = 0; j < d; ++j) out[static_cast<std::size_t>(j)] = 0.0;
      for (int t = 0; t < nt; ++t) {
        const double* acc = partial.data() + static_cast<std::size_t>(t) * d;
        for (int j = 0; j < d; ++j) out[static_cast<std::size_t>(j)] += acc[j];
      }
      for (int j = 0; j < d; ++j) {
        out[static_cast<std::size_t>(j)] /= n;
        out[static_cast<std::size_t>(j)] += (*diag)[static_cast<std::size_t>(j)] *
                                            v[static_cast<std::size_t>(j)];
      }
    };
  };

  std::ostringstream name;
  name << "nlls_n" << n << "_d" << d << "_s" << ds->seed;
  Problem p(name.str(), d, f, grad, hess);
  p.known_optimum = KnownOptimum{0.0, "loss bounded below by 0"};
  return p;
}

Problem rosenbrock(int d) {
  if (d < 2) throw std::invalid_argument("rosenbrock: d must be >= 2");
  auto f = [d](const Vector& x) {
    double s = 0.0;
    for (int i = 0; i + 1 < d; ++i) {
      const double a = x[static_cast<std::size_t>(i) + 1] -
                       x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
      const double b = 1.0 - x[static_cast<std::size_t>(i)];
      s += 100.0 * a * a + b * b;
    }
    return s;
  };
  auto grad = [d](const Vector& x) {
    Vector g(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i + 1 < d; ++i) {
      const double xi = x[static_cast<std::size_t>(i)];
      const double xn = x[static_cast<std::size_t>(i) + 1];
      const double a = xn - xi * xi;
      g[static_cast<std::size_t>(i)] += -400.0 * xi * a - 2.0 * (1.0 - xi);
      g[static_cast<std::size_t>(i) + 1] += 200.0 * a;
    }
    return g;
  };
  auto hess = [d](const Vector& x) {
    auto xs = std::make_shared<Vector>(x);
    return [xs, d](std::span<const double> v, std::span<double> out) {
      for (int i = 0; i < d; ++i) out[static_cast<std::size_t>(i)] = 0.0;
      for (int i = 0; i + 1 < d; ++i) {
        const double xi = (*xs)[static_cast<std::size_t>(i)];
        const double xn = (*xs)[static_cast<std::size_t>(i) + 1];
        const double hii = 1200.0 * xi * xi - 400.0 * xn + 2.0;
        const double hin = -400.0 * xi;
        out[static_cast<std::size_t>(i)] +=
            hii * v[static_cast<std::size_t>(i)] + hin * v[static_cast<std::size_t>(i) + 1];
        out[static_cast<std::size_t>(i) + 1] +=
            hin * v[static_cast<std::size_t>(i)] + 200.0 * v[static_cast<std::size_t>(i) + 1];
      }
    };
  };
  Problem p("rosenbrock_d" + std::to_string(d), d, f, grad, hess);
  p.known_optimum = KnownOptimum{0.0, "minimum at the all-ones point"};
  return p;
}

Problem quartic_saddle(int d) {
  if (d < 2) throw std::invalid_argument("quartic_saddle: d must be >= 2");
  auto f = [d](const Vector& x) {
    const double x0 = x[0];
    double s = 0.25 * x0 * x0 * x0 * x0 - 0.5 * x0 * x0;
    for (int i = 1; i < d; ++i)
      s += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    return s;
  };
  auto grad = [d](const Vector& x) {
    Vector g(static_cast<std::size_t>(d));
    g[0] = x[0] * x[0] * x[0] - x[0];
    for (int i = 1; i < d; ++i)
      g[static_cast<std::size_t>(i)] = 2.0 * x[static_cast<std::size_t>(i)];
    return g;
  };
  auto hess = [d](const Vector& x) {
    const double h00 = 3.0 * x[0] * x[0] - 1.0;
    return [h00, d](std::span<const double> v, std::span<double> out) {
      out[0] = h00 * v[0];
      for (int i = 1; i < d; ++i)
        out[static_cast<std::size_t>(i)] = 2.0 * v[static_cast<std::size_t>(i)];
    };
  };
  Problem p("quartic_saddle_d" + std::to_string(d), d, f, grad, hess);
  p.known_optimum = KnownOptimum{-0.25, "minima at x0 = +-1, rest zero"};
  return p;
}

namespace {

// Seeded random orthogonal factor via QR of a Gaussian matrix.
Eigen::MatrixXd random_orthogonal(int d, Rng& rng) {
  Eigen::MatrixXd G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ();
  return Q;
}

Problem dense_quadratic_problem(std::string name, const Eigen::MatrixXd& A,
                                const Eigen::VectorXd& b) {
  const int d = static_cast<int>(A.rows());
  auto As = std::make_shared<Eigen::MatrixXd>(A);
  auto bs = std::make_shared<Eigen::VectorXd>(b);
  auto f = [As, bs](const Vector& x) {
    Eigen::Map<const Eigen::VectorXd> xe(x.data(), static_cast<long>(x.size()));
    return 0.5 * xe.dot(*As * xe) - bs->dot(xe);
  };
  auto grad = [As, bs, d](const Vector& x) {
    Eigen::Map<const Eigen::VectorXd> xe(x.data(), static_cast<long>(x.size()));
    Eigen::VectorXd ge = *As * xe - *bs;
    return Vector(ge.data(), ge.data() + d);
  };
  auto hess = [As, d](const Vector&) {
    return [As, d](std::span<const double> v, std::span<double> out) {
      Eigen::Map<const Eigen::VectorXd> ve(v.data(), d);
      Eigen::Map<Eigen::VectorXd> oe(out.data(), d);
      oe = *As * ve;
    };
  };
  return Problem(std::move(name), d, f, grad, hess);
}

}  // namespace

Problem convex_quadratic(int d, std::uint64_t seed) {
  Rng rng(Rng::mix(seed, 0xc0ffeeull));
  Eigen::MatrixXd Q = random_orthogonal(d, rng);
  Eigen::VectorXd lam(d);
  for (int i = 0; i < d; ++i)
    lam(i) = 1.0 + (10.0 - 1.0) * i / std::max(d - 1, 1);
  Eigen::MatrixXd A = Q * lam.asDiagonal() * Q.transpose();
  Eigen::VectorXd b(d);
  for (int i = 0; i < d; ++i) b(i) = rng.normal();
  Problem p = dense_quadratic_problem("convex_quadratic_d" + std::to_string(d), A, b);
  const Eigen::VectorXd xstar = A.ldlt().solve(b);
  p.known_optimum = KnownOptimum{0.5 * xstar.dot(A * xstar) - b.dot(xstar),
                                 "unique minimizer of the quadratic"};
  return p;
}

Problem indefinite_quartic(int d, std::uint64_t seed, double gamma) {
  if (gamma <= 0.0) throw std::invalid_argument("indefinite_quartic: gamma <= 0");
  Rng rng(Rng::mix(seed, 0x1def1ull));
  Eigen::MatrixXd Q = random_orthogonal(d, rng);
  Eigen::VectorXd lam(d);
  for (int i = 0; i < d; ++i)
    lam(i) = -2.0 + 5.0 * i / std::max(d - 1, 1);  // spans [-2, 3]
  Eigen::MatrixXd A = Q * lam.asDiagonal() * Q.transpose();
  auto As = std::make_shared<Eigen::MatrixXd>(A);

  auto f = [As, gamma](const Vector& x) {
    Eigen::Map<const Eigen::VectorXd> xe(x.data(), static_cast<long>(x.size()));
    const double n2 = xe.squaredNorm();
    return 0.5 * xe.dot(*As * xe) + 0.25 * gamma * n2 * n2;
  };
  auto grad = [As, gamma, d](const Vector& x) {
    Eigen::Map<const Eigen::VectorXd> xe(x.data(), static_cast<long>(x.size()));
    Eigen::VectorXd ge = *As * xe + gamma * xe.squaredNorm() * xe;
    return Vector(ge.data(), ge.data() + d);
  };
  auto hess = [As, gamma, d](const Vector& x) {
    auto xs = std::make_shared<Eigen::VectorXd>(
        Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<long>(x.size())));
    const double n2 = xs->squaredNorm();
    return [As, xs, gamma, n2, d](std::span<const double> v, std::span<double> out) {
      Eigen::Map<const Eigen::VectorXd> ve(v.data(), d);
      Eigen::Map<Eigen::VectorXd> oe(out.data(), d);
      oe = *As * ve + gamma * (n2 * ve + 2.0 * xs->dot(ve) * *xs);
    };
  };
  Problem p("indefinite_quartic_d" + std::to_string(d), d, f, grad, hess);
  const double lmin = lam(0);
  p.known_optimum =
      KnownOptimum{-lmin * lmin / (4.0 * gamma), "on the most negative eigvec axis"};
  return p;
}

std::vector<Problem> analytic_suite() {
  std::vector<Problem> out;
  out.push_back(rosenbrock(2));
  out.push_back(rosenbrock(10));
  out.push_back(quartic_saddle(2));
  out.push_back(indefinite_quartic(6, 7));
  out.push_back(convex_quadratic(10, 11));
  return out;
}

PlantedInstance planted_spectrum_instance(const std::vector<double>& eigenvalues,
                                          const std::vector<double>& weights,
                                          int d, std::uint64_t seed,
                                          bool identity_rotation) {
  const int k = static_cast<int>(eigenvalues.size());
  if (static_cast<int>(weights.size()) != k)
    throw std::invalid_argument("planted_spectrum_instance: weights size mismatch");
  if (k > d)
    throw std::invalid_argument("planted_spectrum_instance: more eigenvalues than d");
  double wsum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("planted_spectrum_instance: negative weight");
    wsum += w;
  }
  if (wsum <= 0.0)
    throw std::invalid_argument("planted_spectrum_instance: weights sum to zero");

  Rng rng(Rng::mix(seed, 0x9a55edull));
  Eigen::VectorXd lam(d);
  for (int i = 0; i < k; ++i) lam(i) = eigenvalues[static_cast<std::size_t>(i)];
  // Distinct positive padding away from planted values.
  for (int i = k; i < d; ++i) {
    double cand;
    bool ok;
    do {
      cand = rng.uniform(3.0, 5.0);
      ok = true;
      for (int j = 0; j < i; ++j)
        if (std::abs(lam(j) - cand) < 1e-3) { ok = false; break; }
    } while (!ok);
    lam(i) = cand;
  }

  Eigen::MatrixXd Q =
      identity_rotation ? Eigen::MatrixXd::Identity(d, d) : random_orthogonal(d, rng);
  Eigen::MatrixXd H = Q * lam.asDiagonal() * Q.transpose();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < k; ++i) w(i) = std::sqrt(weights[static_cast<std::size_t>(i)]);
  Eigen::VectorXd g = Q * w;

  std::vector<double> entries(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) entries[static_cast<std::size_t>(i) * d + j] = H(i, j);
  return PlantedInstance{DenseSymmetricMatrix(d, std::move(entries)),
                         Vector(g.data(), g.data() + d)};
}

}  // namespace nmr
