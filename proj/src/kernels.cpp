#include "nmr/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <vector>

namespace nmr::kernels {

namespace {
Backend g_backend = Backend::openmp;
std::size_t g_grain = 1u << 14;

bool use_parallel(std::size_t n) {
  return g_backend == Backend::openmp && n >= g_grain;
}
}  // namespace

Backend backend() { return g_backend; }
void set_backend(Backend b) { g_backend = b; }
std::size_t parallel_grain() { return g_grain; }
void set_parallel_grain(std::size_t n) { g_grain = n; }

namespace serial {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double nrm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scal(double a, std::span<double> x) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] *= a;
}

void combine(double a, std::span<const double> x, double b,
             std::span<const double> y, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
}

void symv(std::span<const double> m, int d, std::span<const double> x,
          std::span<double> out) {
  for (int i = 0; i < d; ++i) {
    const double* row = m.data() + static_cast<std::size_t>(i) * d;
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += row[j] * x[j];
    out[i] = s;
  }
}

}  // namespace serial

namespace openmp {

// Reductions accumulate one partial per thread and fold them in thread
// order; the result is identical from run to run for a fixed thread count.
double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const int nt = omp_get_max_threads();
  std::vector<double> partial(static_cast<std::size_t>(nt), 0.0);
#pragma omp parallel num_threads(nt)
  {
    const int tid = omp_get_thread_num();
    const std::size_t lo = n * static_cast<std::size_t>(tid) / nt;
    const std::size_t hi = n * (static_cast<std::size_t>(tid) + 1) / nt;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
    partial[static_cast<std::size_t>(tid)] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

double nrm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal(double a, std::span<double> x) {
  const std::size_t n = x.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void combine(double a, std::span<const double> x, double b,
             std::span<const double> y, std::span<double> out) {
  const std::size_t n = x.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void symv(std::span<const double> m, int d, std::span<const double> x,
          std::span<double> out) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < d; ++i) {
    const double* row = m.data() + static_cast<std::size_t>(i) * d;
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += row[j] * x[j];
    out[i] = s;
  }
}

}  // namespace openmp

double dot(std::span<const double> x, std::span<const double> y) {
  return use_parallel(x.size()) ? openmp::dot(x, y) : serial::dot(x, y);
}

double nrm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  use_parallel(x.size()) ? openmp::axpy(a, x, y) : serial::axpy(a, x, y);
}

void scal(double a, std::span<double> x) {
  use_parallel(x.size()) ? openmp::scal(a, x) : serial::scal(a, x);
}

void combine(double a, std::span<const double> x, double b,
             std::span<const double> y, std::span<double> out) {
  use_parallel(x.size()) ? openmp::combine(a, x, b, y, out)
                         : serial::combine(a, x, b, y, out);
}

void symv(std::span<const double> m, int d, std::span<const double> x,
          std::span<double> out) {
  use_parallel(m.size()) ? openmp::symv(m, d, x, out)
                         : serial::symv(m, d, x, out);
}

}  // namespace nmr::kernels
