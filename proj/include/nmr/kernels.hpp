#pragma once

#include <cstddef>
#include <span>

// Data-parallel vector and matrix kernels. Every kernel has a serial
// reference implementation and an OpenMP one; the public entry points
// dispatch on the active backend and fall back to serial below a grain
// size where threading cannot pay for itself. Parallel reductions
// combine per-thread partials in thread order, so results are
// reproducible for a fixed thread count.

namespace nmr::kernels {

enum class Backend { serial, openmp };

Backend backend();
void set_backend(Backend b);

// Smallest element count that is run through the OpenMP path.
std::size_t parallel_grain();
void set_parallel_grain(std::size_t n);

double dot(std::span<const double> x, std::span<const double> y);
double nrm2(std::span<const double> x);
// y += a*x
void axpy(double a, std::span<const double> x, std::span<double> y);
void scal(double a, std::span<double> x);
// out = a*x + b*y
void combine(double a, std::span<const double> x, double b,
             std::span<const double> y, std::span<double> out);
// out = m*x for a dense row-major d-by-d matrix
void symv(std::span<const double> m, int d, std::span<const double> x,
          std::span<double> out);

namespace serial {
double dot(std::span<const double> x, std::span<const double> y);
double nrm2(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scal(double a, std::span<double> x);
void combine(double a, std::span<const double> x, double b,
             std::span<const double> y, std::span<double> out);
void symv(std::span<const double> m, int d, std::span<const double> x,
          std::span<double> out);
}  // namespace serial

namespace openmp {
double dot(std::span<const double> x, std::span<const double> y);
double nrm2(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scal(double a, std::span<double> x);
void combine(double a, std::span<const double> x, double b,
             std::span<const double> y, std::span<double> out);
void symv(std::span<const double> m, int d, std::span<const double> x,
          std::span<double> out);
}  // namespace openmp

}  // namespace nmr::kernels
