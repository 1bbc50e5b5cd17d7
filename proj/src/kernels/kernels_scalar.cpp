#include "spmux/kernels.hpp"

namespace spmux::kernels {
namespace {

cplx s_dotc(const cplx* x, const cplx* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

cplx s_dotu(const cplx* x, const cplx* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr - xi * yi;
    im += xr * yi + xi * yr;
  }
  return {re, im};
}

void s_axpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const double ar = a.real(), ai = a.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = {y[i].real() + ar * xr - ai * xi, y[i].imag() + ar * xi + ai * xr};
  }
}

void s_axpy_conj(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const double ar = a.real(), ai = a.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = -x[i].imag();
    y[i] = {y[i].real() + ar * xr - ai * xi, y[i].imag() + ar * xi + ai * xr};
  }
}

double s_norm2sq(const cplx* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return acc;
}

void s_vhm(const cplx* A, std::size_t m, std::size_t n, const cplx* x, cplx* y) {
  for (std::size_t j = 0; j < n; ++j) y[j] = s_dotc(x, A + j * m, m);
}

void s_mhv(const cplx* A, std::size_t m, std::size_t n, const cplx* x, cplx* y) {
  for (std::size_t j = 0; j < n; ++j) y[j] = s_dotc(A + j * m, x, m);
}

void s_mv_acc(const cplx* A, std::size_t m, std::size_t n, const cplx* x, cplx* y) {
  for (std::size_t j = 0; j < n; ++j) s_axpy(x[j], A + j * m, y, m);
}

void s_rank1_acc(cplx* R, std::size_t m, std::size_t n, const cplx* h, const cplx* x, cplx g) {
  for (std::size_t t = 0; t < n; ++t) s_axpy(g * x[t], h, R + t * m, m);
}

constexpr Backend kScalar = {
    "scalar", s_dotc, s_dotu, s_axpy, s_axpy_conj, s_norm2sq,
    s_vhm,    s_mhv,  s_mv_acc, s_rank1_acc,
};

}  // namespace

const Backend& scalar_backend() { return kScalar; }

}  // namespace spmux::kernels
