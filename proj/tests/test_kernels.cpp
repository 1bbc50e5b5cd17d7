#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "spmux/kernels.hpp"

using spmux::kernels::Backend;
using spmux::kernels::cplx;

namespace {

std::vector<cplx> random_vec(std::size_t n, std::uint64_t seed) {
  oracle::SplitMix s{seed};
  std::vector<cplx> v(n);
  for (auto& x : v) x = oracle::cgauss(s);
  return v;
}

// Sizes straddling the SIMD width so both the vector body and the scalar tail
// get exercised.
const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 100, 257};

bool close(cplx a, cplx b, double tol, double scale) {
  return std::abs(a - b) <= tol * (1.0 + scale);
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar matches naive loops") {
  const Backend& s = spmux::kernels::scalar_backend();
  for (std::size_t n : kSizes) {
    auto x = random_vec(n, 11 + n);
    auto y = random_vec(n, 23 + n);
    cplx dc{}, du{};
    double n2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dc += std::conj(x[i]) * y[i];
      du += x[i] * y[i];
      n2 += std::norm(x[i]);
    }
    CHECK(close(s.dotc(x.data(), y.data(), n), dc, 1e-12, std::abs(dc)));
    CHECK(close(s.dotu(x.data(), y.data(), n), du, 1e-12, std::abs(du)));
    CHECK(s.norm2sq(x.data(), n) == doctest::Approx(n2).epsilon(1e-12));
  }
}

TEST_CASE("vector primitives agree across backends") {
  const Backend& s = spmux::kernels::scalar_backend();
  const Backend* w = spmux::kernels::avx2_backend();
  if (!w) {
    MESSAGE("AVX2 backend unavailable on this host; scalar-only build verified");
    return;
  }
  for (std::size_t n : kSizes) {
    auto x = random_vec(n, 101 + n);
    auto y = random_vec(n, 211 + n);
    const cplx a{0.37, -1.21};

    CHECK(close(s.dotc(x.data(), y.data(), n), w->dotc(x.data(), y.data(), n), 1e-11,
                double(n)));
    CHECK(close(s.dotu(x.data(), y.data(), n), w->dotu(x.data(), y.data(), n), 1e-11,
                double(n)));
    CHECK(s.norm2sq(x.data(), n) ==
          doctest::Approx(w->norm2sq(x.data(), n)).epsilon(1e-11));

    auto y1 = y, y2 = y;
    s.axpy(a, x.data(), y1.data(), n);
    w->axpy(a, x.data(), y2.data(), n);
    CHECK(oracle::max_abs_diff(y1, y2) < 1e-11);

    y1 = y;
    y2 = y;
    s.axpy_conj(a, x.data(), y1.data(), n);
    w->axpy_conj(a, x.data(), y2.data(), n);
    CHECK(oracle::max_abs_diff(y1, y2) < 1e-11);
  }
}

TEST_CASE("matrix primitives agree across backends") {
  const Backend& s = spmux::kernels::scalar_backend();
  const Backend* w = spmux::kernels::avx2_backend();
  if (!w) return;
  const std::pair<std::size_t, std::size_t> shapes[] = {
      {1, 1}, {2, 3}, {3, 2}, {5, 4}, {8, 8}, {13, 7}, {32, 5}, {33, 17}, {7, 33}};
  for (auto [m, n] : shapes) {
    auto A = random_vec(m * n, 7 * m + n);
    auto xm = random_vec(m, 3 * m + 17);
    auto xn = random_vec(n, 5 * n + 29);
    const cplx g{-0.8, 0.45};

    std::vector<cplx> r1(n), r2(n);
    s.vhm(A.data(), m, n, xm.data(), r1.data());
    w->vhm(A.data(), m, n, xm.data(), r2.data());
    CHECK(oracle::max_abs_diff(r1, r2) < 1e-11);

    std::fill(r1.begin(), r1.end(), cplx{});
    std::fill(r2.begin(), r2.end(), cplx{});
    s.mhv(A.data(), m, n, xm.data(), r1.data());
    w->mhv(A.data(), m, n, xm.data(), r2.data());
    CHECK(oracle::max_abs_diff(r1, r2) < 1e-11);

    auto acc1 = random_vec(m, 999), acc2 = acc1;
    s.mv_acc(A.data(), m, n, xn.data(), acc1.data());
    w->mv_acc(A.data(), m, n, xn.data(), acc2.data());
    CHECK(oracle::max_abs_diff(acc1, acc2) < 1e-11);

    auto R1 = random_vec(m * n, 404), R2 = R1;
    s.rank1_acc(R1.data(), m, n, xm.data(), xn.data(), g);
    w->rank1_acc(R2.data(), m, n, xm.data(), xn.data(), g);
    CHECK(oracle::max_abs_diff(R1, R2) < 1e-11);
  }
}

TEST_CASE("matrix primitives match the dense oracle") {
  const Backend& s = spmux::kernels::scalar_backend();
  const std::size_t m = 9, n = 6;
  auto A = random_vec(m * n, 71);
  auto x = random_vec(m, 72);
  auto v = random_vec(n, 73);

  oracle::Mat Am{int(m), int(n)};
  Am.a = A;
  const auto Ah_x = oracle::matvec(oracle::adjoint(Am), x);

  std::vector<cplx> got(n);
  s.mhv(A.data(), m, n, x.data(), got.data());
  CHECK(oracle::max_abs_diff(got, Ah_x) < 1e-12);

  std::fill(got.begin(), got.end(), cplx{});
  s.vhm(A.data(), m, n, x.data(), got.data());
  std::vector<cplx> conj_ref(Ah_x.size());
  for (std::size_t i = 0; i < Ah_x.size(); ++i) conj_ref[i] = std::conj(Ah_x[i]);
  CHECK(oracle::max_abs_diff(got, conj_ref) < 1e-12);  // x^H A = conj(A^H x)

  std::vector<cplx> acc(m);
  s.mv_acc(A.data(), m, n, v.data(), acc.data());
  CHECK(oracle::max_abs_diff(acc, oracle::matvec(Am, v)) < 1e-12);

  // rank1_acc deposits g * x[t] * h[i] at (i, t).
  std::vector<cplx> R(m * n);
  const cplx g{1.5, -0.25};
  s.rank1_acc(R.data(), m, n, x.data(), v.data(), g);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i)
      CHECK(std::abs(R[i + j * m] - g * v[j] * x[i]) < 1e-12);
}

TEST_CASE("runtime selection") {
  const char* initial = spmux::kernels::active().name;

  REQUIRE(spmux::kernels::select("scalar"));
  CHECK(std::string_view(spmux::kernels::active().name) == "scalar");

  const bool have_wide = spmux::kernels::avx2_backend() != nullptr;
  CHECK(spmux::kernels::select("avx2") == have_wide);
  if (have_wide) CHECK(std::string_view(spmux::kernels::active().name) == "avx2");

  CHECK_FALSE(spmux::kernels::select("sse9"));

  REQUIRE(spmux::kernels::select("auto"));
  if (have_wide) CHECK(std::string_view(spmux::kernels::active().name) == "avx2");
  MESSAGE("initial backend: ", std::string_view(initial));
}

}  // TEST_SUITE
