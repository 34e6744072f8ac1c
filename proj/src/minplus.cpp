#include "weakkam/minplus.hpp"

#include <algorithm>
#include <cmath>

#include "weakkam/error.hpp"
#include "weakkam/parallel.hpp"

namespace weakkam {
namespace {

constexpr std::size_t kColumnBlock = 512;

}  // namespace

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 0.0;
  return m;
}

DenseMatrix minplus_product(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.size() != b.size()) throw InvalidArgument("minplus_product: size mismatch");
  const std::size_t n = a.size();
  DenseMatrix c(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double* out = c.row(i).data();
      const double* ai = a.row(i).data();
      for (std::size_t j0 = 0; j0 < n; j0 += kColumnBlock) {
        const std::size_t j1 = std::min(n, j0 + kColumnBlock);
        for (std::size_t k = 0; k < n; ++k) {
          const double aik = ai[k];
          if (aik == kInfinity) continue;
          const double* bk = b.row(k).data();
          for (std::size_t j = j0; j < j1; ++j) {
            const double s = aik + bk[j];
            out[j] = s < out[j] ? s : out[j];
          }
        }
      }
    }
  });
  return c;
}

DenseMatrix minplus_power(const DenseMatrix& a, std::size_t n) {
  if (n == 0) throw InvalidArgument("minplus_power: exponent must be >= 1");
  DenseMatrix base = a;
  DenseMatrix result;
  bool have_result = false;
  for (;;) {
    if (n & 1u) {
      result = have_result ? minplus_product(result, base) : base;
      have_result = true;
    }
    n >>= 1u;
    if (n == 0) break;
    base = minplus_product(base, base);
  }
  return result;
}

DenseMatrix minplus_window_power(const DenseMatrix& a, std::size_t m) {
  DenseMatrix lifted = a;
  for (std::size_t i = 0; i < a.size(); ++i) lifted(i, i) = std::min(lifted(i, i), 0.0);
  if (m == 0) return DenseMatrix::identity(a.size());
  return minplus_power(lifted, m);
}

DenseMatrix elementwise_min(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.size() != b.size()) throw InvalidArgument("elementwise_min: size mismatch");
  DenseMatrix c = a;
  for (std::size_t i = 0; i < c.data().size(); ++i) {
    c.data()[i] = std::min(c.data()[i], b.data()[i]);
  }
  return c;
}

double sup_difference(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.size() != b.size()) throw InvalidArgument("sup_difference: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double x = a.data()[i];
    const double y = b.data()[i];
    if (x == y) continue;
    if (!std::isfinite(x) || !std::isfinite(y)) return kInfinity;
    m = std::max(m, std::abs(x - y));
  }
  return m;
}

}  // namespace weakkam
