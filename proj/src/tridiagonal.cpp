#include "nhstark/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "nhstark/error.hpp"

namespace nhstark {

// Implicit QL with Wilkinson-type shifts (the EISPACK tql2 scheme), acting on
// an identity start so the accumulated rotations are the eigenvectors.
TridiagonalEigen solve_symmetric_tridiagonal(std::span<const double> diagonal,
                                             std::span<const double> off_diagonal) {
  const int n = static_cast<int>(diagonal.size());
  if (n == 0 || static_cast<int>(off_diagonal.size()) != n - 1) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("tridiagonal sizes {} / {} are inconsistent", diagonal.size(),
                            off_diagonal.size()));
  }
  std::vector<double> d(diagonal.begin(), diagonal.end());
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  std::copy(off_diagonal.begin(), off_diagonal.end(), e.begin());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  const int max_iterations = 60;
  double shift_sum = 0.0;
  double scale = 0.0;

  for (int l = 0; l < n; ++l) {
    scale = std::max(scale, std::abs(d[l]) + std::abs(e[l]));
    int m = l;
    while (m < n - 1 && std::abs(e[m]) > eps * scale) {
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > max_iterations) {
          throw Error(ErrorCode::NumericalFailure,
                      fmt::format("tridiagonal QL did not converge for eigenvalue {}", l));
        }
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) {
          r = -r;
        }
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (int i = l + 2; i < n; ++i) {
          d[i] -= h;
        }
        shift_sum += h;

        p = d[m];
        double c = 1.0;
        double c2 = c;
        double c3 = c;
        const double el1 = e[l + 1];
        double s = 0.0;
        double s2 = 0.0;
        for (int i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          double* col_i = v.col(i).data();
          double* col_next = v.col(i + 1).data();
          for (int k = 0; k < n; ++k) {
            h = col_next[k];
            col_next[k] = s * col_i[k] + c * h;
            col_i[k] = c * col_i[k] - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * scale);
    }
    d[l] += shift_sum;
    e[l] = 0.0;
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });

  TridiagonalEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = d[order[k]];
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

}  // namespace nhstark
