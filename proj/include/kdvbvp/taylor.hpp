#pragma once

// Truncated Taylor series f(x0 + h) = sum_{k<=N} c_k h^k with the usual arithmetic.
// Coefficients are normalized (c_k = f^{(k)}(x0)/k!).

#include <cassert>
#include <cmath>
#include <vector>

namespace kdvbvp {

template <class T>
class BasicTaylor {
 public:
  BasicTaylor() = default;
  BasicTaylor(int order, T value) : c_(static_cast<size_t>(order) + 1, T(0)) { c_[0] = value; }

  /// a * exp(rate * h)
  static BasicTaylor exponential(int order, T a, T rate) {
    BasicTaylor t(order, a);
    for (int k = 1; k <= order; ++k) t.c_[static_cast<size_t>(k)] = t.c_[static_cast<size_t>(k) - 1] * rate / T(k);
    return t;
  }

  int order() const noexcept { return static_cast<int>(c_.size()) - 1; }
  T operator[](int k) const { return c_[static_cast<size_t>(k)]; }
  T& operator[](int k) { return c_[static_cast<size_t>(k)]; }

  /// k-th derivative at the expansion point.
  T derivative(int k) const {
    T f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return c_[static_cast<size_t>(k)] * f;
  }

  BasicTaylor& operator+=(const BasicTaylor& b) {
    assert(b.c_.size() == c_.size());
    for (size_t k = 0; k < c_.size(); ++k) c_[k] += b.c_[k];
    return *this;
  }
  BasicTaylor& operator-=(const BasicTaylor& b) {
    assert(b.c_.size() == c_.size());
    for (size_t k = 0; k < c_.size(); ++k) c_[k] -= b.c_[k];
    return *this;
  }
  friend BasicTaylor operator+(BasicTaylor a, const BasicTaylor& b) { return a += b; }
  friend BasicTaylor operator-(BasicTaylor a, const BasicTaylor& b) { return a -= b; }

  friend BasicTaylor operator*(const BasicTaylor& a, const BasicTaylor& b) {
    const int n = a.order();
    BasicTaylor r(n, T(0));
    for (int k = 0; k <= n; ++k) {
      T s = 0;
      for (int i = 0; i <= k; ++i) s += a[i] * b[k - i];
      r[k] = s;
    }
    return r;
  }

  friend BasicTaylor operator/(const BasicTaylor& a, const BasicTaylor& b) {
    const int n = a.order();
    BasicTaylor r(n, T(0));
    for (int k = 0; k <= n; ++k) {
      T s = a[k];
      for (int i = 1; i <= k; ++i) s -= b[i] * r[k - i];
      r[k] = s / b[0];
    }
    return r;
  }

  friend BasicTaylor log(const BasicTaylor& a) {
    // (log a)' = a'/a
    const int n = a.order();
    using std::log;
    BasicTaylor r(n, log(a[0]));
    for (int k = 1; k <= n; ++k) {
      T s = T(k) * a[k];
      for (int i = 1; i < k; ++i) s -= T(i) * r[i] * a[k - i];
      r[k] = s / (T(k) * a[0]);
    }
    return r;
  }

 private:
  std::vector<T> c_;
};

using Taylor = BasicTaylor<double>;

}  // namespace kdvbvp
