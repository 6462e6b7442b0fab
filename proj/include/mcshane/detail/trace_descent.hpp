#pragma once

#include <cstdint>

namespace mcshane {

template <class T>
T trace_by_descent(const T& x, const T& y, const T& z, const Slope& s) {
  if (s == canonical_slope(0, 1)) return x;
  if (s.is_infinity()) return y;
  // Triangle (L, R, prev) with L < R on the line; its mediant is L + R.
  std::int64_t lp, lq, rp, rq;
  T vl, vr, vprev;
  if (s.p() > 0) {
    lp = 0, lq = 1, rp = 1, rq = 0;
    vl = x, vr = y, vprev = x * y - z;  // prev is -1/1
  } else {
    lp = -1, lq = 0, rp = 0, rq = 1;
    vl = y, vr = x, vprev = z;  // prev is 1/1
  }
  for (;;) {
    const std::int64_t mp = lp + rp, mq = lq + rq;
    T vm = vl * vr - vprev;
    if (mp == s.p() && mq == s.q()) return vm;
    const __int128 lhs = static_cast<__int128>(s.p()) * mq;
    const __int128 rhs = static_cast<__int128>(mp) * s.q();
    if (lhs < rhs) {
      vprev = vr;
      vr = vm;
      rp = mp, rq = mq;
    } else {
      vprev = vl;
      vl = vm;
      lp = mp, lq = mq;
    }
  }
}

}  // namespace mcshane
