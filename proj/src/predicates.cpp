#include "predicates.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace spatraf::detail {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon() / 2.0;  // 2^-53
constexpr double kCcwErrBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIccErrBound = (10.0 + 96.0 * kEps) * kEps;

// Nonoverlapping expansion, components in increasing magnitude.
using Expansion = std::vector<double>;

inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bv = s - a;
  const double av = s - bv;
  e = (a - av) + (b - bv);
}

inline void two_product(double a, double b, double& p, double& e) {
  p = a * b;
  e = std::fma(a, b, -p);
}

Expansion compress(Expansion e) {
  Expansion out;
  out.reserve(e.size());
  for (double v : e) {
    if (v != 0.0) out.push_back(v);
  }
  return out;
}

Expansion grow(const Expansion& e, double b) {
  Expansion h;
  h.reserve(e.size() + 1);
  double q = b;
  for (double ei : e) {
    double s, err;
    two_sum(q, ei, s, err);
    h.push_back(err);
    q = s;
  }
  h.push_back(q);
  return h;
}

Expansion add(const Expansion& e, const Expansion& f) {
  Expansion h = e;
  for (double fj : f) h = grow(h, fj);
  return compress(std::move(h));
}

Expansion negate(Expansion e) {
  for (double& v : e) v = -v;
  return e;
}

Expansion scale(const Expansion& e, double b) {
  if (e.empty()) return {};
  Expansion h;
  h.reserve(2 * e.size());
  double q, lo;
  two_product(e[0], b, q, lo);
  h.push_back(lo);
  for (std::size_t i = 1; i < e.size(); ++i) {
    double t_hi, t_lo;
    two_product(e[i], b, t_hi, t_lo);
    double s, err;
    two_sum(q, t_lo, s, err);
    h.push_back(err);
    two_sum(t_hi, s, q, err);
    h.push_back(err);
  }
  h.push_back(q);
  return compress(std::move(h));
}

Expansion multiply(const Expansion& e, const Expansion& f) {
  Expansion acc;
  for (double fj : f) acc = add(acc, scale(e, fj));
  return acc;
}

Expansion diff(double a, double b) {
  double s, err;
  two_sum(a, -b, s, err);
  return compress({err, s});
}

Expansion product(double a, double b) {
  double p, err;
  two_product(a, b, p, err);
  return compress({err, p});
}

double sign_of(const Expansion& e) { return e.empty() ? 0.0 : e.back(); }

double orient2d_exact(Point a, Point b, Point c) {
  // ax*by - ax*cy - ay*bx + ay*cx + bx*cy - by*cx
  Expansion acc;
  acc = add(acc, product(a.x, b.y));
  acc = add(acc, negate(product(a.x, c.y)));
  acc = add(acc, negate(product(a.y, b.x)));
  acc = add(acc, product(a.y, c.x));
  acc = add(acc, product(b.x, c.y));
  acc = add(acc, negate(product(b.y, c.x)));
  return sign_of(acc);
}

double incircle_exact(Point a, Point b, Point c, Point d) {
  const Expansion adx = diff(a.x, d.x), ady = diff(a.y, d.y);
  const Expansion bdx = diff(b.x, d.x), bdy = diff(b.y, d.y);
  const Expansion cdx = diff(c.x, d.x), cdy = diff(c.y, d.y);

  const Expansion alift = add(multiply(adx, adx), multiply(ady, ady));
  const Expansion blift = add(multiply(bdx, bdx), multiply(bdy, bdy));
  const Expansion clift = add(multiply(cdx, cdx), multiply(cdy, cdy));

  const Expansion bc = add(multiply(bdx, cdy), negate(multiply(cdx, bdy)));
  const Expansion ca = add(multiply(cdx, ady), negate(multiply(adx, cdy)));
  const Expansion ab = add(multiply(adx, bdy), negate(multiply(bdx, ady)));

  Expansion det = multiply(alift, bc);
  det = add(det, multiply(blift, ca));
  det = add(det, multiply(clift, ab));
  return sign_of(det);
}

}  // namespace

double orient2d(Point a, Point b, Point c) {
  const double detleft = (a.x - c.x) * (b.y - c.y);
  const double detright = (a.y - c.y) * (b.x - c.x);
  const double det = detleft - detright;
  const double errbound = kCcwErrBound * (std::fabs(detleft) + std::fabs(detright));
  if (det > errbound || -det > errbound) return det;
  return orient2d_exact(a, b, c);
}

double incircle(Point a, Point b, Point c, Point d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double alift = adx * adx + ady * ady;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double blift = bdx * bdx + bdy * bdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double clift = cdx * cdx + cdy * cdy;

  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
                     clift * (adxbdy - bdxady);
  const double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift +
                           (std::fabs(cdxady) + std::fabs(adxcdy)) * blift +
                           (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
  const double errbound = kIccErrBound * permanent;
  if (det > errbound || -det > errbound) return det;
  return incircle_exact(a, b, c, d);
}

}  // namespace spatraf::detail
