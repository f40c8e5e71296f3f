#include "casimir/quadrature.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>

namespace casimir::quadrature {

namespace {

// Kronrod abscissae and weights (QUADPACK qk15); Gauss weights for the odd
// Kronrod nodes 1, 3, 5, 7.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a;
  double b;
  double value;
  double error;
  bool mapped;  // semi-infinite tail in the s variable
  bool operator<(const Piece& o) const { return error < o.error; }
};

class Integrand {
 public:
  Integrand(const std::function<double(double)>& f, double origin, double scale)
      : f_(f), origin_(origin), scale_(scale) {}

  double operator()(double s, bool mapped) const {
    if (!mapped) return f_(s);
    const double one_minus = 1.0 - s;
    const double x = origin_ + scale_ * s / one_minus;
    return f_(x) * scale_ / (one_minus * one_minus);
  }

 private:
  const std::function<double(double)>& f_;
  double origin_;
  double scale_;
};

Piece kronrod15(const Integrand& f, double a, double b, bool mapped, int& evals) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double fv1[7], fv2[7];
  const double fc = f(center, mapped);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::fabs(resk);
  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;
    const double dx = half * kXgk[jtw];
    const double f1 = f(center - dx, mapped);
    const double f2 = f(center + dx, mapped);
    fv1[jtw] = f1;
    fv2[jtw] = f2;
    resg += kWg[j] * (f1 + f2);
    resk += kWgk[jtw] * (f1 + f2);
    resabs += kWgk[jtw] * (std::fabs(f1) + std::fabs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;
    const double dx = half * kXgk[jtwm1];
    const double f1 = f(center - dx, mapped);
    const double f2 = f(center + dx, mapped);
    fv1[jtwm1] = f1;
    fv2[jtwm1] = f2;
    resk += kWgk[jtwm1] * (f1 + f2);
    resabs += kWgk[jtwm1] * (std::fabs(f1) + std::fabs(f2));
  }
  evals += 15;

  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));
  }
  const double value = resk * half;
  resabs *= std::fabs(half);
  resasc *= std::fabs(half);
  double err = std::fabs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, value, err, mapped};
}

}  // namespace

Result integrate(const std::function<double(double)>& f, std::span<const double> breakpoints,
                 const Tolerance& tol, double tail_scale) {
  if (breakpoints.size() < 2) throw std::invalid_argument("integrate: need at least two breakpoints");
  const bool has_tail = std::isinf(breakpoints.back());
  const double tail_origin = has_tail ? breakpoints[breakpoints.size() - 2] : 0.0;
  const Integrand g(f, tail_origin, tail_scale);

  Result out;
  std::priority_queue<Piece> heap;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const bool mapped = has_tail && i + 2 == breakpoints.size();
    const double a = mapped ? 0.0 : breakpoints[i];
    const double b = mapped ? 1.0 : breakpoints[i + 1];
    if (!(b > a)) {
      if (b == a) continue;
      throw std::invalid_argument("integrate: breakpoints must be ascending");
    }
    Piece p = kronrod15(g, a, b, mapped, out.evaluations);
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }

  auto target = [&] { return std::max(tol.absolute, tol.relative * std::fabs(total)); };
  int intervals = static_cast<int>(heap.size());
  while (!heap.empty() && total_err > target()) {
    if (intervals >= tol.max_intervals) {
      out.converged = false;
      break;
    }
    const Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) < 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(mid))) {
      out.converged = false;
      break;
    }
    heap.pop();
    const Piece left = kronrod15(g, worst.a, mid, worst.mapped, out.evaluations);
    const Piece right = kronrod15(g, mid, worst.b, worst.mapped, out.evaluations);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }

  CompensatedSum value;
  double err = 0.0;
  while (!heap.empty()) {
    value.add(heap.top().value);
    err += heap.top().error;
    heap.pop();
  }
  out.value = value.value();
  out.abs_error = err;
  if (!std::isfinite(out.value)) out.converged = false;
  return out;
}

Result integrate_half_line(const std::function<double(double)>& f, std::vector<double> interior,
                           const Tolerance& tol, double tail_scale) {
  std::vector<double> pts{0.0};
  std::sort(interior.begin(), interior.end());
  for (double x : interior) {
    if (std::isfinite(x) && x > pts.back()) pts.push_back(x);
  }
  pts.push_back(std::numeric_limits<double>::infinity());
  return integrate(f, pts, tol, tail_scale);
}

}  // namespace casimir::quadrature
