#ifndef WMLAB_ODE_INTEGRATOR_HPP_
#define WMLAB_ODE_INTEGRATOR_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace wmlab {

class StepSizeUnderflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OdeTolerance {
  double rtol = 1e-11;
  double atol = 1e-14;
};

/// Dormand-Prince 8(5,3) with Hairer's error estimate, for complex systems of
/// fixed dimension N. F(x, y) returns dy/dx.
template <std::size_t N>
class Dop853 {
 public:
  using State = std::array<std::complex<double>, N>;

  explicit Dop853(OdeTolerance tol = {}) : tol_(tol) {}

  /// Integrates from (x0, y) to x1; h is the initial step guess and is
  /// updated with the last proposed step so consecutive calls continue smoothly.
  template <typename F>
  State integrate(F &&f, double x0, State y, double x1, double &h) const {
    if (x1 == x0) return y;
    const double dir = x1 > x0 ? 1.0 : -1.0;
    double x = x0;
    State k1 = f(x, y);
    if (!(h > 0.0)) h = initial_step(f, x, y, k1, dir);
    h = std::min(h, std::abs(x1 - x0));
    bool reject = false;
    int steps = 0;
    while ((x1 - x) * dir > 0.0) {
      if (++steps > 1000000) throw StepSizeUnderflow("too many steps");
      bool last = false;
      if ((x + dir * h - x1) * dir >= 0.0) {
        h = std::abs(x1 - x);
        last = true;
      }
      if (h < 1e-14 * std::max(1.0, std::abs(x))) throw StepSizeUnderflow("step size underflow");
      State ynew, knew;
      const double err = attempt(f, x, y, k1, dir * h, ynew, knew);
      if (err <= 1.0) {
        double scale = err == 0.0 ? 6.0 : 0.9 * std::pow(err, -0.125);
        scale = std::clamp(scale, 0.333, 6.0);
        if (reject) scale = std::min(scale, 1.0);
        reject = false;
        x = last ? x1 : x + dir * h;
        y = ynew;
        k1 = knew;  // derivative at the new point
        if (last) {
          h *= scale;
          return y;
        }
        h *= scale;
      } else {
        h *= std::max(0.333, 0.9 * std::pow(err, -0.125));
        reject = true;
      }
    }
    return y;
  }

 private:
  template <typename F>
  double initial_step(F &f, double x, const State &y, const State &dy, double dir) const {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = tol_.atol + tol_.rtol * std::abs(y[i]);
      d0 += std::norm(y[i]) / (sc * sc);
      d1 += std::norm(dy[i]) / (sc * sc);
    }
    double h0 = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * std::sqrt(d0 / d1);
    State y1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + dir * h0 * dy[i];
    const State dy1 = f(x + dir * h0, y1);
    double d2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = tol_.atol + tol_.rtol * std::abs(y[i]);
      d2 += std::norm(dy1[i] - dy[i]) / (sc * sc);
    }
    d2 = std::sqrt(d2) / h0;
    const double m = std::max(std::sqrt(d1), d2);
    const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 1.0 / 8.0);
    return std::min(100.0 * h0, h1);
  }

  template <typename F>
  double attempt(F &f, double x, const State &y, const State &k1, double h, State &ynew,
                 State &knew) const {
    constexpr double c2 = 0.526001519587677318785587544488e-01, c3 = 0.789002279381515978178381316732e-01,
                     c4 = 0.118350341907227396726757197510e+00, c5 = 0.281649658092772603273242802490e+00,
                     c6 = 0.333333333333333333333333333333e+00, c7 = 0.25e+00,
                     c8 = 0.307692307692307692307692307692e+00, c9 = 0.651282051282051282051282051282e+00,
                     c10 = 0.6e+00, c11 = 0.857142857142857142857142857142e+00;
    constexpr double a21 = 5.26001519587677318785587544488e-2, a31 = 1.97250569845378994544595329183e-2,
                     a32 = 5.91751709536136983633785987549e-2, a41 = 2.95875854768068491816892993775e-2,
                     a43 = 8.87627564304205475450678981324e-2, a51 = 2.41365134159266685502369798665e-1,
                     a53 = -8.84549479328286085344864962717e-1, a54 = 9.24834003261792003115737966543e-1,
                     a61 = 3.7037037037037037037037037037e-2, a64 = 1.70828608729473871279604482173e-1,
                     a65 = 1.25467687566822425016691814123e-1, a71 = 3.7109375e-2,
                     a74 = 1.70252211019544039314978060272e-1, a75 = 6.02165389804559606850219397283e-2,
                     a76 = -1.7578125e-2, a81 = 3.70920001185047927108779319836e-2,
                     a84 = 1.70383925712239993810214054705e-1, a85 = 1.07262030446373284651809199168e-1,
                     a86 = -1.53194377486244017527936158236e-2, a87 = 8.27378916381402288758473766002e-3,
                     a91 = 6.24110958716075717114429577812e-1, a94 = -3.36089262944694129406857109825e0,
                     a95 = -8.68219346841726006818189891453e-1, a96 = 2.75920996994467083049415600797e1,
                     a97 = 2.01540675504778934086186788979e1, a98 = -4.34898841810699588477366255144e1,
                     a101 = 4.77662536438264365890433908527e-1, a104 = -2.48811461997166764192642586468e0,
                     a105 = -5.90290826836842996371446475743e-1, a106 = 2.12300514481811942347288949897e1,
                     a107 = 1.52792336328824235832596922938e1, a108 = -3.32882109689848629194453265587e1,
                     a109 = -2.03312017085086261358222928593e-2, a111 = -9.3714243008598732571704021658e-1,
                     a114 = 5.18637242884406370830023853209e0, a115 = 1.09143734899672957818500254654e0,
                     a116 = -8.14978701074692612513997267357e0, a117 = -1.85200656599969598641566180701e1,
                     a118 = 2.27394870993505042818970056734e1, a119 = 2.49360555267965238987089396762e0,
                     a1110 = -3.0467644718982195003823669022e0, a121 = 2.27331014751653820792359768449e0,
                     a124 = -1.05344954667372501984066689879e1, a125 = -2.00087205822486249909675718444e0,
                     a126 = -1.79589318631187989172765950534e1, a127 = 2.79488845294199600508499808837e1,
                     a128 = -2.85899827713502369474065508674e0, a129 = -8.87285693353062954433549289258e0,
                     a1210 = 1.23605671757943030647266201528e1, a1211 = 6.43392746015763530355970484046e-1;
    constexpr double b1 = 5.42937341165687622380535766363e-2, b6 = 4.45031289275240888144113950566e0,
                     b7 = 1.89151789931450038304281599044e0, b8 = -5.8012039600105847814672114227e0,
                     b9 = 3.1116436695781989440891606237e-1, b10 = -1.52160949662516078556178806805e-1,
                     b11 = 2.01365400804030348374776537501e-1, b12 = 4.47106157277725905176885569043e-2;
    constexpr double e31 = 0.244094488188976377952755905512e+00, e32 = 0.733846688281611857341361741547e+00,
                     e33 = 0.220588235294117647058823529412e-01;
    constexpr double e51 = 0.1312004499419488073250102996e-01, e56 = -0.1225156446376204440720569753e+01,
                     e57 = -0.4957589496572501915214079952e+00, e58 = 0.1664377182454986536961530415e+01,
                     e59 = -0.3503288487499736816886487290e+00, e510 = 0.3341791187130174790297318841e+00,
                     e511 = 0.8192320648511571246570742613e-01, e512 = -0.2235530786388629525884427845e-01;

    State w;
    auto stage = [&](auto &&combine) {
      for (std::size_t i = 0; i < N; ++i) w[i] = y[i] + h * combine(i);
      return w;
    };
    const State k2 = f(x + c2 * h, stage([&](std::size_t i) { return a21 * k1[i]; }));
    const State k3 = f(x + c3 * h, stage([&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; }));
    const State k4 = f(x + c4 * h, stage([&](std::size_t i) { return a41 * k1[i] + a43 * k3[i]; }));
    const State k5 = f(x + c5 * h, stage([&](std::size_t i) { return a51 * k1[i] + a53 * k3[i] + a54 * k4[i]; }));
    const State k6 = f(x + c6 * h, stage([&](std::size_t i) { return a61 * k1[i] + a64 * k4[i] + a65 * k5[i]; }));
    const State k7 = f(x + c7 * h, stage([&](std::size_t i) {
      return a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i];
    }));
    const State k8 = f(x + c8 * h, stage([&](std::size_t i) {
      return a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i];
    }));
    const State k9 = f(x + c9 * h, stage([&](std::size_t i) {
      return a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] + a97 * k7[i] + a98 * k8[i];
    }));
    const State k10 = f(x + c10 * h, stage([&](std::size_t i) {
      return a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] + a107 * k7[i] + a108 * k8[i] +
             a109 * k9[i];
    }));
    const State k11 = f(x + c11 * h, stage([&](std::size_t i) {
      return a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] + a117 * k7[i] + a118 * k8[i] +
             a119 * k9[i] + a1110 * k10[i];
    }));
    const State k12 = f(x + h, stage([&](std::size_t i) {
      return a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] + a127 * k7[i] + a128 * k8[i] +
             a129 * k9[i] + a1210 * k10[i] + a1211 * k11[i];
    }));
    State incr;
    for (std::size_t i = 0; i < N; ++i) {
      incr[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] + b10 * k10[i] + b11 * k11[i] +
                b12 * k12[i];
      ynew[i] = y[i] + h * incr[i];
    }
    double err3 = 0.0, err5 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = tol_.atol + tol_.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const auto e3 = incr[i] - e31 * k1[i] - e32 * k9[i] - e33 * k12[i];
      const auto e5 = e51 * k1[i] + e56 * k6[i] + e57 * k7[i] + e58 * k8[i] + e59 * k9[i] + e510 * k10[i] +
                      e511 * k11[i] + e512 * k12[i];
      err3 += std::norm(e3) / (sc * sc);
      err5 += std::norm(e5) / (sc * sc);
    }
    const double denom = err5 + 0.01 * err3;
    if (!std::isfinite(denom)) return HUGE_VAL;
    knew = f(x + h, ynew);
    if (denom <= 0.0) return 0.0;
    return std::abs(h) * err5 / std::sqrt(static_cast<double>(N) * denom);
  }

  OdeTolerance tol_;
};

}  // namespace wmlab

#endif  // WMLAB_ODE_INTEGRATOR_HPP_
