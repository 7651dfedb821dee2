#include "ipp/normal.hpp"

#include <cmath>
#include <limits>

namespace ipp {

double normal_pdf(double z) noexcept {
    return kInvSqrtTwoPi * std::exp(-0.5 * z * z);
}

double normal_cdf(double x) noexcept {
    static constexpr double a[5] = {2.2352520354606839287, 161.02823106855587881,
                                    1067.6894854603709582, 18154.981253343561249,
                                    0.065682337918207449113};
    static constexpr double b[4] = {47.20258190468824187, 976.09855173777669322,
                                    10260.932208618978205, 45507.789335026729956};
    static constexpr double c[9] = {0.39894151208813466764, 8.8831497943883759412,
                                    93.506656132177855979,  597.27027639480026226,
                                    2494.5375852903726711,  6848.1904505362823326,
                                    11602.651437647350124,  9842.7148383839780218,
                                    1.0765576773720192317e-8};
    static constexpr double d[8] = {22.266688044328115691, 235.38790178262499861,
                                    1519.377599407554805,  6485.558298266760755,
                                    18615.571640885098091, 34900.952721145977266,
                                    38912.003286093271411, 19685.429676859990727};
    static constexpr double p[6] = {0.21589853405795699,     0.1274011611602473639,
                                    0.022235277870649807,    0.001421619193227893466,
                                    2.9112874951168792e-5,   0.02307344176494017303};
    static constexpr double q[5] = {1.28426009614491121, 0.468238212480865118,
                                    0.0659881378689285515, 0.00378239633202758244,
                                    7.29751555083966205e-5};

    if (std::isnan(x)) return x;
    const double y = std::fabs(x);
    double cum;
    double ccum;

    if (y <= 0.67448975) {
        double xnum = 0.0;
        double xden = 0.0;
        if (y > 1.11e-16) {
            const double xsq = x * x;
            xnum = a[4] * xsq;
            xden = xsq;
            for (int i = 0; i < 3; ++i) {
                xnum = (xnum + a[i]) * xsq;
                xden = (xden + b[i]) * xsq;
            }
        }
        const double temp = x * (xnum + a[3]) / (xden + b[3]);
        return 0.5 + temp;
    }

    if (y <= 5.656854249492380195206754896838) {  // sqrt(32)
        double xnum = c[8] * y;
        double xden = y;
        for (int i = 0; i < 7; ++i) {
            xnum = (xnum + c[i]) * y;
            xden = (xden + d[i]) * y;
        }
        const double temp = (xnum + c[7]) / (xden + d[7]);
        const double xsq = std::trunc(y * 16.0) / 16.0;
        const double del = (y - xsq) * (y + xsq);
        cum = std::exp(-xsq * xsq * 0.5) * std::exp(-del * 0.5) * temp;
        ccum = 1.0 - cum;
    } else {
        if (y > 38.5) return x > 0 ? 1.0 : 0.0;
        const double xsq = 1.0 / (x * x);
        double xnum = p[5] * xsq;
        double xden = xsq;
        for (int i = 0; i < 4; ++i) {
            xnum = (xnum + p[i]) * xsq;
            xden = (xden + q[i]) * xsq;
        }
        double temp = xsq * (xnum + p[4]) / (xden + q[4]);
        temp = (kInvSqrtTwoPi - temp) / y;
        const double xr = std::trunc(x * 16.0) / 16.0;
        const double del = (x - xr) * (x + xr);
        cum = std::exp(-xr * xr * 0.5) * std::exp(-del * 0.5) * temp;
        ccum = 1.0 - cum;
    }
    return x > 0 ? ccum : cum;
}

double normal_quantile(double prob) noexcept {
    if (std::isnan(prob) || prob < 0.0 || prob > 1.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (prob == 0.0) return -std::numeric_limits<double>::infinity();
    if (prob == 1.0) return std::numeric_limits<double>::infinity();

    const double q = prob - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }

    double r = q < 0 ? prob : 1.0 - prob;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                    3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                  4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                  2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                  5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -value : value;
}

}  // namespace ipp
