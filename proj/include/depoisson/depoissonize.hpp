#ifndef DEPOISSON_DEPOISSONIZE_HPP
#define DEPOISSON_DEPOISSONIZE_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "depoisson/poisson.hpp"
#include "depoisson/polyfam.hpp"
#include "depoisson/sequences.hpp"

namespace depoisson {

struct ExpansionTerm {
    unsigned m = 0;
    double deriv = 0;  // f^{(m)}(R)
    double poly = 0;   // R^m C_m(R,n)/m!  (tau_m(n)/m! at R = n)
    double term = 0;
};

struct ExpansionCertificate {
    long n = 0;
    unsigned N = 0;
    double R = 0;
    double partial_sum = 0;
    double bound = 0;
    std::string theorem;  // "general-R", "at-n", "monotone-general-R", "monotone-at-n", "direct"
    std::vector<ExpansionTerm> components;
    bool degraded = false;
};

/// Partial sum sum_{m<=N} f^{(m)}(R)/m! R^m C_m(R,n), the depoissonization
/// main term. At R = n the terms reduce through tau_m(n) = n^m C_m(n,n).
/// n in {0,1} falls back to direct provider access with a zero-cost
/// certificate; the error-bound theorems start at n = 2 anyway.
inline ExpansionCertificate charlier_poisson_sum(const Sequence& seq, long n, unsigned N,
                                                 double R) {
    if (n < 0) throw std::invalid_argument("charlier_poisson_sum: n must be nonnegative");
    if (!(R > 0)) throw std::invalid_argument("charlier_poisson_sum: R must be positive");
    ExpansionCertificate cert;
    cert.n = n;
    cert.N = N;
    cert.R = R;
    if (n <= 1) {
        cert.theorem = "direct";
        cert.partial_sum = seq.value(n);
        cert.bound = 0;
        cert.components.push_back({0, cert.partial_sum, 1.0, cert.partial_sum});
        return cert;
    }
    bool at_n = R == static_cast<double>(n);
    cert.theorem = at_n ? "at-n" : "general-R";
    Rational fact = 1;
    for (unsigned m = 0; m <= N; ++m) {
        if (m > 0) fact *= m;
        PoissonEvalReport fr = eval_poisson_transform(seq, m, R);
        if (fr.degraded) cert.degraded = true;
        double poly;
        if (at_n) {
            poly = to_double(tau_poly(m).eval(Rational(n)) / fact);
        } else {
            Rational rq;
            if (is_simple_rational(R, &rq))
                poly = to_double(charlier_weighted_exact(rq, m, Rational(n)) / fact);
            else
                poly = charlier_weighted(R, m, static_cast<double>(n)) / to_double(fact);
        }
        double term = fr.value * poly;
        cert.components.push_back({m, fr.value, poly, term});
        cert.partial_sum += term;
    }
    return cert;
}

/// 6 n! (e^R/R^n) E(f^{(N+1)}; R) n^{N/2}; the n! e^R/R^n prefactor is taken
/// in log space.
inline double error_bound_general_R(const Sequence& seq, long n, unsigned N, double R) {
    if (n < 2) throw std::invalid_argument("error_bound_general_R: requires n >= 2");
    if (!(R > 0)) throw std::invalid_argument("error_bound_general_R: R must be positive");
    double E = E_op(seq, N + 1, R).value;
    double nn = static_cast<double>(n);
    double logpre = std::lgamma(nn + 1.0) + R - nn * std::log(R);
    return 6.0 * std::exp(logpre + 0.5 * static_cast<double>(N) * std::log(nn)) * E;
}

/// 17 n^{(N+1)/2} E(f^{(N+1)}; n).
inline double error_bound_at_n(const Sequence& seq, long n, unsigned N) {
    if (n < 2) throw std::invalid_argument("error_bound_at_n: requires n >= 2");
    double nn = static_cast<double>(n);
    double E = E_op(seq, N + 1, nn).value;
    return 17.0 * std::pow(nn, 0.5 * (static_cast<double>(N) + 1.0)) * E;
}

struct MonotoneBound {
    double bound = 0;
    bool monotone = false;   // whether one-signed differences were verified
    long checked_lo = 0, checked_hi = 0;
    std::string theorem;
};

/// Fast path for monotone sequences: |A_n - f(R)| <= (e^R/R^n) n! |f'(R)|,
/// reducing to 2 sqrt(n) |f'(n)| at R = n. The one-signed-difference
/// hypothesis is verified over [0, m_hi] for the Poisson window at the
/// evaluation point; refusal (monotone = false) means the caller should use
/// error_bound_at_n instead.
inline MonotoneBound monotone_bound(const Sequence& seq, long n,
                                    std::optional<double> R = std::nullopt) {
    if (n < 1) throw std::invalid_argument("monotone_bound: requires n >= 1");
    double center = R.value_or(static_cast<double>(n));
    if (!(center > 0)) throw std::invalid_argument("monotone_bound: R must be positive");
    MonotoneBound mb;
    PoissonWeights pw = poisson_weights(center);
    long hi = pw.m_hi;
    if (seq.max_index() >= 0) hi = std::min(hi, seq.max_index() - 1);
    mb.checked_lo = 0;
    mb.checked_hi = hi;
    bool nonneg = true, nonpos = true;
    for (long m = 0; m <= hi; ++m) {
        double d = seq.delta(1, m);
        if (d < 0) nonneg = false;
        if (d > 0) nonpos = false;
        if (!nonneg && !nonpos) break;
    }
    mb.monotone = nonneg || nonpos;
    if (!mb.monotone) {
        mb.theorem = "refused";
        mb.bound = std::numeric_limits<double>::quiet_NaN();
        return mb;
    }
    double fp = seq.has_transform() ? seq.transform(1, center)
                                    : eval_poisson_transform(seq, 1, center).value;
    double nn = static_cast<double>(n);
    if (!R) {
        mb.theorem = "monotone-at-n";
        mb.bound = 2.0 * std::sqrt(nn) * std::fabs(fp);
    } else {
        mb.theorem = "monotone-general-R";
        mb.bound = std::exp(std::lgamma(nn + 1.0) + center - nn * std::log(center)) * std::fabs(fp);
    }
    return mb;
}

/// Residual of the first-order identity
///   A_n - f(R) = sum_{m<n} Delta A_m/m! Gamma(m+1,R)
///              - sum_{m>=n} Delta A_m/m! gamma(m+1,R),
/// with the second sum cut at M; the returned value is the residual plus a
/// tail estimate sum_{M < m <= M+64} |Delta A_m| gamma(m+1,R)/m!, whose
/// factors die off super-geometrically once m outruns R. Regularized
/// incomplete gammas keep every factor finite at large m.
inline double first_order_identity_residual(const Sequence& seq, long n, double R, long M) {
    if (n < 0 || M < n) throw std::invalid_argument("first_order_identity_residual: need M >= n >= 0");
    if (!(R > 0)) throw std::invalid_argument("first_order_identity_residual: R must be positive");
    double A_n = seq.value(n);
    double fR = seq.has_transform() ? seq.transform(0, R)
                                    : eval_poisson_transform(seq, 0, R).value;
    double s1 = 0.0;
    for (long m = 0; m < n; ++m)
        s1 += seq.delta(1, m) * regularized_gamma_q(static_cast<unsigned long>(m), R);
    double s2 = 0.0;
    for (long m = n; m <= M; ++m)
        s2 += seq.delta(1, m) * regularized_gamma_p(static_cast<unsigned long>(m), R);
    double tail = 0.0;
    long lim = seq.max_index();
    for (long m = M + 1; m <= M + 64; ++m) {
        if (lim >= 0 && m + 1 > lim) break;
        tail += std::fabs(seq.delta(1, m)) * regularized_gamma_p(static_cast<unsigned long>(m), R);
    }
    return std::fabs(A_n - fR - (s1 - s2)) + tail;
}

}  // namespace depoisson

#endif
