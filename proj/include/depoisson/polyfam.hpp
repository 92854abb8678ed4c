#ifndef DEPOISSON_POLYFAM_HPP
#define DEPOISSON_POLYFAM_HPP

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "depoisson/polynomial.hpp"
#include "depoisson/rational.hpp"

namespace depoisson {

namespace detail {

// EGF coefficients of ((1+z)e^{-z})^x. Writing the series as sum B_k(x) z^k,
// the logarithmic derivative (1+z)F' = -xzF gives
//   (k+1) B_{k+1} = -x B_{k-1} - k B_k.
inline void extend_tau_egf(std::vector<Polynomial>& B, std::size_t upto) {
    if (B.empty()) {
        B.push_back(Polynomial::constant(1));
        B.push_back(Polynomial{});
    }
    while (B.size() <= upto) {
        std::size_t k = B.size() - 1;
        Polynomial next = B[k - 1].shifted_up();  // x * B_{k-1}
        next *= Rational(-1);
        next -= B[k] * Rational(static_cast<long>(k));
        next *= Rational(1, static_cast<long>(k + 1));
        B.push_back(std::move(next));
    }
}

// EGF coefficients of e^{-x(e^z-1-z)}: G' = -x(e^z-1)G gives
//   (j+1) D_{j+1} = -x sum_{i=1}^{j} D_{j-i}/i!.
inline void extend_rho_egf(std::vector<Polynomial>& D, std::size_t upto) {
    if (D.empty()) D.push_back(Polynomial::constant(1));
    while (D.size() <= upto) {
        std::size_t j = D.size() - 1;
        Polynomial acc;
        Rational inv_fact = 1;
        for (std::size_t i = 1; i <= j; ++i) {
            inv_fact /= static_cast<long>(i);
            acc += D[j - i] * inv_fact;
        }
        Polynomial next = acc.shifted_up();
        next *= Rational(-1, static_cast<long>(j + 1));
        D.push_back(std::move(next));
    }
}

inline double factorial_d(unsigned long n) {
    return n < 171 ? std::tgamma(static_cast<double>(n) + 1.0)
                   : std::exp(std::lgamma(static_cast<double>(n) + 1.0));
}

}  // namespace detail

/// tau_m(x): exact polynomial of degree floor(m/2), m! times the z^m EGF
/// coefficient of ((1+z)e^{-z})^x.
inline const Polynomial& tau_poly(unsigned m) {
    static std::vector<Polynomial> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    if (cache.size() <= m) {
        static std::vector<Polynomial> egf;
        detail::extend_tau_egf(egf, m);
        while (cache.size() <= m) {
            std::size_t k = cache.size();
            cache.push_back(egf[k] * Rational(factorial(static_cast<unsigned long>(k))));
        }
    }
    return cache[m];
}

/// rho_j(x): Mahler polynomial, j! times the z^j EGF coefficient of
/// e^{-x(e^z-1-z)}. rho_j(-x) has nonnegative coefficients.
inline const Polynomial& rho_poly(unsigned j) {
    static std::vector<Polynomial> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    if (cache.size() <= j) {
        static std::vector<Polynomial> egf;
        detail::extend_rho_egf(egf, j);
        while (cache.size() <= j) {
            std::size_t k = cache.size();
            cache.push_back(egf[k] * Rational(factorial(static_cast<unsigned long>(k))));
        }
    }
    return cache[j];
}

/// Falling factorial x(x-1)...(x-j+1) as an exact polynomial in x.
inline const Polynomial& falling_factorial_poly(unsigned j) {
    static std::vector<Polynomial> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    if (cache.empty()) cache.push_back(Polynomial::constant(1));
    while (cache.size() <= j) {
        std::size_t k = cache.size();
        Polynomial next = cache[k - 1].shifted_up();
        next -= cache[k - 1] * Rational(static_cast<long>(k - 1));
        cache.push_back(std::move(next));
    }
    return cache[j];
}

inline Rational falling_factorial(const Rational& x, unsigned j) {
    Rational acc = 1;
    for (unsigned i = 0; i < j; ++i) acc *= x - static_cast<long>(i);
    return acc;
}

inline double falling_factorial(double x, unsigned j) {
    double acc = 1.0;
    for (unsigned i = 0; i < j; ++i) acc *= x - static_cast<double>(i);
    return acc;
}

/// Charlier polynomial C_m(lambda, x) in x, from the explicit finite sum
/// C_m(lambda,x) = sum_j (-1)^{m-j} binom(m,j) x_(j) / lambda^j.
inline Polynomial charlier_poly(const Rational& lambda, unsigned m) {
    if (lambda == 0) throw std::invalid_argument("charlier_poly: lambda must be nonzero");
    Polynomial acc;
    Rational lam_pow = 1;
    for (unsigned j = 0; j <= m; ++j) {
        Rational c(binomial(m, j));
        c /= lam_pow;
        if ((m - j) & 1u) c = -c;
        acc += falling_factorial_poly(j) * c;
        lam_pow *= lambda;
    }
    return acc;
}

/// Exact value of the weighted Charlier polynomial R^m C_m(R, x).
/// This is the n![z^n] e^z (z-R)^m normalization used throughout.
inline Rational charlier_weighted_exact(const Rational& R, unsigned m, const Rational& x) {
    Rational acc = 0;
    Rational r_pow = 1;  // R^{m-j}, filled from j=m downward
    std::vector<Rational> powers(m + 1);
    for (unsigned j = 0; j <= m; ++j) {
        powers[m - j] = r_pow;
        r_pow *= R;
    }
    for (unsigned j = 0; j <= m; ++j) {
        Rational term = Rational(binomial(m, j)) * falling_factorial(x, j) * powers[j];
        if ((m - j) & 1u) acc -= term; else acc += term;
    }
    return acc;
}

/// Floating evaluation of C_m(lambda, x) by the explicit sum with
/// Neumaier-compensated accumulation.
inline double charlier_eval(double lambda, unsigned m, double x) {
    if (lambda == 0.0) throw std::invalid_argument("charlier_eval: lambda must be nonzero");
    double sum = 0.0, comp = 0.0;
    double binom = 1.0;    // binom(m, j)
    double lam_pow = 1.0;  // lambda^j
    double ff = 1.0;       // x_(j)
    for (unsigned j = 0; j <= m; ++j) {
        double term = binom * ff / lam_pow;
        if ((m - j) & 1u) term = -term;
        double t = sum + term;
        if (std::fabs(sum) >= std::fabs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
        binom *= static_cast<double>(m - j) / static_cast<double>(j + 1);
        lam_pow *= lambda;
        ff *= x - static_cast<double>(j);
    }
    return sum + comp;
}

inline double charlier_weighted(double R, unsigned m, double x) {
    return std::pow(R, static_cast<double>(m)) * charlier_eval(R, m, x);
}

/// Stirling number of the second kind S(j, s); zero when s > j.
inline Int stirling2(unsigned j, unsigned s) {
    if (s > j) return 0;
    static std::vector<std::vector<Int>> table;  // table[j][s]
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    if (table.empty()) table.push_back({Int(1)});
    while (table.size() <= j) {
        std::size_t n = table.size();
        std::vector<Int> row(n + 1);
        row[0] = 0;
        row[n] = 1;
        for (std::size_t s2 = 1; s2 < n; ++s2)
            row[s2] = Int(static_cast<long>(s2)) * table[n - 1][s2] + table[n - 1][s2 - 1];
        table.push_back(std::move(row));
    }
    return table[j][s];
}

/// Ramanujan's b_{kn} coefficients: b_{kk} = 1, zero outside k <= n <= 2k-2
/// (except the k=1 seed b_{11}=1), and
/// b_{k+1,n+1} = n b_{k,n-1} + (n-k+1) b_{k,n}.
inline Int ramanujan_b(long k, long n) {
    if (k < 1) return 0;
    if (k == 1) return n == 1 ? Int(1) : Int(0);
    if (n < k || n > 2 * k - 2) return 0;
    static std::vector<std::vector<Int>> rows;  // rows[k-1][n-k], k <= n <= 2k-2 (k=1: just b_11)
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    if (rows.empty()) rows.push_back({Int(1)});
    while (static_cast<long>(rows.size()) < k) {
        long kk = static_cast<long>(rows.size());  // building row kk+1 from row kk
        const auto& prev = rows[kk - 1];
        auto b_prev = [&](long nn) -> Int {
            if (kk == 1) return nn == 1 ? Int(1) : Int(0);
            if (nn < kk || nn > 2 * kk - 2) return 0;
            return prev[nn - kk];
        };
        std::vector<Int> row(kk + 1 >= 2 ? (2 * (kk + 1) - 2) - (kk + 1) + 1 : 1);
        for (long nn = kk + 1; nn <= 2 * (kk + 1) - 2; ++nn) {
            long m = nn - 1;  // recurrence index: b_{kk+1, m+1}
            row[nn - (kk + 1)] = Int(m) * b_prev(m - 1) + Int(m - kk + 1) * b_prev(m);
        }
        rows.push_back(std::move(row));
    }
    return rows[k - 1][n - k];
}

/// Majorant m! |y|^{floor(m/2)} / 2 for |tau_m(y)|, valid for |y| >= 1.
/// Returns 1 at m = 0.
inline double tau_bound(unsigned m, double y) {
    if (std::fabs(y) < 1.0) throw std::domain_error("tau_bound: requires |y| >= 1");
    if (m == 0) return 1.0;
    return detail::factorial_d(m) * std::pow(std::fabs(y), std::floor(m / 2.0)) / 2.0;
}

/// Majorant (1/2) N! |y|^{N/2} e^{|y-t|/sqrt|y|} for |t^N C_N(t,y)|,
/// valid for |y| >= 1.
inline double charlier_bound(unsigned N, double t, double y) {
    if (std::fabs(y) < 1.0) throw std::domain_error("charlier_bound: requires |y| >= 1");
    double ay = std::fabs(y);
    return 0.5 * detail::factorial_d(N) * std::pow(ay, N / 2.0) *
           std::exp(std::fabs(y - t) / std::sqrt(ay));
}

}  // namespace depoisson

#endif
