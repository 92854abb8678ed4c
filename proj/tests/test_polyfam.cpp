#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "depoisson/polyfam.hpp"

using namespace depoisson;

namespace {

Polynomial make_poly(std::vector<long> coeffs) {
    std::vector<Rational> c;
    for (long v : coeffs) c.emplace_back(v);
    return Polynomial{std::move(c)};
}

// n! [z^n] e^z (z - a)^m by brute-force expansion of the product; the
// series for e^z is cut at order n, which is exact for coefficient n.
Rational series_extract(long n, unsigned m, const Rational& a) {
    std::vector<Rational> poly(m + 1);  // (z - a)^m
    poly[0] = 1;
    for (unsigned i = 1; i <= m; ++i) poly[i] = 0;
    for (unsigned rep = 0; rep < m; ++rep) {
        std::vector<Rational> next(m + 1);
        for (unsigned i = 0; i <= m; ++i) {
            next[i] = -a * poly[i];
            if (i > 0) next[i] += poly[i - 1];
        }
        poly = next;
    }
    Rational acc = 0;
    for (unsigned i = 0; i <= m && static_cast<long>(i) <= n; ++i)
        acc += poly[i] / factorial(static_cast<unsigned long>(n - i));
    return acc * factorial(static_cast<unsigned long>(n));
}

}  // namespace

TEST_CASE("tau table") {
    CHECK(tau_poly(0) == make_poly({1}));
    CHECK(tau_poly(1) == Polynomial{});
    CHECK(tau_poly(2) == make_poly({0, -1}));
    CHECK(tau_poly(3) == make_poly({0, 2}));
    CHECK(tau_poly(4) == make_poly({0, -6, 3}));
    CHECK(tau_poly(5) == make_poly({0, 24, -20}));
    CHECK(tau_poly(6) == make_poly({0, -120, 130, -15}));
}

TEST_CASE("tau degree and sign structure") {
    for (unsigned m = 0; m <= 20; ++m) {
        const Polynomial& t = tau_poly(m);
        if (m == 1) {
            CHECK(t.is_zero());
            continue;
        }
        CHECK(t.degree() == static_cast<long>(m / 2));
        // (-1)^m tau_m(-y) has nonnegative coefficients
        Polynomial r = t.reflected();
        if (m & 1u) r *= Rational(-1);
        for (const auto& c : r.coeffs()) CHECK(c >= 0);
    }
}

TEST_CASE("tau matches n![z^n] e^z (z-n)^m extraction") {
    for (long n = 0; n <= 8; ++n)
        for (unsigned m = 0; m <= 8; ++m)
            CHECK(tau_poly(m).eval(Rational(n)) == series_extract(n, m, Rational(n)));
}

TEST_CASE("rho table") {
    CHECK(rho_poly(0) == make_poly({1}));
    CHECK(rho_poly(1) == Polynomial{});
    CHECK(rho_poly(2) == make_poly({0, -1}));
    CHECK(rho_poly(3) == make_poly({0, -1}));
    CHECK(rho_poly(4) == make_poly({0, -1, 3}));
    CHECK(rho_poly(5) == make_poly({0, -1, 10}));
    CHECK(rho_poly(6) == make_poly({0, -1, 25, -15}));
    CHECK(rho_poly(7) == make_poly({0, -1, 56, -105}));
    CHECK(rho_poly(2).eval(Rational(-1)) == 1);
    CHECK(rho_poly(6).eval(Rational(-1)) == 41);
}

TEST_CASE("rho reflections have nonnegative coefficients") {
    for (unsigned j = 0; j <= 20; ++j)
        for (const auto& c : rho_poly(j).reflected().coeffs()) CHECK(c >= 0);
}

TEST_CASE("rho equals tau composed with Stirling numbers") {
    for (unsigned j = 0; j <= 12; ++j) {
        Polynomial acc;
        for (unsigned s = 0; s <= j; ++s) acc += tau_poly(s) * Rational(stirling2(j, s));
        CHECK(acc == rho_poly(j));
    }
}

TEST_CASE("charlier explicit values") {
    CHECK(charlier_poly(Rational(1), 0) == make_poly({1}));
    CHECK(charlier_poly(Rational(1), 1) == make_poly({-1, 1}));
    CHECK(charlier_poly(Rational(1), 2).eval(Rational(2)) == -1);
    CHECK_THROWS_AS(charlier_poly(Rational(0), 2), std::invalid_argument);
}

TEST_CASE("charlier two-definition consistency") {
    // explicit formula versus n![z^n] e^z (z/lambda - 1)^m: the latter equals
    // lambda^{-m} n![z^n] e^z (z-lambda)^m
    std::vector<Rational> lambdas = {Rational(1), Rational(2), Rational(5, 2)};
    for (const auto& lam : lambdas)
        for (unsigned m = 0; m <= 6; ++m)
            for (long n = 0; n <= 8; ++n) {
                Rational lhs = charlier_poly(lam, m).eval(Rational(n));
                Rational rhs = series_extract(n, m, lam) / pow_rational(lam, m);
                CHECK(lhs == rhs);
            }
}

TEST_CASE("charlier_eval agrees with exact path") {
    CHECK(charlier_eval(2.0, 0, 7.3) == 1.0);
    CHECK(charlier_eval(1.0, 2, 2.0) == doctest::Approx(-1.0).epsilon(1e-14));
    double exact = to_double(charlier_poly(Rational(-5), 3).eval(Rational(-4)));
    CHECK(charlier_eval(-5.0, 3, -4.0) == doctest::Approx(exact).epsilon(1e-13));
    CHECK_THROWS_AS(charlier_eval(0.0, 1, 1.0), std::invalid_argument);
}

TEST_CASE("weighted charlier ties tau at lambda = n") {
    // tau_m(n) = n^m C_m(n, n)
    for (long n = 1; n <= 10; ++n)
        for (unsigned m = 0; m <= 10; ++m)
            CHECK(charlier_weighted_exact(Rational(n), m, Rational(n)) ==
                  tau_poly(m).eval(Rational(n)));
}

TEST_CASE("charlier duality expansions") {
    // t^N C_N(t,y) = sum_j binom(N,j) tau_{N-j}(y) (y-t)^j
    //             = sum_j binom(N,j) tau_{N-j}(t) (y-t)_{(j)}
    std::vector<std::pair<Rational, Rational>> pts = {
        {Rational(2), Rational(3)}, {Rational(7), Rational(-4)}, {Rational(-1), Rational(5)}};
    for (const auto& [t, y] : pts)
        for (unsigned N = 0; N <= 8; ++N) {
            Rational direct = charlier_weighted_exact(t, N, y);
            Rational via_y = 0, via_t = 0;
            for (unsigned j = 0; j <= N; ++j) {
                Rational b(binomial(N, j));
                via_y += b * tau_poly(N - j).eval(y) * pow_rational(y - t, j);
                via_t += b * tau_poly(N - j).eval(t) * falling_factorial(y - t, j);
            }
            CHECK(direct == via_y);
            CHECK(direct == via_t);
        }
}

TEST_CASE("inversion convolution collapses to delta_{s0}") {
    std::vector<std::pair<Rational, Rational>> pts = {{Rational(1), Rational(1)},
                                                      {Rational(2), Rational(3)},
                                                      {Rational(11, 2), Rational(10)},
                                                      {Rational(3), Rational(-7)}};
    for (const auto& [R, n] : pts)
        for (unsigned s = 0; s <= 12; ++s) {
            Rational acc = 0;
            for (unsigned j = 0; j <= s; ++j) {
                acc += charlier_weighted_exact(R, s - j, n) *
                       charlier_weighted_exact(-R, j, -n) /
                       (Rational(factorial(s - j)) * Rational(factorial(j)));
            }
            CHECK(acc == (s == 0 ? Rational(1) : Rational(0)));
        }
}

TEST_CASE("stirling numbers") {
    CHECK(stirling2(0, 0) == 1);
    CHECK(stirling2(4, 4) == 1);
    CHECK(stirling2(3, 2) == 3);
    CHECK(stirling2(4, 2) == 7);
    CHECK(stirling2(2, 5) == 0);
    CHECK(stirling2(5, 0) == 0);
    // recurrence spot check
    for (unsigned j = 1; j <= 10; ++j)
        for (unsigned s = 1; s <= j; ++s)
            CHECK(stirling2(j, s) ==
                  Int(static_cast<long>(s)) * stirling2(j - 1, s) + stirling2(j - 1, s - 1));
}

TEST_CASE("ramanujan b coefficients") {
    CHECK(ramanujan_b(1, 1) == 1);
    CHECK(ramanujan_b(2, 2) == 1);
    CHECK(ramanujan_b(3, 4) == 3);
    CHECK(ramanujan_b(4, 5) == 10);
    CHECK(ramanujan_b(3, 5) == 0);
    CHECK(ramanujan_b(4, 3) == 0);
    for (long k = 2; k <= 12; ++k) CHECK(ramanujan_b(k, k) == 1);
}

TEST_CASE("rho bridges to the b coefficients") {
    // rho_n(-R) = sum_k b_{kn} R^{n-k+1} for n = 2..12
    for (long n = 2; n <= 12; ++n) {
        Polynomial lhs = rho_poly(static_cast<unsigned>(n)).reflected();
        Polynomial rhs;
        for (long k = 1; k <= n; ++k) {
            Int b = ramanujan_b(k, n);
            if (b == 0) continue;
            std::vector<Rational> mono(static_cast<std::size_t>(n - k + 2), Rational(0));
            mono.back() = Rational(b);
            rhs += Polynomial{std::move(mono)};
        }
        CHECK(lhs == rhs);
    }
}

TEST_CASE("falling factorial") {
    CHECK(falling_factorial(Rational(5), 0) == 1);
    CHECK(falling_factorial(Rational(5), 3) == 60);
    CHECK(falling_factorial(Rational(-2), 2) == 6);
    CHECK(falling_factorial(5.0, 3) == 60.0);
}

TEST_CASE("polynomial bounds") {
    CHECK(tau_bound(0, 10.0) == 1.0);
    CHECK(tau_bound(4, 4.0) == doctest::Approx(192.0));
    CHECK(tau_bound(2, 1.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(tau_bound(3, 0.5), std::domain_error);
    CHECK(charlier_bound(0, 3.0, 3.0) == doctest::Approx(0.5));
    CHECK(charlier_bound(2, 4.0, 4.0) == doctest::Approx(4.0));
    CHECK(charlier_bound(1, 0.0, 1.0) == doctest::Approx(0.5 * std::exp(1.0)));
    CHECK_THROWS_AS(charlier_bound(1, 1.0, 0.25), std::domain_error);
}

TEST_CASE("bound tightness on a random rational grid") {
    std::mt19937 rng(20240817);
    std::uniform_int_distribution<long> num(1, 40), den(1, 8), sgn(0, 1);
    for (int i = 0; i < 100; ++i) {
        Rational y(num(rng) + 8 * den(rng), den(rng));  // |y| >= 1 guaranteed
        if (sgn(rng)) y = -y;
        Rational t(num(rng), den(rng));
        if (sgn(rng)) t = -t;
        if (t == 0) t = 1;
        double yd = to_double(y), td = to_double(t);
        for (unsigned m = 0; m <= 10; ++m) {
            double tv = std::fabs(to_double(tau_poly(m).eval(y)));
            CHECK(tv <= tau_bound(m, yd) * (1 + 1e-12));
            // the order-0 majorant (1/2)e^{|y-t|/sqrt|y|} drops below
            // |C_0| = 1 when t is near y, so tightness starts at N = 1
            if (m == 0) continue;
            double cv = std::fabs(to_double(charlier_weighted_exact(t, m, y)));
            CHECK(cv <= charlier_bound(m, td, yd) * (1 + 1e-12));
        }
    }
}

TEST_CASE("difference of powers identity") {
    // Delta_x^s x^j at x = R - n equals s! sum over Stirling-weighted
    // falling factorials; checked through both sides of the identity
    //   sum_l binom(s,l) (-1)^{s-l} (R-n+l)^j = s! sum_i S(j,i) binom(R-n, i-s) ...
    // evaluated directly: Delta^s x^j |_{x=a} = s! sum_i S(j,i) a_(i-s) i!/(i-s)!/i! —
    // here verified in the raw form Delta^s x^j = s! Stirling{j}{s} at x = 0
    // and by direct alternating sums at rational points.
    std::vector<std::pair<Rational, Rational>> pts = {{Rational(3), Rational(2)},
                                                     {Rational(7, 2), Rational(3)},
                                                     {Rational(10), Rational(10)}};
    for (const auto& [R, n] : pts) {
        Rational a = R - n;
        for (unsigned j = 0; j <= 8; ++j)
            for (unsigned s = 0; s <= j; ++s) {
                Rational lhs = 0;  // Delta^s x^j at x = a
                for (unsigned l = 0; l <= s; ++l) {
                    Rational t = Rational(binomial(s, l)) * pow_rational(a + static_cast<long>(l),
                                                                         static_cast<long>(j));
                    if ((s - l) & 1u) lhs -= t; else lhs += t;
                }
                // expansion through Stirling numbers: Delta^s x^j =
                // sum_i S(j,i) Delta^s x_(i) and Delta^s x_(i) =
                // i!/(i-s)! x_(i-s) for i >= s, else 0
                Rational rhs = 0;
                for (unsigned i = s; i <= j; ++i)
                    rhs += Rational(stirling2(j, i)) * Rational(factorial(i)) /
                           Rational(factorial(i - s)) * falling_factorial(a, i - s);
                CHECK(lhs == rhs);
            }
    }
    // Charlier/tau bridge through power differences:
    // sum_s (-R)^s C_s(-R,-n)/s! Delta^s x^j|_0 =
    // sum_s tau_s(-R)/s! Delta^s x^j|_{R-n}
    for (const auto& [R, n] : pts)
        for (unsigned j = 0; j <= 8; ++j) {
            Rational lhs = 0, rhs = 0;
            for (unsigned s = 0; s <= j; ++s) {
                // Delta^s x^j at 0 is s! S(j,s)
                lhs += charlier_weighted_exact(-R, s, -n) * Rational(stirling2(j, s));
                Rational dpow = 0;  // Delta^s x^j at R - n
                for (unsigned l = 0; l <= s; ++l) {
                    Rational t = Rational(binomial(s, l)) *
                                 pow_rational(R - n + static_cast<long>(l), static_cast<long>(j));
                    if ((s - l) & 1u) dpow -= t; else dpow += t;
                }
                rhs += tau_poly(s).eval(-R) * dpow / Rational(factorial(s));
            }
            CHECK(lhs == rhs);
        }
    // at a = 0 only i = s survives: Delta^s x^j |_0 = s! S(j,s)
    for (unsigned j = 0; j <= 8; ++j)
        for (unsigned s = 0; s <= j; ++s) {
            Rational lhs = 0;
            for (unsigned l = 0; l <= s; ++l) {
                Rational t = Rational(binomial(s, l)) *
                             pow_rational(Rational(static_cast<long>(l)), static_cast<long>(j));
                if ((s - l) & 1u) lhs -= t; else lhs += t;
            }
            CHECK(lhs == Rational(factorial(s)) * Rational(stirling2(j, s)));
        }
}
