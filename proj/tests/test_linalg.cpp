#include "doctest.h"

#include <cstdint>
#include <stdexcept>

#include "tietime/linalg.hpp"
#include "tietime/rng.hpp"

using namespace tietime;

namespace {

using Matrix = std::vector<std::vector<Rational>>;

std::vector<Rational> matvec(const Matrix& a, const std::vector<Rational>& x) {
    std::vector<Rational> out(a.size(), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < x.size(); ++j) out[i] += a[i][j] * x[j];
    }
    return out;
}

}  // namespace

TEST_CASE("rational elimination: unique solution") {
    const Matrix a{{Rational(2), Rational(1)}, {Rational(1), Rational(-1)}};
    const std::vector<Rational> b{Rational(7, 2), Rational(1)};
    const auto r = solve_rational_system(a, b);
    REQUIRE(r.consistent);
    CHECK(r.rank == 2);
    CHECK(r.nullspace.empty());
    CHECK(r.particular[0] == Rational(3, 2));
    CHECK(r.particular[1] == Rational(1, 2));
}

TEST_CASE("rational elimination: free variables give a null space") {
    const Matrix a{{Rational(1), Rational(2), Rational(3)}};
    const std::vector<Rational> b{Rational(6)};
    const auto r = solve_rational_system(a, b);
    REQUIRE(r.consistent);
    CHECK(r.rank == 1);
    CHECK(r.nullspace.size() == 2);
    CHECK(matvec(a, r.particular) == b);
    for (const auto& v : r.nullspace) {
        CHECK(matvec(a, v) == std::vector<Rational>{Rational(0)});
    }
}

TEST_CASE("rational elimination: certificate witnesses inconsistency") {
    const Matrix a{{Rational(1), Rational(1)},
                   {Rational(2), Rational(2)},
                   {Rational(1), Rational(-1)}};
    const std::vector<Rational> b{Rational(1), Rational(3), Rational(0)};
    const auto r = solve_rational_system(a, b);
    REQUIRE_FALSE(r.consistent);
    REQUIRE(r.certificate.size() == 3);
    // certificate^T A = 0 and certificate^T b != 0
    Rational dot_b = 0;
    std::vector<Rational> row(a[0].size(), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot_b += r.certificate[i] * b[i];
        for (std::size_t j = 0; j < row.size(); ++j) row[j] += r.certificate[i] * a[i][j];
    }
    CHECK(row == std::vector<Rational>(row.size(), Rational(0)));
    CHECK(dot_b != 0);
}

TEST_CASE("sparse exact solve agrees with dense elimination") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const int n = 14;
        SparseIntSystem sys;
        sys.n = n;
        sys.rows.resize(n);
        Matrix dense(n, std::vector<Rational>(n, Rational(0)));
        std::uint64_t ctr = seed * 1000;
        for (int i = 0; i < n; ++i) {
            // strictly dominant diagonal keeps the matrix invertible
            sys.rows[i].push_back({i, 20});
            dense[i][i] = 20;
            for (int off : {-3, -1, 1, 2}) {
                const int j = i + off;
                if (j < 0 || j >= n) continue;
                const long v = static_cast<long>(mix64(++ctr) % 9) - 4;
                if (v == 0) continue;
                sys.rows[i].push_back({j, v});
                dense[i][j] = v;
            }
        }
        std::vector<Rational> b(n);
        for (int i = 0; i < n; ++i) {
            b[i] = make_rational(static_cast<long>(mix64(++ctr) % 41) - 20,
                                 1 + static_cast<long>(mix64(++ctr) % 5));
        }
        const auto sparse = solve_sparse_exact(sys, b);
        const auto densed = solve_rational_system(dense, b);
        REQUIRE(densed.consistent);
        CHECK(sparse == densed.particular);
    }
}

TEST_CASE("sparse exact solve returns large exact rationals intact") {
    // 2x2 with an awkward determinant: the result must verify exactly
    SparseIntSystem sys;
    sys.n = 2;
    sys.rows = {{{0, 1000000007L}, {1, 1}}, {{0, 1}, {1, 999999937L}}};
    const std::vector<Rational> b{Rational(1), Rational(1, 3)};
    const auto x = solve_sparse_exact(sys, b);
    CHECK(Rational(1000000007L) * x[0] + x[1] == 1);
    CHECK(x[0] + Rational(999999937L) * x[1] == Rational(1, 3));
}

TEST_CASE("banded double LU solves a dominant tridiagonal system") {
    const int n = 50;
    BandedLU lu(n, 1, 1);
    std::vector<double> rhs(n, 1.0);
    for (int i = 0; i < n; ++i) {
        lu.at(i, i) = 4.0;
        if (i > 0) lu.at(i, i - 1) = -1.0;
        if (i + 1 < n) lu.at(i, i + 1) = -1.0;
    }
    lu.factor();
    auto x = rhs;
    lu.solve(x);
    // residual of the original system
    for (int i = 0; i < n; ++i) {
        double acc = 4.0 * x[i];
        if (i > 0) acc -= x[i - 1];
        if (i + 1 < n) acc -= x[i + 1];
        CHECK(acc == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(lu.at(0, 5), std::out_of_range);
}
