#include <doctest.h>

#include "gored/field.hpp"
#include "gored/matrix.hpp"

using namespace gored;

namespace {

// Independent rank oracle: plain fraction-free elimination over Z with a
// final reduction mod p. Only used to cross-check Mat::rref.
std::size_t rank_mod_p_oracle(std::vector<std::vector<long>> m, long p) {
    std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
    for (auto& r : m)
        for (auto& x : r) x = ((x % p) + p) % p;
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t piv = rank;
        while (piv < rows && m[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[piv], m[rank]);
        long inv = 1;  // modular inverse by exhaustion; fine for tiny p
        for (long t = 1; t < p; ++t)
            if (t * m[rank][c] % p == 1) inv = t;
        for (auto& x : m[rank]) x = x * inv % p;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == rank || m[i][c] == 0) continue;
            long f = m[i][c];
            for (std::size_t j = 0; j < cols; ++j) m[i][j] = ((m[i][j] - f * m[rank][j]) % p + p) % p;
        }
        ++rank;
    }
    return rank;
}

template <class F>
Mat<F> from_longs(const F& f, std::vector<std::vector<long>> rows) {
    Mat<F> m(f, rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m.at(i, j) = f.from_long(rows[i][j]);
    return m;
}

}  // namespace

TEST_SUITE("field") {
    TEST_CASE("rational arithmetic stays reduced") {
        Rationals q;
        auto a = q.parse("2/4");
        CHECK(q.str(a) == "1/2");
        CHECK(q.str(q.add(a, q.parse("1/3"))) == "5/6");
        CHECK(q.str(q.inv(q.parse("-3/7"))) == "-7/3");
        CHECK_THROWS_AS(q.inv(q.zero()), Error);
    }

    TEST_CASE("prime field arithmetic") {
        PrimeField f(32003);
        CHECK(f.mul(f.from_long(-1), f.from_long(-1)) == 1);
        CHECK(f.mul(f.inv(12345), 12345) == 1);
        CHECK_THROWS_AS(PrimeField(32004), Error);
        CHECK(f.parse("1/2") == f.div(1, 2));
    }

    TEST_CASE("prime field agrees with integer arithmetic mod p") {
        PrimeField f(97);
        Rng rng(42);
        for (int trial = 0; trial < 200; ++trial) {
            long a = rng.small_int(1000), b = rng.small_int(1000);
            long sum = (((a + b) % 97) + 97) % 97;
            long prod = (((a * b) % 97) + 97) % 97;
            CHECK(f.add(f.from_long(a), f.from_long(b)) == static_cast<std::uint64_t>(sum));
            CHECK(f.mul(f.from_long(a), f.from_long(b)) == static_cast<std::uint64_t>(prod));
        }
    }
}

TEST_SUITE("matrix") {
    TEST_CASE("rank basics") {
        Rationals q;
        CHECK(Mat<Rationals>::identity(q, 2).rank() == 2);
        CHECK(Mat<Rationals>(q, 3, 4).rank() == 0);
    }

    TEST_CASE("rank over GF(5) matches the elimination oracle") {
        std::vector<std::vector<long>> rows = {{1, 2, 3}, {2, 4, 6}, {0, 1, 1}};
        CHECK(rank_mod_p_oracle(rows, 5) == 2);
        PrimeField f(5);
        CHECK(from_longs(f, rows).rank() == 2);
    }

    TEST_CASE("kernel basis") {
        Rationals q;
        CHECK(Mat<Rationals>::identity(q, 3).kernel_basis().cols() == 0);

        auto m = from_longs(q, {{1, 1}});
        auto k = m.kernel_basis();
        REQUIRE(k.cols() == 1);
        CHECK(q.eq(k.at(0, 0), q.neg(k.at(1, 0))));  // spans (1,-1)
        CHECK((m * k).is_zero());

        PrimeField f(5);
        auto mk = from_longs(f, {{1, 2, 3}, {2, 4, 6}, {0, 1, 1}}).kernel_basis();
        CHECK(mk.cols() == 1);
        CHECK((from_longs(f, {{1, 2, 3}, {2, 4, 6}, {0, 1, 1}}) * mk).is_zero());
    }

    TEST_CASE("solve") {
        Rationals q;
        auto id = Mat<Rationals>::identity(q, 3);
        std::vector<mpq_class> b = {q.from_long(5), q.from_long(-1), q.from_long(7)};
        auto x = id.solve(b);
        REQUIRE(x.has_value());
        CHECK(*x == b);

        auto zero = Mat<Rationals>(q, 2, 2);
        CHECK(!zero.solve({q.from_long(1), q.from_long(0)}).has_value());

        auto m = from_longs(q, {{1, 1}, {0, 1}});
        auto y = m.solve({q.from_long(3), q.from_long(1)});
        REQUIRE(y.has_value());
        CHECK((*y)[0] == 2);
        CHECK((*y)[1] == 1);
    }

    TEST_CASE("rank-nullity on random matrices") {
        Rationals q;
        Rng rng(7);
        for (int trial = 0; trial < 50; ++trial) {
            std::size_t r = 1 + rng.below(5), c = 1 + rng.below(5);
            Mat<Rationals> m(q, r, c);
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < c; ++j) m.at(i, j) = q.from_long(rng.small_int(3));
            auto k = m.kernel_basis();
            CHECK(m.rank() + k.cols() == c);
            CHECK((m * k).is_zero());
        }
    }

    TEST_CASE("randomized GF(p) elimination cross-check") {
        PrimeField f(32003);
        Rng rng(99);
        for (int trial = 0; trial < 30; ++trial) {
            std::size_t r = 1 + rng.below(4), c = 1 + rng.below(4);
            std::vector<std::vector<long>> rows(r, std::vector<long>(c));
            for (auto& row : rows)
                for (auto& x : row) x = rng.small_int(50);
            CHECK(from_longs(f, rows).rank() == rank_mod_p_oracle(rows, 32003));
        }
    }

    TEST_CASE("mixed prime fields are rejected") {
        PrimeField f5(5), f7(7);
        Mat<PrimeField> a(f5, 1, 1), b(f7, 1, 1);
        CHECK_THROWS_AS(a * b, FieldMismatch);
    }

    TEST_CASE("span builder") {
        Rationals q;
        SpanBuilder<Rationals> sb(q, 3);
        CHECK(sb.add({q.from_long(1), q.from_long(2), q.from_long(0)}));
        CHECK(sb.add({q.from_long(0), q.from_long(1), q.from_long(1)}));
        CHECK(!sb.add({q.from_long(1), q.from_long(3), q.from_long(1)}));
        CHECK(sb.dim() == 2);
        CHECK(sb.contains({q.from_long(2), q.from_long(5), q.from_long(1)}));
        CHECK(!sb.contains({q.from_long(0), q.from_long(0), q.from_long(1)}));
    }
}
