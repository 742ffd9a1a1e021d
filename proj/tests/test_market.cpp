#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "janus/error.hpp"
#include "janus/market.hpp"

using namespace janus;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

// Random correlation matrix: normalized Gram matrix of random vectors.
Matrix random_correlation(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix a(n, n + 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n + 2; ++j) a(i, j) = g(rng);
    Matrix c = multiply(a, transpose(a));
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out(i, j) = i == j ? 1.0 : c(i, j) / std::sqrt(c(i, i) * c(j, j));
    return out;
}

}  // namespace

TEST_CASE("cholesky of the identity is the identity") {
    CHECK(cholesky_factor(Matrix::identity(4)) == Matrix::identity(4));
}

TEST_CASE("cholesky closed form for 2x2") {
    const Matrix l = cholesky_factor(from_rows({{1.0, 0.5}, {0.5, 1.0}}));
    CHECK(l(0, 0) == 1.0);
    CHECK(l(0, 1) == 0.0);
    CHECK(l(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(l(1, 1) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));
}

TEST_CASE("cholesky reproduces random correlation matrices") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix c = random_correlation(2 + trial % 5, rng);
        const Matrix l = cholesky_factor(c);
        CHECK(max_abs_diff(multiply(l, transpose(l)), c) <= 1e-10);
    }
}

TEST_CASE("correlation validation") {
    CHECK_THROWS_AS(CorrelationMatrix::make(from_rows({{1.0, 1.01}, {1.01, 1.0}})), ValidationError);
    CHECK_THROWS_AS(CorrelationMatrix::make(from_rows({{1.0, 0.2}, {0.3, 1.0}})), ValidationError);
    CHECK_THROWS_AS(CorrelationMatrix::make(from_rows({{0.9, 0.0}, {0.0, 1.0}})), ValidationError);
    CHECK_THROWS_AS(CorrelationMatrix::make(Matrix(2, 3)), ValidationError);
    // Perfect correlation is semidefinite and accepted.
    CHECK_NOTHROW(CorrelationMatrix::make(from_rows({{1.0, 1.0}, {1.0, 1.0}})));

    const Matrix bad = from_rows({{1.0, 0.9, -0.9}, {0.9, 1.0, 0.9}, {-0.9, 0.9, 1.0}});
    try {
        cholesky_factor(bad);
        FAIL("expected a pivot failure");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("pivot 2") != std::string::npos);
    }
    try {
        CorrelationMatrix::make(bad);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(e.field() == "correlation");
    }
}

TEST_CASE("asset step degenerate cases") {
    const std::vector<AssetSpec> specs{{0, AssetKind::Crypto, 0.01, 0.0, 0.0},
                                       {1, AssetKind::Rwa, -0.002, 0.0, 0.0}};
    const Matrix l = Matrix::identity(2);
    const std::vector<double> p{100.0, 1.0};
    const auto next = step_asset_prices(p, specs, l, std::vector<double>{3.0, -7.0});
    CHECK(next[0] == doctest::Approx(100.0 * std::exp(0.01)).epsilon(1e-15));
    CHECK(next[1] == doctest::Approx(std::exp(-0.002)).epsilon(1e-15));

    const std::vector<AssetSpec> still{{0, AssetKind::Crypto, 0.0, 0.0, 0.0}};
    CHECK(step_asset_prices(std::vector<double>{2.5}, still, Matrix::identity(1),
                            std::vector<double>{1.3})[0] == 2.5);
    CHECK_THROWS_AS(step_asset_prices(p, specs, l, std::vector<double>{1.0}), DimensionError);
}

TEST_CASE("asset prices stay positive") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 5.0);
    const std::vector<AssetSpec> specs{{0, AssetKind::Crypto, 0.0, 0.5, 0.0}};
    std::vector<double> p{1.0};
    for (int i = 0; i < 10000; ++i) {
        p = step_asset_prices(p, specs, Matrix::identity(1), std::vector<double>{g(rng)});
        CHECK(p[0] > 0.0);
        if (p[0] < 1e-200) p[0] = 1.0;
    }
}

TEST_CASE("log-return mean matches its drift over 1e6 steps") {
    const double mu = 0.0005, sigma = 0.04;
    const std::vector<AssetSpec> specs{{0, AssetKind::Crypto, mu, sigma, 0.0}};
    const Matrix l = Matrix::identity(1);
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g;
    const int n = 1000000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = std::log(step_asset_prices(std::vector<double>{1.0}, specs, l,
                                                    std::vector<double>{g(rng)})[0]);
        sum += r;
        sq += r * r;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::abs(mean - (mu - 0.5 * sigma * sigma)) <= 3.0 * se);
}

TEST_CASE("correlated log-returns reproduce the correlation") {
    std::mt19937_64 rng(33);
    const Matrix c = random_correlation(3, rng);
    const auto corr = CorrelationMatrix::make(c);
    const std::vector<AssetSpec> specs{{0, AssetKind::Crypto, 0.0, 0.03, 0.0},
                                       {1, AssetKind::Crypto, 0.0, 0.05, 0.0},
                                       {2, AssetKind::Rwa, 0.0, 0.001, 0.0}};
    std::normal_distribution<double> g;
    const int n = 1000000;
    double s[3]{}, ss[3][3]{};
    std::vector<double> z(3);
    for (int k = 0; k < n; ++k) {
        for (double& v : z) v = g(rng);
        const auto r = asset_log_returns(specs, corr.factor(), z);
        for (int i = 0; i < 3; ++i) {
            s[i] += r[i];
            for (int j = 0; j < 3; ++j) ss[i][j] += r[i] * r[j];
        }
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const double cij = ss[i][j] / n - (s[i] / n) * (s[j] / n);
            const double vi = ss[i][i] / n - (s[i] / n) * (s[i] / n);
            const double vj = ss[j][j] / n - (s[j] / n) * (s[j] / n);
            const double rho_hat = cij / std::sqrt(vi * vj);
            const double se = (1.0 - c(i, j) * c(i, j)) / std::sqrt(static_cast<double>(n));
            CHECK(std::abs(rho_hat - c(i, j)) <= 3.0 * se + 1e-12);
        }
}

TEST_CASE("net demand") {
    DemandParams p;
    p.base_inflow = 1000.0;
    p.sentiment_gain = 3.0;
    p.deviation_gain = -2.0;
    CHECK(net_demand(1.0, 1.0, 0.0, p, 0.0) == 1000.0);

    DemandParams zero = p;
    zero.base_inflow = 0.0;
    CHECK(net_demand(1.3, 1.0, 0.2, zero, 0.0) == 0.0);

    DemandParams d;
    d.base_inflow = 100.0;
    d.deviation_gain = -2.0;
    CHECK(net_demand(1.05, 1.0, 0.0, d, 0.0) == doctest::Approx(90.0).epsilon(1e-12));

    DemandParams noisy = zero;
    noisy.noise_vol = 4.0;
    CHECK(net_demand(1.0, 1.0, 0.0, noisy, -2.5) == -10.0);
}

TEST_CASE("portfolio variance examples") {
    const auto id = CorrelationMatrix::identity(2);
    CHECK(portfolio_variance(std::vector<double>{0.5, 0.5}, std::vector<double>{0.04, 0.01}, id) ==
          doctest::Approx(0.0125).epsilon(1e-15));
    const auto one = CorrelationMatrix::make(from_rows({{1.0, 1.0}, {1.0, 1.0}}));
    CHECK(portfolio_variance(std::vector<double>{0.5, 0.5}, std::vector<double>{0.04, 0.04}, one) ==
          doctest::Approx(0.04).epsilon(1e-15));
    CHECK_THROWS_AS(portfolio_variance(std::vector<double>{1.0}, std::vector<double>{0.04, 0.01}, id),
                    ValidationError);
}

TEST_CASE("portfolio variance with identity correlation is the diagonal sum") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 6;
        std::vector<double> w(n), v(n);
        double total = 0.0;
        for (auto& x : w) total += (x = u(rng));
        for (auto& x : w) x /= total;
        for (auto& x : v) x = u(rng);
        double expected = 0.0;
        for (std::size_t i = 0; i < n; ++i) expected += w[i] * w[i] * v[i];
        CHECK(portfolio_variance(w, v, CorrelationMatrix::identity(n)) == expected);
    }
}

TEST_CASE("portfolio variance is non-decreasing in correlation") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 1.0), r(-1.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const double a = u(rng);
        const std::vector<double> w{a, 1.0 - a};
        const std::vector<double> v{u(rng) + 1e-6, u(rng) + 1e-6};
        double lo = r(rng), hi = r(rng);
        if (lo > hi) std::swap(lo, hi);
        const auto cl = CorrelationMatrix::make(from_rows({{1.0, lo}, {lo, 1.0}}));
        const auto ch = CorrelationMatrix::make(from_rows({{1.0, hi}, {hi, 1.0}}));
        const double vl = portfolio_variance(w, v, cl), vh = portfolio_variance(w, v, ch);
        CHECK(vl >= 0.0);
        CHECK(vh >= vl);
    }
}

TEST_CASE("asset spec validation") {
    CHECK_THROWS_AS((AssetSpec{0, AssetKind::Crypto, 0.0, -0.1, 0.0}.validate()), ValidationError);
    CHECK_THROWS_AS((AssetSpec{0, AssetKind::Rwa, 0.0, 0.0, -0.01}.validate()), ValidationError);
    DemandParams d;
    d.noise_vol = -1.0;
    CHECK_THROWS_AS(d.validate(), ValidationError);
}
