#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "dhitchin/continuum.hpp"
#include "dhitchin/instanton.hpp"
#include "dhitchin/random.hpp"

using namespace dhitchin;

namespace {

constexpr double kPi = std::numbers::pi;

ContinuumField zero_field(int p) {
    ContinuumField cf;
    cf.p = p;
    cf.sample = [p](double, double) {
        FieldSample s;
        s.Ax = s.Ay = s.P1 = s.P2 = CMatrix::Zero(p, p);
        return s;
    };
    return cf;
}

// Smooth non-solution U(2) field with analytic derivatives.
ContinuumField smooth_nonsolution() {
    ContinuumField cf;
    cf.p = 2;
    auto su2 = [](double a, double b, double c) {
        CMatrix m(2, 2);
        m << Complex(0, a), Complex(b, c), Complex(-b, c), Complex(0, -a);
        return m;
    };
    cf.sample = [su2](double x, double y) {
        FieldSample s;
        s.Ax = su2(std::sin(x), std::cos(y), x * y);
        s.Ay = su2(x * x, std::sin(y), 0.3);
        s.P1 = su2(std::cos(x + y), 0.2 * x, y);
        s.P2 = su2(0.5 * y, std::exp(0.1 * x), std::sin(x * y));
        return s;
    };
    return cf;
}

}  // namespace

TEST_CASE("discretize of the zero field is the exactly solvable constant lattice") {
    for (int n : {4, 9}) {
        auto field = discretize(zero_field(2), n, Boundary::Periodic);
        for (const auto& m : field.F)
            CHECK((m - double(n) * CMatrix::Identity(2, 2)).norm() == 0.0);
        for (const auto& m : field.G)
            CHECK((m - double(n) * CMatrix::Identity(2, 2)).norm() == 0.0);
        ResidualReport rep = residual_report(field);
        CHECK(rep.max_abs == 0.0);
    }
}

TEST_CASE("discretize implements the substitution identically") {
    auto cf = holomorphic_u1_field([](Complex z) { return z * z; },
                                   [](Complex z) { return 2.0 * z; });
    const int n = 7;
    auto field = discretize(cf, n, Boundary::Periodic);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double x = double(j + 1) / n, y = double(k + 1) / n;
            FieldSample s = cf.sample(x, y);
            CHECK((field.G(j, k) + s.Ax - Complex(0, 1) * s.P1 -
                   double(n) * CMatrix::Identity(1, 1))
                      .norm() == 0.0);
            CHECK((field.F(j, k) + s.Ay - Complex(0, 1) * s.P2 -
                   double(n) * CMatrix::Identity(1, 1))
                      .norm() == 0.0);
        }
}

TEST_CASE("holomorphic U(1) fields satisfy the continuum equations exactly") {
    auto cf = holomorphic_u1_field([](Complex z) { return std::exp(z); },
                                   [](Complex z) { return std::exp(z); });
    cf.validate_antihermitian(0.3, 0.7);
    auto pts = interior_grid(cf.domain, 5, 5);
    HitchinResidual res = hitchin_residual(cf, pts);
    CHECK(res.max_norm <= 1e-13);
}

TEST_CASE("zero field has zero continuum residual") {
    auto pts = interior_grid(Rect{}, 3, 3);
    CHECK(hitchin_residual(zero_field(3), pts).max_norm == 0.0);
}

namespace {

// Abelian non-solution with hand-written analytic derivatives.
ContinuumField abelian_nonsolution() {
    ContinuumField cf;
    cf.p = 1;
    auto im = [](double v) { return CMatrix::Constant(1, 1, Complex(0.0, v)); };
    cf.sample = [im](double x, double y) {
        return FieldSample{im(x * y), im(std::cos(x)), im(x * x), im(std::sin(y))};
    };
    cf.derivs = [im](double x, double y) {
        FieldDerivs d;
        d.ddx = {im(y), im(-std::sin(x)), im(2.0 * x), im(0.0)};
        d.ddy = {im(x), im(0.0), im(0.0), im(std::cos(y))};
        return d;
    };
    return cf;
}

}  // namespace

TEST_CASE("finite differences converge to analytic residuals at rate 2") {
    ContinuumField cf = abelian_nonsolution();
    std::vector<std::pair<double, double>> pts{{0.4, 0.55}, {0.8, 0.2}};

    HitchinResidual ref = hitchin_residual(cf, pts);  // analytic path
    CHECK(ref.max_norm > 0.1);                        // genuinely off-shell

    ContinuumField numeric = cf;
    numeric.derivs = nullptr;
    std::vector<double> hs{4e-2, 2e-2, 1e-2};
    std::vector<double> errs;
    for (double h : hs) {
        HitchinResidual r = hitchin_residual(numeric, pts, h);
        double e = 0.0;
        for (int i = 0; i < 2; ++i) {
            e = std::max(e, (r.curvature(i, 0) - ref.curvature(i, 0)).norm());
            e = std::max(e, (r.div(i, 0) - ref.div(i, 0)).norm());
            e = std::max(e, (r.curl(i, 0) - ref.curl(i, 0)).norm());
        }
        errs.push_back(e);
    }
    CHECK(errs[0] / errs[1] == Catch::Approx(4.0).epsilon(0.05));
    CHECK(errs[1] / errs[2] == Catch::Approx(4.0).epsilon(0.05));
}

TEST_CASE("cancellation guard rejects degenerate steps") {
    ContinuumField cf = smooth_nonsolution();
    cf.derivs = nullptr;
    std::vector<std::pair<double, double>> pts{{0.5, 0.5}};
    CHECK_THROWS_AS(hitchin_residual(cf, pts, 1e-12), std::invalid_argument);
    CHECK_THROWS_AS(hitchin_residual(cf, pts, 0.5), std::invalid_argument);
}

TEST_CASE("lattice-to-continuum rate: holomorphic families decay at order >= 0.9") {
    std::vector<int> ns{16, 32, 64, 128};
    auto linear = holomorphic_u1_field([](Complex z) { return z; },
                                       [](Complex) { return Complex(1.0); });
    RateTable t1 = lattice_to_continuum_rate(linear, ns);
    CHECK(t1.fitted_order >= 0.9);
    auto expf = holomorphic_u1_field([](Complex z) { return 0.5 * std::exp(z); },
                                     [](Complex z) { return 0.5 * std::exp(z); });
    RateTable t2 = lattice_to_continuum_rate(expf, ns);
    CHECK(t2.fitted_order >= 0.9);
}

TEST_CASE("lattice-to-continuum rate: zero field is exact") {
    std::vector<int> ns{8, 16, 32};
    RateTable t = lattice_to_continuum_rate(zero_field(1), ns);
    CHECK(t.exact);
    for (double v : t.values) CHECK(v == 0.0);
}

TEST_CASE("non-solution fields keep an order-one lattice residual") {
    // Non-holomorphic scalar field: the raw residual tends to a nonzero
    // constant, so residual/n decays at order one, not two.
    ContinuumField cf;
    cf.p = 1;
    cf.sample = [](double x, double y) {
        FieldSample s;
        s.Ax = s.Ay = CMatrix::Zero(1, 1);
        s.P1 = CMatrix::Constant(1, 1, Complex(0.0, x * x + 0.5 * y));
        s.P2 = CMatrix::Constant(1, 1, Complex(0.0, std::sin(3.0 * x) * y));
        return s;
    };
    std::vector<int> ns{16, 32, 64, 128};
    RateTable t = lattice_to_continuum_rate(cf, ns);
    // raw residual = (residual/n) * n approaches a constant
    std::vector<double> raw;
    for (size_t i = 0; i < t.values.size(); ++i) raw.push_back(t.values[i] * ns[i]);
    CHECK(raw.back() > 0.1);
    CHECK(std::abs(raw[3] / raw[2] - 1.0) <= 0.1);
    CHECK(t.fitted_order <= 1.3);

    // solution families decay a full order faster
    auto linear = holomorphic_u1_field([](Complex z) { return z; },
                                       [](Complex) { return Complex(1.0); });
    CHECK(lattice_to_continuum_rate(linear, ns).fitted_order >= t.fitted_order + 0.5);
}

TEST_CASE("rate fit needs at least three sizes") {
    std::vector<int> ns{8, 16};
    CHECK_THROWS_AS(lattice_to_continuum_rate(zero_field(1), ns), std::invalid_argument);
}

TEST_CASE("closed-form profile values and ODEs") {
    auto at0 = nahm_profile_closed_form(0.0);
    CHECK(at0.f == Catch::Approx(kPi / 2.0));
    CHECK(at0.g == 0.0);
    CHECK(at0.h == 0.0);

    // f' = (h-g) f, g' = -f^2/2, h' = f^2/2 with analytic derivatives
    for (double s : {-0.9, -0.5, -0.1, 0.0, 0.3, 0.77}) {
        auto p = nahm_profile_closed_form(s);
        const double c = std::cos(kPi * s / 2.0), t = std::tan(kPi * s / 2.0);
        double fprime = (kPi / 2.0) * (kPi / 2.0) * t / c;
        double gprime = -(kPi / 4.0) * (kPi / 2.0) / (c * c);
        CHECK(std::abs(fprime - (p.h - p.g) * p.f) <= 1e-12 * (1.0 + std::abs(fprime)));
        CHECK(std::abs(gprime + 0.5 * p.f * p.f) <= 1e-12 * (1.0 + std::abs(gprime)));
        CHECK(p.h == -p.g);

        auto m = nahm_profile_closed_form(-s);
        CHECK(m.f == Catch::Approx(p.f));      // even
        CHECK(m.g == Catch::Approx(-p.g).margin(1e-15));  // odd
        CHECK(m.h == Catch::Approx(-p.h).margin(1e-15));
    }
    CHECK_THROWS_AS(nahm_profile_closed_form(1.0), std::domain_error);
    CHECK_THROWS_AS(nahm_profile_closed_form(-1.2), std::domain_error);
}

TEST_CASE("exactly sampled profile data compares with zero error") {
    const int n = 16;
    InstantonData d;
    d.n1 = 2;
    d.n2 = n;
    d.F.resize(n, 1);
    d.G.resize(n - 1, 2);
    const double offset = (n + 2) / 2.0;
    for (int j = 1; j <= n; ++j)
        d.F(j - 1, 0) = nahm_profile_closed_form((2.0 * j - n - 1) / (n + 2)).f;
    for (int j = 1; j <= n - 1; ++j) {
        auto p = nahm_profile_closed_form((2.0 * j - n) / (n + 2));
        d.G(j - 1, 0) = offset + p.g;
        d.G(j - 1, 1) = offset + p.h;
    }
    d.a0 = d.b0 = 1.0;
    std::vector<InstantonData> sweep{d};
    NahmCompareResult res = nahm_limit_compare(sweep);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].err_f <= 1e-12);
    CHECK(res.rows[0].err_g1 <= 1e-12);
    CHECK(res.rows[0].err_g2 <= 1e-12);
    CHECK(res.calib_scale == Catch::Approx(1.0).margin(1e-3));
}

TEST_CASE("nahm comparison for the solved sweep decays") {
    std::vector<InstantonData> sweep;
    for (int n : {8, 16, 32, 64}) {
        SolveOutcome out = solve(2, n);
        REQUIRE(out.converged);
        sweep.push_back(out.data);
    }
    NahmCompareResult res = nahm_limit_compare(sweep);
    REQUIRE(res.rows.size() == 4);
    CHECK(res.order_f >= 0.9);
    CHECK(res.order_g1 >= 0.9);
    CHECK(res.order_g2 >= 0.9);
    for (const auto& row : res.rows)
        CHECK(row.center_deviation <= 5.0 / row.n);
    CHECK(res.rows[3].max_err() < res.rows[0].max_err());
}

TEST_CASE("nahm comparison validates its input") {
    std::vector<InstantonData> empty;
    CHECK_THROWS_AS(nahm_limit_compare(empty), std::invalid_argument);
    std::vector<InstantonData> wrong{solve(3, 3).data};  // n1 must be 2
    CHECK_THROWS_AS(nahm_limit_compare(wrong), std::invalid_argument);
}

TEST_CASE("curved residuals vanish on zero fields and away from the axes") {
    auto pts = interior_grid(Rect{0.5, 1.5, 0.5, 1.5}, 4, 4);
    CurvedHitchinResidual res = curved_hitchin_residual(zero_field(2), pts);
    CHECK(res.max_norm == 0.0);

    std::vector<std::pair<double, double>> touching{{0.0, 1.0}};
    CHECK_THROWS_AS(curved_hitchin_residual(zero_field(1), touching), std::domain_error);
}

TEST_CASE("curved residuals scale consistently under r -> kappa r") {
    // A'(r) = A(r/kappa)/kappa, Phi'(r) = Phi(r/kappa): first residual picks up
    // kappa^-2, the others kappa^-1, evaluated at the scaled points.
    ContinuumField base = smooth_nonsolution();
    const double kappa = 1.7;
    ContinuumField scaled;
    scaled.p = base.p;
    scaled.sample = [&base, kappa](double r1, double r2) {
        FieldSample s = base.sample(r1 / kappa, r2 / kappa);
        s.Ax /= kappa;
        s.Ay /= kappa;
        return s;
    };
    auto base_pts = interior_grid(Rect{0.4, 1.2, 0.6, 1.4}, 3, 3);
    std::vector<std::pair<double, double>> scaled_pts;
    for (auto [x, y] : base_pts) scaled_pts.emplace_back(kappa * x, kappa * y);

    CurvedHitchinResidual rb = curved_hitchin_residual(base, base_pts, 1e-5);
    CurvedHitchinResidual rs = curved_hitchin_residual(scaled, scaled_pts, 1e-5 * kappa);
    for (int i = 0; i < static_cast<int>(base_pts.size()); ++i) {
        CHECK((rs.first(i, 0) - rb.first(i, 0) / (kappa * kappa)).norm() <=
              1e-6 * (1.0 + rb.first(i, 0).norm()));
        CHECK((rs.second(i, 0) - rb.second(i, 0) / kappa).norm() <=
              1e-6 * (1.0 + rb.second(i, 0).norm()));
        CHECK((rs.third(i, 0) - rb.third(i, 0) / kappa).norm() <=
              1e-6 * (1.0 + rb.third(i, 0).norm()));
    }
}

TEST_CASE("abelian curved first residual reduces to the curl of A") {
    ContinuumField cf;
    cf.p = 1;
    cf.sample = [](double x, double y) {
        FieldSample s;
        s.Ax = CMatrix::Constant(1, 1, Complex(0.0, x * y));
        s.Ay = CMatrix::Constant(1, 1, Complex(0.0, x - y * y));
        s.P1 = CMatrix::Constant(1, 1, Complex(0.0, 2.0 * x));
        s.P2 = CMatrix::Constant(1, 1, Complex(0.0, y));
        return s;
    };
    std::vector<std::pair<double, double>> pts{{0.8, 1.1}};
    CurvedHitchinResidual res = curved_hitchin_residual(cf, pts, 1e-5);
    // curl of A: d(Ay)/dx - d(Ax)/dy = i(1 - x)
    Complex expect(0.0, 1.0 - 0.8);
    CHECK(std::abs(res.first(0, 0)(0, 0) - expect) <= 1e-8);
}

TEST_CASE("antihermiticity of continuum samples is enforced") {
    ContinuumField bad;
    bad.p = 1;
    bad.sample = [](double, double) {
        FieldSample s;
        s.Ax = CMatrix::Constant(1, 1, Complex(0.5, 0.0));  // hermitian, not anti
        s.Ay = s.P1 = s.P2 = CMatrix::Zero(1, 1);
        return s;
    };
    CHECK_THROWS_AS(bad.validate_antihermitian(0.1, 0.1), std::domain_error);
}
