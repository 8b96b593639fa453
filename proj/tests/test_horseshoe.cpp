#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bykov/common.hpp"
#include "bykov/horseshoe.hpp"
#include "bykov/params.hpp"
#include "bykov/returncurve.hpp"
#include "fixtures.hpp"

using namespace bykov;

TEST(ReturnMap, UnitResonanceAtTheOrigin) {
    // eta(0, s) = (0, s); the quarter turn then gives (s, 0).
    const DerivedConstants k = derive_constants(SaddleParams{1, 1, 1, 1, 1, 1, 1, 1});
    for (double s : {1.0, 0.3, 1e-4}) {
        const WallPoint g = return_map(WallPoint{WallSection::In_v, 0.0, s}, k);
        EXPECT_EQ(g.section, WallSection::In_v);
        EXPECT_NEAR(g.x, s, 1e-12 * s);
        EXPECT_NEAR(g.y, 0.0, 1e-12);
    }
}

TEST(ReturnMap, EqualsQuarterTurnOfEta) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ut(-kPi, kPi), ue(-8, 0), uxs(-1, 1);
    for (int i = 0; i < 1000; ++i) {
        const SaddleParams p = fixtures::random_params(rng);
        const DerivedConstants k = derive_constants(p);
        const double t = ut(rng), s = p.eps * std::pow(10.0, ue(rng));
        ReturnMapOptions opts;
        opts.x_stable = uxs(rng);
        const ReturnCurveSample e = eta(t, s, k);
        const WallPoint g = return_map(WallPoint{WallSection::In_v, t, s}, k, opts);
        ASSERT_NEAR(g.x, e.y_w, 1e-12 * e.y_w);
        ASSERT_NEAR(circle_distance(g.y, opts.x_stable - e.x_w), 0.0, 1e-12 * std::max(1.0, std::abs(e.x_w)));
        const WallPoint c = return_map_by_composition(WallPoint{WallSection::In_v, t, s}, k, opts);
        ASSERT_NEAR(c.x, g.x, 1e-9 * g.x);
        ASSERT_NEAR(circle_distance(c.y, g.y), 0.0, 1e-9 * std::max(1.0, std::abs(e.x_w)));
    }
}

TEST(ReturnMap, ImageHeightDecreasesGeometrically) {
    // delta = 2 > 1: one turn of the spiral multiplies the image height by e^{-2 pi delta / g_v}.
    const SaddleParams p = fixtures::case_i();
    const DerivedConstants k = derive_constants(p);
    ASSERT_GT(k.delta, 1.0);
    const double factor = std::exp(-kTwoPi / k.g_v);
    double y = 0.4, prev = return_map(WallPoint{WallSection::In_v, 0.7, y}, k).x;
    for (int i = 0; i < 10; ++i) {
        y *= factor;
        const double next = return_map(WallPoint{WallSection::In_v, 0.7, y}, k).x;
        EXPECT_NEAR(next / prev, std::exp(-kTwoPi * k.delta / k.g_v), 1e-11);
        EXPECT_LT(next / y, prev / (y / factor));
        prev = next;
    }
}

TEST(ReturnMap, Errors) {
    const DerivedConstants k = derive_constants(SaddleParams{});
    EXPECT_THROW(return_map(WallPoint{WallSection::In_v, 0.0, 0.0}, k), InvariantManifoldError);
    EXPECT_THROW(return_map(WallPoint{WallSection::In_v, 0.0, -0.1}, k), ValidationError);
    EXPECT_THROW(return_map(WallPoint{WallSection::In_v, 0.0, 0.6}, k), ValidationError);
    EXPECT_THROW(return_map(WallPoint{WallSection::Out_w, 0.0, 0.1}, k), ValidationError);
}

TEST(StripCases, Mapping) {
    EXPECT_EQ(strip_case_for(RegionTag::OutsideB), StripCase::I);
    EXPECT_EQ(strip_case_for(RegionTag::NoReversal_aEq1), StripCase::I);
    EXPECT_EQ(strip_case_for(RegionTag::InteriorB_GammaRational), StripCase::II);
    EXPECT_EQ(strip_case_for(RegionTag::DenseReversals_D), StripCase::III);
    EXPECT_EQ(strip_case_for(RegionTag::BoundaryB), StripCase::IV);
    EXPECT_EQ(to_string(StripCase::III), "III");
}

TEST(Strips, MonotoneCaseHasOneStripPerCrossing) {
    const SaddleParams p = fixtures::case_i();
    const StripFamily fam = build_strips(0.4, 8, p);
    EXPECT_EQ(fam.strip_case, StripCase::I);
    ASSERT_EQ(fam.strips.size(), 8u);
    for (std::size_t i = 0; i < fam.strips.size(); ++i) {
        const Strip& st = fam.strips[i];
        EXPECT_EQ(st.n, static_cast<int>(i));
        ASSERT_EQ(st.t.size(), 33u);
        for (std::size_t j = 0; j < st.t.size(); ++j) {
            EXPECT_GT(st.a[j], 0.0);
            EXPECT_LT(st.a[j], st.b[j]);
            EXPECT_LE(st.b[j], fam.tau);
            if (i > 0) {
                EXPECT_LT(st.b[j], fam.strips[i - 1].a[j]);
            }
        }
        if (i > 0) {
            EXPECT_EQ(std::abs(st.level - fam.strips[i - 1].level), 1);
        }
    }
    const StripCheck chk = check_strip_invariants(fam, p);
    EXPECT_TRUE(chk.ok) << (chk.failures.empty() ? "" : chk.failures.front());
    EXPECT_LT(chk.max_level_error, 1e-9);
    // The boundary images span the rectangle vertically.
    EXPECT_NEAR(chk.image_y_min, 0.0, 1e-9);
    EXPECT_NEAR(chk.image_y_max, fam.tau, 1e-9);
    EXPECT_GT(chk.image_x_min, 0.0);
    EXPECT_LE(chk.image_x_max, fam.tau);
}

TEST(Strips, DenseRegion) {
    const SaddleParams p = fixtures::dense_d();
    const StripFamily fam = build_strips(0.05, 10, p);
    EXPECT_EQ(fam.strip_case, StripCase::III);
    EXPECT_GE(fam.strips.size(), 5u);
    const StripCheck chk = check_strip_invariants(fam, p);
    EXPECT_TRUE(chk.ok) << (chk.failures.empty() ? "" : chk.failures.front());
    const double K = reversal_level(p);
    for (const Strip& st : fam.strips) {
        // x_w is monotone on the strip: A - K keeps one sign between phi_lo and phi_hi.
        for (int j = 1; j < 20; ++j) {
            const double phi = st.phi_lo + (st.phi_hi - st.phi_lo) * j / 20.0;
            EXPECT_EQ(A_of_phi(phi, p) > K, st.direction > 0);
        }
    }
}

TEST(Strips, TauShrinks) {
    SaddleParams p = fixtures::case_i();
    p.eps = 3.0;
    const StripFamily fam = build_strips(3.0, 3, p);
    EXPECT_EQ(fam.tau_requested, 3.0);
    EXPECT_LT(fam.tau, 3.0);
    EXPECT_NE(fam.note.find("tau shrunk"), std::string::npos);

    SaddleParams d = fixtures::dense_d();
    d.eps = 3.0;
    const StripFamily dense = build_strips(3.0, 3, d);
    EXPECT_EQ(dense.strip_case, StripCase::III);
    EXPECT_LT(dense.tau, 3.0);
    EXPECT_NE(dense.note.find("d/2"), std::string::npos) << dense.note;
}

TEST(Strips, Errors) {
    const SaddleParams p = fixtures::case_i();
    EXPECT_THROW(build_strips(0.0, 3, p), ValidationError);
    EXPECT_THROW(build_strips(0.6, 3, p), ValidationError);
    EXPECT_THROW(build_strips(0.2, 0, p), ValidationError);
    const SaddleParams unit{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 0.5};
    ASSERT_EQ(derive_constants(unit).gamma, 1.0);
    EXPECT_THROW(build_strips(0.2, 3, unit), UnsupportedResonanceError);
}

TEST(Strips, BoundaryCase) {
    const SaddleParams p = fixtures::boundary();
    const StripFamily fam = build_strips(0.5, 5, p);
    EXPECT_EQ(fam.strip_case, StripCase::IV);
    EXPECT_LE(fam.tau, 0.45 * kPi / 10.0);
    const StripCheck chk = check_strip_invariants(fam, p);
    EXPECT_TRUE(chk.ok) << (chk.failures.empty() ? "" : chk.failures.front());
}

TEST(PeriodicTangency, Detection) {
    EXPECT_FALSE(detect_periodic_tangency(fixtures::case_i(), 0.0, 100).found);
    EXPECT_FALSE(detect_periodic_tangency(fixtures::dense_d(), 0.0, 1000).found);

    const SaddleParams p = fixtures::rational();
    const ReversalSequence seq = reversal_sequence(0.0, 10, p);
    const double x0 = wrap_pi(seq.x_values[3]);
    const PeriodicTangency pt = detect_periodic_tangency(p, x0, 100);
    ASSERT_TRUE(pt.found);
    EXPECT_LT(circle_distance(pt.x_w, x0), 1e-9);
    EXPECT_LE(pt.witness, 3u);

    StripOptions opts;
    opts.x_stable = x0;
    try {
        build_strips(0.05, 3, p, opts);
        FAIL() << "periodic tangency not refused";
    } catch (const PeriodicTangencyError& e) {
        EXPECT_EQ(e.witness(), pt.witness);
    }
    opts.x_stable = x0 + 0.3;
    EXPECT_NO_THROW(build_strips(0.05, 3, p, opts));
}

TEST(Eigen, Classification) {
    EXPECT_EQ(classify_eigen(3.0, 1.0), EigenClass::Saddle);
    EXPECT_EQ(classify_eigen(0.5, 0.1), EigenClass::DoubleContraction);
    EXPECT_EQ(classify_eigen(0.0, 0.25), EigenClass::DoubleContraction);
    EXPECT_EQ(classify_eigen(5.0, 6.0), EigenClass::DoubleExpansion);
    EXPECT_EQ(classify_eigen(2.0, 1.0), EigenClass::NonHyperbolic);
    EXPECT_EQ(classify_eigen(0.0, 1.0), EigenClass::NonHyperbolic);
    EXPECT_EQ(to_string(EigenClass::Saddle), "saddle");
}

TEST(Jacobian, DeterminantVanishesAndTraceGrows) {
    const SaddleParams p = fixtures::case_i();
    double det_prev = INFINITY;
    std::vector<double> traces;
    for (int kk = 4; kk <= 20; ++kk) {
        const JacobianReport r = jacobian_report(0.3, std::ldexp(1.0, -kk), p);
        EXPECT_LT(std::abs(r.det_fd), det_prev);
        det_prev = std::abs(r.det_fd);
        traces.push_back(std::abs(r.trace_fd));
        EXPECT_NEAR(r.det_fd, r.det_exact, 1e-5 * std::abs(r.det_exact));
        EXPECT_NEAR(r.trace_fd, r.trace_exact, 1e-5 * std::max(1.0, std::abs(r.trace_exact)));
        EXPECT_EQ(r.eigen_class, classify_eigen(r.trace_fd, r.det_fd));
    }
    EXPECT_LT(det_prev, 1e-3);
    for (std::size_t i = traces.size() - 5; i < traces.size(); ++i) EXPECT_GT(traces[i], traces[i - 1]);
    EXPECT_GT(traces.back(), 10.0 * traces.front());
}

TEST(Jacobian, ClosedFormsAgreeOrAreFlagged) {
    std::mt19937_64 rng(41);
    for (const SaddleParams& p : {fixtures::case_i(), fixtures::dense_d()}) {
        std::uniform_real_distribution<double> ux(-kPi, kPi), ue(std::log(1e-4), std::log(p.eps));
        for (int i = 0; i < 1000; ++i) {
            const JacobianReport r = jacobian_report(ux(rng), std::exp(ue(rng)), p);
            const bool det_ok = std::abs(r.det_cf - r.det_fd) <= 1e-6 * std::abs(r.det_fd);
            const bool tr_ok = std::abs(r.trace_cf - r.trace_fd) <= 1e-6 * std::max(1.0, std::abs(r.trace_fd));
            ASSERT_TRUE(det_ok || r.det_discrepancy);
            ASSERT_TRUE(tr_ok || r.trace_discrepancy);
            ASSERT_EQ(r.eigen_class, classify_eigen(r.trace_fd, r.det_fd));
            ASSERT_NEAR(r.det_fd, r.det_exact, 1e-5 * std::abs(r.det_exact));
        }
    }
}

TEST(Jacobian, BumpDisablesExactForms) {
    ReturnMapOptions opts;
    opts.bump = Bump{0.01, 0.0, 0.0, 0.5};
    const JacobianReport r = jacobian_report(0.3, 0.01, fixtures::case_i(), opts);
    EXPECT_TRUE(std::isnan(r.det_exact));
    EXPECT_TRUE(std::isfinite(r.det_fd));
    EXPECT_THROW(jacobian_report(0.3, 0.0, fixtures::case_i()), ValidationError);
}

TEST(Jacobian, DoubleContractionNearAReversal) {
    // Near a reversal the trace term vanishes and the determinant is small,
    // so both eigenvalues can fall inside the unit circle.
    const SaddleParams p = fixtures::dense_d();
    const DerivedConstants k = derive_constants(p);
    const ReversalSequence seq = reversal_sequence(0.0, 40, p);
    bool found = false;
    for (std::size_t i = 20; i < seq.size() && !found; ++i) {
        for (int j = -50; j <= 50 && !found; ++j) {
            const double phi = seq.phi_values[i] + j * 1e-4;
            const double y = std::exp((k.c2 - phi) / k.g_v);
            found = jacobian_report(0.0, y, p).eigen_class == EigenClass::DoubleContraction;
        }
    }
    RecordProperty("double_contraction_found", found ? 1 : 0);
    EXPECT_TRUE(found);
}

TEST(Jacobian, SaddlesInsideStrips) {
    const SaddleParams p = fixtures::case_i();
    const StripFamily fam = build_strips(0.4, 8, p);
    const StripHyperbolicity h = strip_hyperbolicity(fam, p);
    EXPECT_GT(h.samples, 0u);
    EXPECT_GE(h.fraction(), 0.99);
    EXPECT_GT(h.y_star, 0.0);
    EXPECT_LE(h.y_star, fam.tau);
}

TEST(Multipulse, TwoPulseRootsInTheMonotoneCase) {
    const SaddleParams p = fixtures::case_i();
    const DerivedConstants k = derive_constants(p);
    MultipulseOptions opts;
    opts.s_min = 1e-6;
    opts.max_points = 1000;
    const std::vector<PulsePoint> pts = find_multipulse(2, p, 0.0, opts);
    const double range = std::abs(eta(0.0, opts.s_min, k).x_w - eta(0.0, p.eps, k).x_w);
    EXPECT_GE(pts.size(), static_cast<std::size_t>(std::floor(range / kTwoPi)));
    for (const PulsePoint& pt : pts) {
        EXPECT_EQ(pt.n, 2);
        EXPECT_EQ(pt.chain.size(), 1u);
        EXPECT_DOUBLE_EQ(pt.chain[0].x, 0.0);
        EXPECT_LT(pt.residual, 1e-8);
        EXPECT_LT(replay_pulse(pt, p, 0.0), 1e-8);
    }
}

TEST(Multipulse, ThreePulseReplay) {
    const SaddleParams p = fixtures::case_i();
    const std::vector<PulsePoint> pts = find_multipulse(3, p, 0.0);
    ASSERT_FALSE(pts.empty());
    const DerivedConstants k = derive_constants(p);
    for (const PulsePoint& pt : pts) {
        ASSERT_EQ(pt.chain.size(), 2u);
        EXPECT_GE(pt.chain[1].y, 1e-6);
        EXPECT_LE(pt.chain[1].y, p.eps);
        const WallPoint g1 = return_map(pt.chain[0], k);
        EXPECT_NEAR(g1.x, pt.chain[1].x, 1e-12);
        EXPECT_LT(replay_pulse(pt, p, 0.0), 1e-8);
    }
}

TEST(Multipulse, EmptyWindowAndErrors) {
    const SaddleParams p = fixtures::case_i();
    MultipulseOptions opts;
    opts.s_min = 0.4999;
    opts.s_max = 0.5;
    EXPECT_TRUE(find_multipulse(2, p, 0.0, opts).empty());
    EXPECT_THROW(find_multipulse(1, p, 0.0), ValidationError);
    opts.s_min = 0.6;
    opts.s_max = 0.7;
    EXPECT_THROW(find_multipulse(2, p, 0.0, opts), ValidationError);
}
