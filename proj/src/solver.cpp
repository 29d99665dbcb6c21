#include "qrt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "qrt/errors.hpp"

namespace qrt {

namespace {

template <class F>
auto run_stage(const char* stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (!e.stage().empty()) throw;
        throw e.with_stage(stage);
    }
}

ProjCoord scale_coord(cd c, const ProjCoord& z) { return ProjCoord::homogeneous(c * z.num(), z.den()).normalized(); }

ProjPoint choose_basepoint(const DoubleCover& cover, const std::vector<cd>& avoid_x, std::uint64_t seed) {
    const BranchData& b = cover.branch();
    cd centre = 0.0;
    double min_pair = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        centre += 0.25 * b.q[i];
        for (int j = i + 1; j < 4; ++j) min_pair = std::min(min_pair, std::abs(b.q[i] - b.q[j]));
    }
    const std::uint64_t base = seed * 1000003ULL + 500009ULL;
    for (std::uint64_t idx = 0; idx < 512; ++idx) {
        const cd x = low_discrepancy_disc(base + idx, centre, b.diameter);
        bool ok = true;
        for (const cd& q : b.q) ok = ok && std::abs(x - q) >= 0.25 * min_pair;
        for (const cd& a : avoid_x) ok = ok && std::abs(x - a) >= 0.05 * b.diameter;
        if (!ok) continue;
        const auto ys = curve_ys(cover.curve(), x);
        const ProjCoord& y = ys[idx % 2];
        if (!y.is_finite() || y.near_infinite(1e-8)) continue;
        return {ProjCoord(x), ProjCoord(y.value())};
    }
    throw Error(ErrorKind::ExhaustedSearch, "solve: no admissible basepoint found");
}

}  // namespace

ProjPoint snap_to_curve(const Biquadratic& curve, const ProjPoint& p) {
    std::array<ProjCoord, 2> ys;
    if (p.x.is_infinite()) {
        ys = quadratic_roots(curve.c[0][0], curve.c[0][1], curve.c[0][2]);
    } else {
        ys = curve_ys(curve, p.x.value());
    }
    const ProjCoord& best = chordal(ys[0], p.y) <= chordal(ys[1], p.y) ? ys[0] : ys[1];
    return {p.x, best.is_infinite() ? best : ProjCoord(best.value())};
}

double K_residual(const QrtMap& map, const ProjPoint& p, const ProjCoord& K0) {
    const cd a = eval_pencil(map, p, 0.0);
    const cd b = eval_pencil(map, p, 1.0) - a;
    const ProjCoord K = ProjCoord::homogeneous(-a, b);
    if (K0.is_infinite() || b == cd(0.0)) return chordal(K, K0);
    const cd k0 = K0.value();
    return std::abs(K.value() - k0) / (1.0 + std::abs(k0));
}

SolutionParams solve(const QrtMap& map, const ProjPoint& p0, const SolverConfig& cfg) {
    SolutionParams P;
    P.p0 = p0;

    run_stage("invariant", [&] {
        map.validate();
        try {
            const cd K0 = compute_K(map, p0);
            P.K0 = ProjCoord(K0);
            P.curve = fix_curve(map, K0);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::InfiniteK) throw;
            P.K0 = ProjCoord::infinity();
            P.curve.c = map.B;
        }
        return 0;
    });

    run_stage("smoothness", [&] {
        P.smoothness = smoothness(P.curve);
        if (!P.smoothness.smooth) {
            std::string msg = "invariant curve is singular: ";
            if (!P.smoothness.biquadratic_in_y) {
                msg += "no y^2 terms, Eisenstein invariant Delta = 0";
            } else {
                msg += "Eisenstein invariant Delta = " + format_complex(P.smoothness.inv.delta, 6) +
                       " (threshold " + format_complex(P.smoothness.threshold, 3) + ")";
            }
            throw Error(ErrorKind::CurveNotSmooth, msg);
        }
        return 0;
    });

    run_stage("normalization", [&] {
        const MoebiusPair pair = cfg.marked ? *cfg.marked : choose_marked_points(P.curve, cfg.seed);
        const NormalizedCurve nc = moebius_normalize(P.curve, pair);
        if (!is_admissible_normalization(nc.curve)) {
            throw Error(ErrorKind::DegenerateTransform, "marked points give an inadmissible normalization");
        }
        P.rho = nc.rho;
        P.normalized = nc.curve;
        const Biquadratic& n = P.normalized;
        P.x1p = -n.a(0, 2) / n.a(1, 2);
        P.y1p = -n.a(2, 0) / n.a(2, 1);
        P.x2p = -n.a(1, 0) / n.a(2, 0);
        P.y2p = -n.a(0, 1) / n.a(0, 2);
        return 0;
    });

    const DoubleCover cover = run_stage("branch points", [&] {
        P.branch = branch_points(partial_discriminant(P.normalized));
        return DoubleCover(P.normalized, P.branch);
    });

    run_stage("periods", [&] {
        P.periods = compute_period_loops(cover);
        P.lattice = P.periods.lattice;
        P.evaluator.emplace(P.lattice);
        return 0;
    });

    const ProjPoint p0n = apply_rho(P.rho, p0);

    run_stage("basepoint", [&] {
        if (cfg.basepoint) {
            const ProjPoint snapped = snap_to_curve(P.curve, *cfg.basepoint);
            P.basept = apply_rho(P.rho, snapped);
            if (P.basept.x.is_infinite()) {
                throw Error(ErrorKind::InvalidInput, "basepoint maps to x = inf in normalized coordinates");
            }
            P.basept.x = ProjCoord(P.basept.x.value());
        } else {
            std::vector<cd> avoid{0.0, P.x1p, P.x2p};
            if (!p0n.x.is_infinite()) avoid.push_back(p0n.x.value());
            P.basept = choose_basepoint(cover, avoid, cfg.seed);
        }
        return 0;
    });

    run_stage("abel integrals", [&] {
        const ProjCoord inf = ProjCoord::infinity();
        P.abel = {
            {"e2", {ProjCoord(0.0), ProjCoord(0.0)}, {}},
            {"hx_e2", {ProjCoord(0.0), ProjCoord(P.y2p)}, {}},
            {"hy_e2", {ProjCoord(P.x2p), ProjCoord(0.0)}, {}},
            {"e1", {inf, inf}, {}},
            {"hx_e1", {inf, ProjCoord(P.y1p)}, {}},
            {"hy_e1", {ProjCoord(P.x1p), inf}, {}},
            {"u0", p0n, {}},
        };
        std::vector<SheetedPoint> targets;
        for (const AbelRecord& r : P.abel) targets.push_back(r.target);
        const std::vector<AbelResult> res = abel_batch(cover, P.basept, targets, cfg.parallel);
        for (std::size_t i = 0; i < res.size(); ++i) P.abel[i].result = res[i];
        P.e2 = res[0].value;
        P.hx_e2 = res[1].value;
        P.hy_e2 = res[2].value;
        P.e1 = res[3].value;
        P.hx_e1 = res[4].value;
        P.hy_e1 = res[5].value;
        P.u0 = res[6].value;
        return 0;
    });

    run_stage("coefficients", [&] {
        EmbeddingParams& E = P.embedding;
        E.e1 = P.e1;
        E.e2 = P.e2;
        E.hx = P.e2 + P.hx_e2;
        E.hy = P.e2 + P.hy_e2;
        E.c1 = E.c2 = 1.0;
        const SigmaEvaluator& ev = *P.evaluator;
        auto finite_nonzero = [](const ProjCoord& z, const char* what) {
            if (z.is_infinite() || std::abs(z.normalized().num()) < 1e-12) {
                throw Error(ErrorKind::PoleAtU, std::string("coefficient determination: ") + what +
                                                    " is zero or infinite at its marked point");
            }
            return z.value();
        };
        const cd f2 = finite_nonzero(F12(P.hy_e2, E, ev), "F12");
        const cd g2 = finite_nonzero(G12(P.hx_e2, E, ev), "G12");
        const cd f1 = finite_nonzero(F12(P.hy_e1, E, ev), "F12");
        const cd g1 = finite_nonzero(G12(P.hx_e1, E, ev), "G12");
        E.c1 = P.x2p / f2;
        E.c2 = P.y2p / g2;
        P.c1_alt = P.x1p / f1;
        P.c2_alt = P.y1p / g1;
        return 0;
    });

    run_stage("translation", [&] {
        P.step = P.embedding.hx - P.embedding.hy;
        // The composition order fixes the sign of the step; check it against one
        // application of the map.
        const ProjPoint p1 = qrt_step(map, p0);
        const double fwd = chordal(eval_solution(P, 1), p1);
        P.step = -P.step;
        const double bwd = chordal(eval_solution(P, 1), p1);
        P.step = -P.step;
        if (bwd < fwd) {
            P.step = -P.step;
            P.step_flipped = true;
        }
        return 0;
    });
    return P;
}

ProjPoint eval_solution(const SolutionParams& params, long n) {
    const SigmaEvaluator& ev = *params.evaluator;
    const cd u = params.u0 + static_cast<double>(n) * params.step;
    const ProjCoord X = scale_coord(params.embedding.c1, F12(u, params.embedding, ev));
    const ProjCoord Y = scale_coord(params.embedding.c2, G12(u, params.embedding, ev));
    return apply_rho_inv(params.rho, {X, Y});
}

std::vector<ProjPoint> eval_orbit_serial(const SolutionParams& params, long first, long count) {
    std::vector<ProjPoint> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0L)));
    for (long k = 0; k < count; ++k) out.push_back(eval_solution(params, first + k));
    return out;
}

std::vector<ProjPoint> eval_orbit(const SolutionParams& params, long first, long count, bool parallel) {
    if (!parallel || count <= 0) return eval_orbit_serial(params, first, count);
    std::vector<ProjPoint> out(static_cast<std::size_t>(count));
    std::vector<std::exception_ptr> errors(out.size());
#pragma omp parallel for schedule(static)
    for (long k = 0; k < count; ++k) {
        try {
            out[k] = eval_solution(params, first + k);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

VerificationReport verify(const SolutionParams& params, const QrtMap& map, const ProjPoint& p0, long n_max,
                          const SolverConfig& cfg) {
    VerificationReport rep;
    n_max = std::max(n_max, 0L);
    const std::vector<ProjPoint> fwd = eval_orbit(params, 0, n_max + 1, cfg.parallel);
    ProjPoint it = p0;
    for (long n = 0; n <= n_max; ++n) {
        if (n > 0) it = qrt_step(map, it);
        const double d = chordal(fwd[n], it);
        rep.forward.push_back({n, fwd[n], it, d});
        rep.max_chordal = std::max(rep.max_chordal, d);
        rep.max_K_residual = std::max(rep.max_K_residual, K_residual(map, it, params.K0));
    }
    const long n_back = std::min(10L, n_max);
    if (n_back > 0) {
        const std::vector<ProjPoint> bwd = eval_orbit(params, -n_back, n_back, cfg.parallel);
        it = p0;
        for (long n = 1; n <= n_back; ++n) {
            it = qrt_step_inverse(map, it);
            const ProjPoint& c = bwd[n_back - n];
            const double d = chordal(c, it);
            rep.backward.push_back({-n, c, it, d});
            rep.max_chordal = std::max(rep.max_chordal, d);
        }
    }
    rep.orbit_ok = rep.max_chordal < cfg.tol_orbit;
    rep.K_ok = rep.max_K_residual < 1e-9;

    const EmbeddingParams& E = params.embedding;
    rep.c1_consistency = std::abs(params.c1_alt - E.c1) / std::abs(E.c1);
    rep.c2_consistency = std::abs(params.c2_alt - E.c2) / std::abs(E.c2);
    rep.relation_x = params.lattice.residual(params.e2 + params.hx_e2 - params.e1 - params.hx_e1);
    rep.relation_y = params.lattice.residual(params.e2 + params.hy_e2 - params.e1 - params.hy_e1);
    rep.c_ok = rep.c1_consistency < cfg.tol_orbit && rep.c2_consistency < cfg.tol_orbit;
    rep.relations_ok = rep.relation_x < cfg.tol_intermediate && rep.relation_y < cfg.tol_intermediate;

    const QuarticPoly q = partial_discriminant(params.normalized);
    const EisensteinInvariants alg = eisenstein_invariants(q);
    const auto lat = lattice_invariants_eisenstein(params.lattice);
    const double g2_err = std::abs(lat[0] - alg.g2) / std::abs(alg.g2);
    const double g3_err = std::abs(lat[1] - alg.g3) / std::max(std::abs(alg.g3), std::pow(std::abs(alg.g2), 1.5));
    rep.invariants_residual = std::max(g2_err, g3_err);
    rep.invariants_ok = rep.invariants_residual < cfg.tol_orbit;

    if (!rep.orbit_ok) rep.failures.push_back("closed form disagrees with iteration");
    if (!rep.K_ok) rep.failures.push_back("K not conserved along the iteration");
    if (!rep.c_ok) rep.failures.push_back("c1/c2 determinations disagree");
    if (!rep.relations_ok) rep.failures.push_back("Abel values violate the h_x / h_y relations");
    if (!rep.invariants_ok) rep.failures.push_back("lattice invariants disagree with the quartic");
    rep.pass = rep.failures.empty();
    return rep;
}

}  // namespace qrt
