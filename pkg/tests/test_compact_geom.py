import os
from fractions import Fraction

import numpy as np
import pytest

from flagmorse.chevalley import n0_constant
from flagmorse.compact_geom import (
    CheckResult,
    adjoint_perturb,
    bracket_k,
    bracket_m,
    build_frame,
    complex_hessian,
    complex_hessian_many,
    curvature_quadratic,
    frame_for,
    hat_transport,
    holomorphic_kernel_classification,
    identity_suite,
    k_search,
    make_hat_transport,
    map_I,
    p_bound,
    p_pairing,
    q_form,
    r_operator,
    s0_embedding,
    tilde_vector,
    validate_frame,
)
from flagmorse.errors import DegenerateCoefficients, NotInK, UnknownSuite
from flagmorse.index_comb import GammaSet, st_sets
from flagmorse.parabolic import PaintedDiagram, borel_split, split
from flagmorse.rootsys import build_root_system, is_long

from test_rootsys import rv

TOL = 1e-10


def _unit(frame, x):
    return x / np.sqrt(frame.m_norm2(x))


def _plane_vector(frame, alpha, a=1.0, b=0.0):
    out = np.zeros(frame.m_dim)
    ix, iy = frame.m_slot(alpha)
    out[ix], out[iy] = a, b
    return out


def _delta_and_gdot(frame, a=1.1, b=-0.7, long_only=True):
    sys_ = frame.sys
    candidates = [r for r in frame.m_pos if not long_only or is_long(sys_, r)]
    delta = max(candidates, key=lambda r: (sys_.height(r), r.coords))
    return delta, _plane_vector(frame, delta, a, b)


# -- frame invariants ---------------------------------------------------------


def test_frame_invariants(borel_frame):
    res = validate_frame(borel_frame)
    assert all(v < 1e-12 for v in res.values()), res


def test_frame_invariants_non_borel():
    sys_ = build_root_system("B", 3)
    frame = build_frame(split(sys_, PaintedDiagram.of(sys_, (0,))))
    res = validate_frame(frame)
    assert all(v < 1e-12 for v in res.values()), res


def test_rank_one_frame_sanity():
    # smallest possible frame: one Cartan direction and one root plane
    frame = frame_for("A", 1)
    assert frame.dim == 3 and frame.m_dim == 2
    res = validate_frame(frame, trials=500)
    assert all(v < 1e-12 for v in res.values()), res
    alpha = frame.m_pos[0]
    x_full = np.zeros(frame.dim)
    y_full = np.zeros(frame.dim)
    x_full[frame.slots[alpha][0]] = 1.0
    y_full[frame.slots[alpha][1]] = 1.0
    out = frame.bracket_full(x_full, y_full)
    assert np.max(np.abs(out[1:])) < 1e-14  # lands in the Cartan block
    assert abs(out[0] * float(frame.sys.simples[0].unscaled()[0]) - 2.0 * float(alpha.unscaled()[0])) < 1e-12


def test_metric_blocks_and_plane_pairing():
    frame = frame_for("A", 2)
    # each root plane carries the diagonal (2, 2) block
    for alpha in frame.m_pos:
        ix, iy = frame.slots[alpha]
        assert frame.metric[ix, ix] == 2.0
        assert frame.metric[iy, iy] == 2.0
        assert frame.metric[ix, iy] == 0.0


def test_plane_bracket_lands_in_cartan_direction():
    # [X_a, Y_a] is twice the dual of a, an isotropy(-block) element
    frame = frame_for("A", 2)
    alpha = frame.m_pos[0]
    x_full = np.zeros(frame.dim)
    y_full = np.zeros(frame.dim)
    ix, iy = frame.slots[alpha]
    x_full[ix] = 1.0
    y_full[iy] = 1.0
    out = frame.bracket_full(x_full, y_full)
    rank = frame.sys.rank
    assert np.max(np.abs(out[rank:])) < 1e-14
    # reconstruct the ambient vector sum u_j * simple_j = 2 * alpha
    recon = np.zeros(frame.sys.ambient_dim)
    for j in range(rank):
        recon += out[j] * np.array([float(c) for c in frame.sys.simples[j].unscaled()])
    expected = 2.0 * np.array([float(c) for c in alpha.unscaled()])
    assert np.max(np.abs(recon - expected)) < 1e-12


def test_bracket_m_antisymmetry_and_associativity(borel_frame, rng):
    frame = borel_frame
    x = frame.random_m(rng)
    y = frame.random_m(rng)
    z = frame.random_m(rng)
    assert np.max(np.abs(bracket_m(frame, x, x))) < 1e-14
    total = frame.m_inner(x, bracket_m(frame, y, z)) + frame.k_inner(
        np.zeros(frame.m_start), bracket_k(frame, y, z)
    )
    full = frame.bracket_full(frame.embed_m(y), frame.embed_m(z))
    lhs = frame.inner(frame.embed_m(x), full)
    rhs = frame.inner(frame.bracket_full(frame.embed_m(x), frame.embed_m(y)),
                      frame.embed_m(z))
    assert abs(lhs - rhs) < 1e-10
    assert abs(lhs - total) < 1e-10


# -- transport ------------------------------------------------------------------


def test_r_operator_properties(borel_frame, rng):
    frame = borel_frame
    delta, gdot = _delta_and_gdot(frame)
    r = r_operator(frame, gdot)
    assert np.max(np.abs(r @ frame.j_m - frame.j_m @ r)) < TOL
    # planes whose root pairs with delta inside the tangent positives are
    # annihilated; planes lying above delta are moved
    sets = st_sets(borel_split(frame.sys), GammaSet.singleton(delta), delta)
    for alpha in sets.s_set:
        x = _plane_vector(frame, alpha, 1.0, 0.3)
        assert np.max(np.abs(r @ x)) < 1e-12


def test_r_operator_moves_ascending_planes(borel_frame):
    frame = borel_frame
    sys_ = frame.sys
    # smallest long tangent root, so that something lies above it
    delta = min(r for r in frame.m_pos if is_long(sys_, r))
    gdot = _plane_vector(frame, delta, 1.1, -0.7)
    r = r_operator(frame, gdot)
    ascending = [a for a in frame.m_pos if (a - delta) in frame.split.delta_m_pos]
    assert ascending, "frame too small for the ascending case"
    for alpha in ascending:
        x = _plane_vector(frame, alpha, 1.0, 0.3)
        assert np.linalg.norm(r @ x) > 1e-8


def test_hat_transport_contract(borel_frame, rng):
    frame = borel_frame
    delta, gdot = _delta_and_gdot(frame)
    tau = make_hat_transport(frame, gdot)
    assert np.max(np.abs(tau(0.0) - np.eye(frame.m_dim))) < 1e-14
    assert np.max(np.abs(tau(0.3) @ tau(0.45) - tau(0.75))) < 1e-10
    for _ in range(100):
        x = frame.random_m(rng)
        t = rng.uniform(0, 1)
        drift = frame.m_inner(tau(t) @ x, gdot) - frame.m_inner(x, gdot)
        assert abs(drift) < 1e-10 * max(1.0, np.sqrt(frame.m_norm2(x)))
    # J-commutation of the transport itself
    t = 0.77
    assert np.max(np.abs(tau(t) @ frame.j_m - frame.j_m @ tau(t))) < 1e-10


def test_hat_transport_kernel_fixed_points(borel_frame):
    frame = borel_frame
    delta, gdot = _delta_and_gdot(frame)
    r = r_operator(frame, gdot)
    sets = st_sets(borel_split(frame.sys), GammaSet.singleton(delta), delta)
    rng = np.random.default_rng(5)
    for _ in range(25):
        x = np.zeros(frame.m_dim)
        for alpha in sets.s_set:
            ix, iy = frame.m_slot(alpha)
            x[ix], x[iy] = rng.standard_normal(2)
        if not np.any(x):
            continue
        assert np.max(np.abs(r @ x)) < 1e-12
        for t in (0.2, 0.9):
            moved = hat_transport(frame, gdot, t) @ x
            assert np.max(np.abs(moved - x)) < 1e-10


# -- averaged second variation ---------------------------------------------------


def test_complex_hessian_dichotomy(borel_frame):
    frame = borel_frame
    delta, gdot = _delta_and_gdot(frame)
    sets = st_sets(borel_split(frame.sys), GammaSet.singleton(delta), delta)
    rng = np.random.default_rng(17)
    # kernel branch: fields supported on the paired decomposition set
    if sets.s_set:
        x0 = np.zeros(frame.m_dim)
        for alpha in sets.s_set:
            ix, iy = frame.m_slot(alpha)
            x0[ix], x0[iy] = rng.standard_normal(2)
        val = complex_hessian(frame, gdot, _unit(frame, x0))
        assert abs(val) < 1e-10
    # negative branch: fields meeting the obstruction set
    beta = sorted(sets.t_set)[0]
    x1 = _unit(frame, _plane_vector(frame, beta, 0.8, -0.6))
    val = complex_hessian(frame, gdot, x1)
    assert val < -1e-8
    # quadrature self-check: doubling the nodes moves nothing
    assert abs(
        complex_hessian(frame, gdot, x1, 64) - complex_hessian(frame, gdot, x1, 128)
    ) < 1e-10


def test_complex_hessian_nonpositive(borel_frame, rng):
    frame = borel_frame
    _, gdot = _delta_and_gdot(frame)
    batch = frame.random_m(rng, 50)
    vals = complex_hessian_many(frame, gdot, batch)
    assert np.all(vals <= 1e-12)


def test_exact_classifier_agrees_with_numeric(borel_frame):
    frame = borel_frame
    delta, _ = _delta_and_gdot(frame)
    a, b = Fraction(11, 10), Fraction(-7, 10)
    gdot = _plane_vector(frame, delta, float(a), float(b))
    gamma_exact = {delta: (a, b)}
    rng = np.random.default_rng(29)
    hits = {True: 0, False: 0}
    for _ in range(60):
        support = [
            alpha for alpha in frame.m_pos if rng.uniform() < 0.3
        ] or [frame.m_pos[0]]
        field_exact = {}
        x0 = np.zeros(frame.m_dim)
        for alpha in support:
            ca = Fraction(int(rng.integers(-6, 7)), 4)
            cb = Fraction(int(rng.integers(-6, 7)), 4)
            if ca == 0 and cb == 0:
                ca = Fraction(1)
            field_exact[alpha] = (ca, cb)
            ix, iy = frame.m_slot(alpha)
            x0[ix], x0[iy] = float(ca), float(cb)
        degenerate = holomorphic_kernel_classification(frame, gamma_exact, field_exact)
        val = complex_hessian(frame, gdot, _unit(frame, x0))
        hits[degenerate] += 1
        if degenerate:
            assert abs(val) < 1e-8
        else:
            assert val < -1e-8
    assert hits[False] > 0  # both branches exercised


# -- pair-space operator -----------------------------------------------------------


def _s_pairs(frame, delta):
    sys_ = frame.sys
    pairs = set()
    for alpha in frame.m_pos:
        beta = delta - alpha
        if sys_.is_positive(beta) and beta in frame.split.delta_m_pos:
            pairs.add(frozenset((alpha, beta)))
    return pairs


def test_map_i_contract(borel_frame):
    frame = borel_frame
    delta, _ = _delta_and_gdot(frame)
    pairs = _s_pairs(frame, delta)
    if not pairs:
        pytest.skip("no decomposition pairs in this frame")
    a, b = 0.6, 1.7
    i_mat = map_I(frame, delta, a, b, pairs)
    n = i_mat.shape[0]
    assert np.max(np.abs(i_mat @ i_mat + np.eye(n))) < 1e-12
    emb = s0_embedding(frame, pairs) - frame.m_start
    j_s0 = frame.j_m[np.ix_(emb, emb)]
    assert np.max(np.abs(i_mat @ j_s0 + j_s0 @ i_mat)) < 1e-12
    rng = np.random.default_rng(31)
    x = rng.standard_normal(n)
    assert abs(np.linalg.norm(i_mat @ x) - np.linalg.norm(x)) < 1e-12
    # pairing bound against the twist direction
    n0 = n0_constant(frame.chev, pairs)
    tilde = tilde_vector(frame, delta, a, b)
    for _ in range(50):
        x = rng.standard_normal(n)
        full = np.zeros(frame.dim)
        full[emb + frame.m_start] = x
        ifull = np.zeros(frame.dim)
        ifull[emb + frame.m_start] = i_mat @ x
        val = frame.inner(frame.bracket_full(ifull, full), tilde)
        norm2 = 2.0 * float(x @ x)
        assert val <= -n0 * np.hypot(a, b) * norm2 + 1e-10


def test_map_i_degenerate_coefficients():
    frame = frame_for("A", 2)
    delta, _ = _delta_and_gdot(frame)
    pairs = _s_pairs(frame, delta)
    with pytest.raises(DegenerateCoefficients):
        map_I(frame, delta, 0.0, 0.0, pairs)


# -- twisted quadratic form --------------------------------------------------------


def test_q_form_zero_inputs():
    frame = frame_for("A", 3)
    _, gdot = _delta_and_gdot(frame)
    zero = np.zeros(frame.m_dim)
    assert q_form(frame, gdot, zero, zero, zero, 0.5) == 0.0


def test_q_form_pure_pair_threshold():
    # with no transported part the twisted form changes sign exactly at the
    # minimal-constant threshold rate
    frame = frame_for("A", 3)
    delta, gdot = _delta_and_gdot(frame, a=0.9, b=-0.5)
    pairs = _s_pairs(frame, delta)
    i_mat = map_I(frame, delta, 0.9, -0.5, pairs)
    emb = s0_embedding(frame, pairs) - frame.m_start
    rng = np.random.default_rng(3)
    w0 = np.zeros(frame.m_dim)
    w0[emb] = rng.standard_normal(len(emb))
    zero = np.zeros(frame.m_dim)
    k_star = n0_constant(frame.chev, pairs) * np.hypot(0.9, 0.5)
    lo = q_form(frame, gdot, zero, zero, w0, 0.9 * k_star, i_map=i_mat, pair_set=pairs)
    hi = q_form(frame, gdot, zero, zero, w0, 1.1 * k_star, i_map=i_mat, pair_set=pairs)
    assert lo < 0 < hi


def test_k_search_mixed_configurations(borel_frame):
    frame = borel_frame
    delta, gdot = _delta_and_gdot(frame, a=0.9, b=-0.5)
    sets = st_sets(borel_split(frame.sys), GammaSet.singleton(delta), delta)
    pairs = _s_pairs(frame, delta)
    i_mat = map_I(frame, delta, 0.9, -0.5, pairs) if pairs else None
    emb = s0_embedding(frame, pairs) - frame.m_start if pairs else None
    rng = np.random.default_rng(11)
    configs = []
    for _ in range(30):
        x0 = np.zeros(frame.m_dim)
        y0 = np.zeros(frame.m_dim)
        for beta in sets.t_set:
            ix, iy = frame.m_slot(beta)
            x0[ix], x0[iy] = rng.standard_normal(2)
            y0[ix], y0[iy] = rng.standard_normal(2)
        w0 = np.zeros(frame.m_dim)
        iw0 = np.zeros(frame.m_dim)
        if pairs:
            w0[emb] = rng.standard_normal(len(emb))
            iw0[emb] = i_mat @ w0[emb]
        configs.append((x0 + w0, y0 + iw0))
    result = k_search(frame, gdot, configs)
    assert result.k > 0
    assert result.margin > 0
    assert max(result.q_values) < 0
    # spot check one configuration through the public evaluator
    x0, y0 = configs[0]
    direct = q_form(frame, gdot, x0, y0, np.zeros(frame.m_dim), result.k)
    assert direct == pytest.approx(result.q_values[0], abs=1e-8)


NON_BOREL_PAINTINGS = {
    ("A", 2): (0,), ("A", 3): (1,), ("B", 2): (0,),
    ("B", 3): (1,), ("C", 3): (0,), ("D", 4): (2,),
}


@pytest.mark.parametrize("family,rank", sorted(NON_BOREL_PAINTINGS))
def test_k_search_non_borel(family, rank):
    # the twisted form stays negative away from the trivial painting too
    painted = NON_BOREL_PAINTINGS[(family, rank)]
    frame = frame_for(family, rank, painted)
    sys_ = frame.sys
    longs = [r for r in frame.m_pos if is_long(sys_, r)]
    delta = max(longs, key=lambda r: (sys_.height(r), r.coords))
    gdot = _plane_vector(frame, delta, 0.9, -0.5)
    gamma = GammaSet.singleton(delta, 0.9, -0.5)
    sets = st_sets(frame.split, gamma, delta)
    pairs = {frozenset((a, delta - a)) for a in sets.s_set}
    i_mat = map_I(frame, delta, 0.9, -0.5, pairs) if pairs else None
    emb = s0_embedding(frame, pairs) - frame.m_start if pairs else None
    rng = np.random.default_rng(123)
    configs = []
    for trial in range(100):
        x0 = np.zeros(frame.m_dim)
        y0 = np.zeros(frame.m_dim)
        w0 = np.zeros(frame.m_dim)
        iw0 = np.zeros(frame.m_dim)
        if trial % 3 != 1:
            for beta in sets.t_set:
                ix, iy = frame.m_slot(beta)
                x0[ix], x0[iy] = rng.standard_normal(2)
                y0[ix], y0[iy] = rng.standard_normal(2)
        if trial % 3 != 0 and pairs:
            w0[emb] = rng.standard_normal(len(emb))
            iw0[emb] = i_mat @ w0[emb]
        if not np.any(x0 + w0) and not np.any(y0 + iw0):
            ix, iy = frame.m_slot(delta)
            x0[ix] = 1.0
        configs.append((x0 + w0, y0 + iw0))
    result = k_search(frame, gdot, configs)
    assert result.k > 0 and max(result.q_values) < 0


# -- slice pairing -----------------------------------------------------------------


def test_p_pairing_properties(borel_frame, rng):
    frame = borel_frame
    delta, gdot = _delta_and_gdot(frame)
    x = frame.random_m(rng)
    assert p_pairing(frame, x, np.zeros(frame.m_dim), gdot) == 0.0
    bound = p_bound(frame, gdot)
    for _ in range(200):
        a = frame.random_m(rng)
        b = frame.random_m(rng)
        val = p_pairing(frame, a, b, gdot)
        limit = bound * np.sqrt(frame.m_norm2(a) * frame.m_norm2(b))
        assert abs(val) <= limit * (1 + 1e-9)


def test_p_pairing_pair_space_bound(borel_frame):
    frame = borel_frame
    delta, gdot = _delta_and_gdot(frame, a=0.9, b=-0.5)
    pairs = _s_pairs(frame, delta)
    if not pairs:
        pytest.skip("no decomposition pairs in this frame")
    i_mat = map_I(frame, delta, 0.9, -0.5, pairs)
    emb = s0_embedding(frame, pairs) - frame.m_start
    n0 = n0_constant(frame.chev, pairs)
    rng = np.random.default_rng(13)
    for _ in range(50):
        w = np.zeros(frame.m_dim)
        w[emb] = rng.standard_normal(len(emb))
        iw = np.zeros(frame.m_dim)
        iw[emb] = i_mat @ w[emb]
        val = p_pairing(frame, w, iw, gdot)
        limit = -2.0 * n0 * np.hypot(0.9, 0.5) * frame.m_norm2(w)
        assert val <= limit * (1 - 1e-8)


# -- perturbation ------------------------------------------------------------------


def test_adjoint_perturb():
    sys_ = build_root_system("B", 3)
    frame = build_frame(split(sys_, PaintedDiagram.of(sys_, (2,))))
    e2, e3 = rv(0, 1, 0), rv(0, 0, 1)
    v = _plane_vector(frame, e2, 1.0, 0.0)
    same, supp0 = adjoint_perturb(frame, v, e3, t=0.0)
    assert np.array_equal(same, v)
    assert supp0 == {e2}
    new, supp = adjoint_perturb(frame, v, e3, t=1e-3)
    assert rv(0, 1, -1) in supp  # a long root enters the support
    # growth bound from the exponential series
    x_full = np.zeros(frame.dim)
    x_full[frame.slots[e3][0]] = 1.0
    ad_norm = np.linalg.norm(
        frame.ad_matrix(x_full)[frame.m_start:, frame.m_start:], 2
    )
    t = 1e-3
    assert np.linalg.norm(new - v) <= t * ad_norm * np.linalg.norm(v) * np.exp(t * ad_norm)
    with pytest.raises(NotInK):
        adjoint_perturb(frame, v, rv(1, -1, 0), t=1e-3)


# -- suites ------------------------------------------------------------------------


def test_identity_suite_unknown():
    frame = frame_for("A", 2)
    with pytest.raises(UnknownSuite):
        identity_suite(frame, "bogus")


def test_identity_suite_deterministic():
    frame = frame_for("A", 2)
    r1 = identity_suite(frame, "mel", trials=500, seed=9)
    r2 = identity_suite(frame, "mel", trials=500, seed=9)
    d1, d2 = r1.to_json_dict(), r2.to_json_dict()
    d1.pop("elapsed_ms")
    d2.pop("elapsed_ms")
    assert d1 == d2


def test_identity_suite_threaded_matches(monkeypatch):
    frame = frame_for("A", 2)
    base = identity_suite(frame, "all", trials=400, seed=3)
    monkeypatch.setenv("FLAGMORSE_THREADS", "4")
    threaded = identity_suite(frame, "all", trials=400, seed=3)
    for a, b in zip(base.checks, threaded.checks):
        assert a.name == b.name
        assert a.max_residual == b.max_residual


def test_curvature_quadratic_nonnegative(borel_frame, rng):
    frame = borel_frame
    x = frame.random_m(rng, 200)
    y = frame.random_m(rng, 200)
    assert np.all(curvature_quadratic(frame, x, y) >= 0.0)
