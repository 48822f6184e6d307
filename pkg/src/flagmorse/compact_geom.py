"""Numeric geometry of the compact real form.

A frame packages the ordered real basis (Cartan block, isotropy root planes,
tangent root planes), its bracket tensor, metric, and complex structure, all
computed exactly through the complexified bracket and then frozen into
float64.  Every tensor along a geodesic is reduced to constant coefficients
in this frame, so transport is a single matrix exponential and all the
pointwise identities become finite-dimensional residual checks.
"""

from __future__ import annotations

import concurrent.futures
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.linalg import expm

from .chevalley import ChevalleyData, ComplexElement, bracket_c, build_chevalley
from .errors import DegenerateCoefficients, NotInK, UnknownSuite
from .exactnum import CSqrt2, Sqrt2
from .parabolic import ParabolicSplit
from .rootsys import RootVector, build_root_system

# ---------------------------------------------------------------------------
# frame construction


@dataclass(frozen=True)
class RealFormFrame:
    """Constant-coefficient model of the compact form at the base point."""

    split: ParabolicSplit
    chev: ChevalleyData = field(repr=False)
    labels: tuple = field(repr=False)
    dim: int
    m_start: int
    m_pos: tuple[RootVector, ...]
    k_pos: tuple[RootVector, ...]
    bracket_tensor: np.ndarray = field(repr=False)
    metric: np.ndarray = field(repr=False)
    j_m: np.ndarray = field(repr=False)
    slots: dict[RootVector, tuple[int, int]] = field(repr=False)

    @property
    def sys(self):
        return self.split.sys

    @property
    def m_dim(self) -> int:
        return self.dim - self.m_start

    @property
    def v(self) -> int:
        return len(self.m_pos)

    def describe(self) -> dict:
        return {
            "family": self.sys.family,
            "rank": self.sys.rank,
            "painted": sorted(self.split.sigma_k),
            "dim": self.dim,
            "m_dim": self.m_dim,
        }

    # -- coordinates --------------------------------------------------------

    def embed_m(self, x_m: np.ndarray) -> np.ndarray:
        out = np.zeros(x_m.shape[:-1] + (self.dim,))
        out[..., self.m_start:] = x_m
        return out

    def m_part(self, x: np.ndarray) -> np.ndarray:
        return x[..., self.m_start:]

    def k_part(self, x: np.ndarray) -> np.ndarray:
        return x[..., : self.m_start]

    def m_slot(self, alpha: RootVector) -> tuple[int, int]:
        ix, iy = self.slots[alpha]
        return ix - self.m_start, iy - self.m_start

    # -- algebra ------------------------------------------------------------

    def bracket_full(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if x.ndim == 1 and y.ndim == 1:
            return np.einsum("i,j,ijk->k", x, y, self.bracket_tensor, optimize=True)
        x2 = np.atleast_2d(x)
        y2 = np.atleast_2d(y)
        if x2.shape[0] == 1 and y2.shape[0] > 1:
            x2 = np.broadcast_to(x2, y2.shape)
        if y2.shape[0] == 1 and x2.shape[0] > 1:
            y2 = np.broadcast_to(y2, x2.shape)
        return np.einsum("ni,nj,ijk->nk", x2, y2, self.bracket_tensor, optimize=True)

    def ad_matrix(self, w: np.ndarray) -> np.ndarray:
        """Matrix of x -> bracket(w, x) on the full frame."""
        m = np.tensordot(w, self.bracket_tensor, axes=(0, 0))
        return m.T

    def inner(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("...i,ij,...j->...", x, self.metric, y)

    def m_inner(self, x_m: np.ndarray, y_m: np.ndarray) -> np.ndarray:
        # the tangent metric block is exactly 2 * identity
        return 2.0 * np.einsum("...i,...i->...", x_m, y_m)

    def m_norm2(self, x_m: np.ndarray) -> np.ndarray:
        return self.m_inner(x_m, x_m)

    def k_inner(self, x_k: np.ndarray, y_k: np.ndarray) -> np.ndarray:
        g = self.metric[: self.m_start, : self.m_start]
        return np.einsum("...i,ij,...j->...", x_k, g, y_k)

    def random_m(self, rng: np.random.Generator, n: Optional[int] = None) -> np.ndarray:
        shape = (self.m_dim,) if n is None else (n, self.m_dim)
        return rng.standard_normal(shape)


def _project_exact(frame_data, z: ComplexElement):
    """Split an exact bracket result over the real basis; returns float coords."""
    sys, simples_inv, positives, slots, rank, dim = frame_data
    coords = np.zeros(dim)
    half = Fraction(1, 2)
    for mu in positives:
        c_plus = z.coeffs.get(mu)
        c_minus = z.coeffs.get(-mu)
        if c_plus is None and c_minus is None:
            continue
        c_plus = c_plus if c_plus is not None else CSqrt2.of(0)
        c_minus = c_minus if c_minus is not None else CSqrt2.of(0)
        x = (c_plus - c_minus) * half
        y = (c_plus + c_minus) * CSqrt2.make(0, -half)
        if not x.im.is_zero() or not y.im.is_zero():
            raise ValueError(f"bracket left the real form at {mu}")
        ix, iy = slots[mu]
        coords[ix] = float(x.re)
        coords[iy] = float(y.re)
    if any(not h.is_zero() for h in z.h_part):
        w = []
        for h in z.h_part:
            if not h.re.is_zero():
                raise ValueError("bracket left the real form in the Cartan block")
            w.append(h.im)
        u = [sum((simples_inv[i][j] * w_j for j, w_j in enumerate(w)), Sqrt2.of(0))
             for i in range(rank)]
        for i, u_i in enumerate(u):
            coords[i] = float(u_i)
    return coords


def build_frame(split: ParabolicSplit, chev: Optional[ChevalleyData] = None) -> RealFormFrame:
    """Bracket table, metric and complex structure over the ordered real basis."""
    sys = split.sys
    if chev is None:
        chev = build_chevalley(sys)
    rank = sys.rank
    k_pos = split.k_pos_sorted
    m_pos = split.m_pos_sorted
    labels: list = [("h", j) for j in range(rank)]
    slots: dict[RootVector, tuple[int, int]] = {}
    for alpha in (*k_pos, *m_pos):
        slots[alpha] = (len(labels), len(labels) + 1)
        labels.append(("X", alpha))
        labels.append(("Y", alpha))
    dim = len(labels)
    m_start = rank + 2 * len(k_pos)

    i1 = CSqrt2.make(0, 1)
    elements = []
    for lab in labels:
        kind, payload = lab
        if kind == "h":
            coords = tuple(CSqrt2.make(0, c) for c in sys.simples[payload].unscaled())
            elements.append(ComplexElement.cartan(sys, coords))
        elif kind == "X":
            e = ComplexElement.root_vector(sys, payload)
            f = ComplexElement.root_vector(sys, -payload)
            elements.append(e - f)
        else:
            e = ComplexElement.root_vector(sys, payload, i1)
            f = ComplexElement.root_vector(sys, -payload, i1)
            elements.append(e + f)

    # exact pseudo-solver for the Cartan block: w = sum u_j * simple_j (unscaled)
    cols = [s.unscaled() for s in sys.simples]
    gram = [[sum(a * b for a, b in zip(cols[i], cols[j])) for j in range(rank)]
            for i in range(rank)]
    from .rootsys import _invert_fraction_matrix

    gram_inv = _invert_fraction_matrix(gram)
    mt = [[cols[i][j] for j in range(sys.ambient_dim)] for i in range(rank)]
    simples_inv = [
        [sum(gram_inv[i][kk] * mt[kk][j] for kk in range(rank)) for j in range(sys.ambient_dim)]
        for i in range(rank)
    ]
    frame_data = (sys, simples_inv, (*k_pos, *m_pos), slots, rank, dim)

    tensor = np.zeros((dim, dim, dim))
    for i in range(dim):
        for j in range(i + 1, dim):
            z = bracket_c(chev, elements[i], elements[j])
            coords = _project_exact(frame_data, z)
            tensor[i, j] = coords
            tensor[j, i] = -coords

    metric = np.zeros((dim, dim))
    for i in range(rank):
        for j in range(rank):
            metric[i, j] = float(
                sys.norm_scale * sum(a * b for a, b in zip(cols[i], cols[j]))
            )
    for alpha in (*k_pos, *m_pos):
        ix, iy = slots[alpha]
        metric[ix, ix] = 2.0
        metric[iy, iy] = 2.0

    m_dim = dim - m_start
    j_m = np.zeros((m_dim, m_dim))
    for alpha in m_pos:
        ix, iy = slots[alpha]
        ix, iy = ix - m_start, iy - m_start
        j_m[iy, ix] = 1.0
        j_m[ix, iy] = -1.0

    return RealFormFrame(
        split=split,
        chev=chev,
        labels=tuple(labels),
        dim=dim,
        m_start=m_start,
        m_pos=m_pos,
        k_pos=k_pos,
        bracket_tensor=tensor,
        metric=metric,
        j_m=j_m,
        slots=slots,
    )


def frame_for(family: str, rank: int, painted: Sequence[int] = ()) -> RealFormFrame:
    """Convenience builder from family/rank/painted indices (cached)."""
    return _frame_cached(family.upper(), rank, tuple(sorted(painted)))


_FRAME_CACHE: dict = {}


def _frame_cached(family: str, rank: int, painted: tuple) -> RealFormFrame:
    key = (family, rank, painted)
    if key not in _FRAME_CACHE:
        from .parabolic import PaintedDiagram, split as make_split

        sys = build_root_system(family, rank)
        sp = make_split(sys, PaintedDiagram.of(sys, painted))
        _FRAME_CACHE[key] = build_frame(sp)
    return _FRAME_CACHE[key]


# ---------------------------------------------------------------------------
# core operators


def bracket_m(frame: RealFormFrame, x_m: np.ndarray, y_m: np.ndarray) -> np.ndarray:
    """Tangent-block part of the bracket of two tangent vectors."""
    full = frame.bracket_full(frame.embed_m(x_m), frame.embed_m(y_m))
    return frame.m_part(full)


def bracket_k(frame: RealFormFrame, x_m: np.ndarray, y_m: np.ndarray) -> np.ndarray:
    """Isotropy-block part of the bracket of two tangent vectors."""
    full = frame.bracket_full(frame.embed_m(x_m), frame.embed_m(y_m))
    return frame.k_part(full)


def _ad_m_to_m(frame: RealFormFrame, w_m: np.ndarray) -> np.ndarray:
    ad = frame.ad_matrix(frame.embed_m(w_m))
    return ad[frame.m_start:, frame.m_start:]


def _ad_m_to_k(frame: RealFormFrame, w_m: np.ndarray) -> np.ndarray:
    ad = frame.ad_matrix(frame.embed_m(w_m))
    return ad[: frame.m_start, frame.m_start:]


def r_operator(frame: RealFormFrame, gdot: np.ndarray) -> np.ndarray:
    """Matrix of X -> [gdot, X]_m + J [J gdot, X]_m on the tangent block."""
    if not np.any(gdot):
        raise ValueError("velocity must be nonzero")
    a1 = _ad_m_to_m(frame, gdot)
    a2 = _ad_m_to_m(frame, frame.j_m @ gdot)
    return a1 + frame.j_m @ a2


@dataclass(frozen=True)
class HatTransport:
    """Transport along a geodesic as a one-parameter matrix family."""

    r_matrix: np.ndarray

    def __call__(self, t: float) -> np.ndarray:
        return expm(-0.5 * t * self.r_matrix)


def make_hat_transport(frame: RealFormFrame, gdot: np.ndarray) -> HatTransport:
    return HatTransport(r_operator(frame, gdot))


def hat_transport(frame: RealFormFrame, gdot: np.ndarray, t: float) -> np.ndarray:
    """Transport matrix at time t (identity at t = 0)."""
    return make_hat_transport(frame, gdot)(t)


def gauss_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


def _hessian_integrand_factory(frame: RealFormFrame, gdot: np.ndarray):
    """Per-time quadratic terms of the energy Hessian on transported fields."""
    r = r_operator(frame, gdot)
    ad_k = _ad_m_to_k(frame, gdot)  # X -> [gdot, X]_k ; [X, gdot]_k = -that
    g_k = frame.metric[: frame.m_start, : frame.m_start]
    j = frame.j_m

    def terms(x_m: np.ndarray) -> np.ndarray:
        rx = x_m @ r.T
        t1 = 0.5 * 2.0 * np.einsum("...i,...i->...", rx, rx)
        kx = x_m @ ad_k.T
        kjx = (x_m @ j.T) @ ad_k.T
        t2 = np.einsum("...i,ij,...j->...", kx, g_k, kx)
        t3 = np.einsum("...i,ij,...j->...", kjx, g_k, kjx)
        return t1 + t2 + t3

    return r, terms


def complex_hessian(
    frame: RealFormFrame,
    gdot: np.ndarray,
    x0: np.ndarray,
    quadrature_nodes: int = 64,
) -> float:
    """Averaged second-variation value on a transport-parallel field."""
    return float(
        complex_hessian_many(frame, gdot, np.atleast_2d(x0), quadrature_nodes)[0]
    )


def complex_hessian_many(
    frame: RealFormFrame,
    gdot: np.ndarray,
    x0_batch: np.ndarray,
    quadrature_nodes: int = 64,
) -> np.ndarray:
    if quadrature_nodes < 16:
        raise ValueError("use at least 16 quadrature nodes")
    r, terms = _hessian_integrand_factory(frame, gdot)
    ts, ws = gauss_nodes(quadrature_nodes)
    total = np.zeros(x0_batch.shape[0])
    for t, w in zip(ts, ws):
        xt = x0_batch @ expm(-0.5 * t * r).T
        total += w * terms(xt)
    return -total


# ---------------------------------------------------------------------------
# the pair-space operator and the twisted quadratic form


def s0_indices(frame: RealFormFrame, pair_set) -> tuple[tuple[RootVector, RootVector], ...]:
    """Sorted pair list; each pair as (alpha, beta) with alpha < beta."""
    pairs = []
    for pair in pair_set:
        a, b = sorted(tuple(pair))
        pairs.append((a, b))
    return tuple(sorted(pairs))


def s0_embedding(frame: RealFormFrame, pair_set) -> np.ndarray:
    """Full-frame indices of the pair-space coordinates, pair by pair."""
    idx = []
    for a, b in s0_indices(frame, pair_set):
        idx.extend(frame.slots[a])
        idx.extend(frame.slots[b])
    return np.array(idx, dtype=int)


def tilde_vector(frame: RealFormFrame, delta: RootVector, a: float, b: float) -> np.ndarray:
    """Full-frame vector a*X_delta + b*Y_delta."""
    out = np.zeros(frame.dim)
    ix, iy = frame.slots[delta]
    out[ix], out[iy] = a, b
    return out


def map_I(
    frame: RealFormFrame,
    delta: RootVector,
    a: float,
    b: float,
    pair_set,
) -> np.ndarray:
    """Matrix of the quarter-turn operator on the pair space of ``delta``."""
    if a == 0 and b == 0:
        raise DegenerateCoefficients("both coefficients vanish")
    pairs = s0_indices(frame, pair_set)
    for alpha, beta in pairs:
        if alpha + beta != delta:
            raise ValueError(f"pair {(alpha, beta)} does not sum to {delta}")
    tilde = tilde_vector(frame, delta, a, b)
    scale = float(np.hypot(a, b))
    n = 4 * len(pairs)
    out = np.zeros((n, n))
    for p, (alpha, beta) in enumerate(pairs):
        idx = [*frame.slots[alpha], *frame.slots[beta]]
        c = abs(float(frame.chev.constant(alpha, beta)))
        for col in range(4):
            basis = np.zeros(frame.dim)
            basis[idx[col]] = 1.0
            w = frame.bracket_full(tilde, basis)
            out[4 * p: 4 * p + 4, 4 * p + col] = w[idx] / (scale * c)
    return out


def p_pairing(
    frame: RealFormFrame, x: np.ndarray, y: np.ndarray, gdot: np.ndarray
) -> float:
    """Slice value of the mixed bracket pairing against the velocity."""
    j = frame.j_m
    term = bracket_m(frame, y, x) - bracket_m(frame, j @ y, j @ x)
    return float(frame.m_inner(term, gdot))


def p_bound(frame: RealFormFrame, gdot: np.ndarray) -> float:
    """Operator-norm bound N with |P(x, y)| <= N |x| |y|."""
    d = frame.m_dim
    j = frame.j_m
    basis = np.eye(d)
    # P(e_p, e_q) = <[e_q, e_p]_m - [J e_q, J e_p]_m, gdot>, filled by columns
    b_mat = np.zeros((d, d))
    for q in range(d):
        yq = basis[q]
        t1 = bracket_m(frame, np.tile(yq, (d, 1)), basis)
        t2 = bracket_m(frame, np.tile(j @ yq, (d, 1)), basis @ j.T)
        b_mat[:, q] = frame.m_inner(t1 - t2, gdot)
    # metric is 2*identity on the block: normalized bound is ||B||_2 / 2
    return float(np.linalg.norm(b_mat, 2) / 2.0)


def q_form(
    frame: RealFormFrame,
    gdot: np.ndarray,
    x0: np.ndarray,
    y0: np.ndarray,
    w0: np.ndarray,
    k: float,
    quadrature_nodes: int = 64,
    *,
    i_map: Optional[np.ndarray] = None,
    pair_set=None,
) -> float:
    """Quaternionic average of the energy Hessian on a twisted field."""
    if np.any(w0):
        if i_map is None or pair_set is None:
            raise ValueError("a pair-space operator is required for a nonzero w0")
        emb = s0_embedding(frame, pair_set) - frame.m_start
        w_s0 = w0[emb]
        iw0 = np.zeros_like(w0)
        iw0[emb] = i_map @ w_s0
    else:
        iw0 = np.zeros_like(w0)
    xbar0 = x0 + w0
    ybar0 = y0 + iw0
    r, terms = _hessian_integrand_factory(frame, gdot)
    ts, ws = gauss_nodes(quadrature_nodes)
    j = frame.j_m
    hess = 0.0
    twist = 0.0
    for t, w in zip(ts, ws):
        e = expm(-0.5 * t * r)
        xt, yt = e @ xbar0, e @ ybar0
        hess -= w * (terms(xt) + terms(yt))
        p_slice = frame.m_inner(
            bracket_m(frame, yt, xt) - bracket_m(frame, j @ yt, j @ xt), gdot
        )
        twist += w * (
            2.0 * k * k * (frame.m_norm2(xt) + frame.m_norm2(yt)) + 2.0 * k * p_slice
        )
    return float(hess + twist)


@dataclass(frozen=True)
class KSearchResult:
    k: float
    margin: float
    q_values: tuple[float, ...]


def k_search(
    frame: RealFormFrame,
    gdot: np.ndarray,
    configs: Sequence[tuple[np.ndarray, np.ndarray]],
    quadrature_nodes: int = 64,
    k_start: float = 1.0,
    max_halvings: int = 60,
) -> KSearchResult:
    """Smallest-dyadic twisting rate making the averaged form negative on all
    supplied (xbar0, ybar0) configurations.

    The form is quadratic in the rate, so the per-configuration coefficients
    are integrated once and the bisection runs on the closed forms.
    """
    r, terms = _hessian_integrand_factory(frame, gdot)
    ts, ws = gauss_nodes(quadrature_nodes)
    j = frame.j_m
    xb = np.array([c[0] for c in configs])
    yb = np.array([c[1] for c in configs])
    e_part = np.zeros(len(configs))
    a_part = np.zeros(len(configs))
    b_part = np.zeros(len(configs))
    for t, w in zip(ts, ws):
        e = expm(-0.5 * t * r)
        xt, yt = xb @ e.T, yb @ e.T
        e_part -= w * (terms(xt) + terms(yt))
        a_part += w * (frame.m_norm2(xt) + frame.m_norm2(yt))
        p_slice = frame.m_inner(
            frame.m_part(frame.bracket_full(frame.embed_m(yt), frame.embed_m(xt)))
            - frame.m_part(
                frame.bracket_full(frame.embed_m(yt @ j.T), frame.embed_m(xt @ j.T))
            ),
            gdot,
        )
        b_part += w * p_slice

    def worst(k: float) -> float:
        return float(np.max(e_part + 2.0 * k * k * a_part + 2.0 * k * b_part))

    k = k_start
    for _ in range(max_halvings):
        value = worst(k)
        if value < 0:
            qs = e_part + 2.0 * k * k * a_part + 2.0 * k * b_part
            return KSearchResult(k=k, margin=-value, q_values=tuple(qs))
        k /= 2.0
    raise RuntimeError("no negative twisting rate found; configurations degenerate?")


def adjoint_perturb(
    frame: RealFormFrame,
    gamma_coeffs: np.ndarray,
    root_k: RootVector,
    t: float = 1e-3,
    support_threshold: float = 1e-9,
) -> tuple[np.ndarray, frozenset[RootVector]]:
    """Push the velocity by the isotropy flow of one painted-span root plane.

    Returns the perturbed tangent coordinates and their root support above
    ``support_threshold`` times the original norm.
    """
    if root_k not in frame.split.delta_k_pos:
        raise NotInK(f"{root_k} is not a positive painted-span root")
    x_full = np.zeros(frame.dim)
    x_full[frame.slots[root_k][0]] = 1.0
    ad = frame.ad_matrix(x_full)
    ad_mm = ad[frame.m_start:, frame.m_start:]
    leak = ad[: frame.m_start, frame.m_start:]
    if np.max(np.abs(leak)) > 1e-12:
        raise RuntimeError("isotropy action leaked outside the tangent block")
    new = expm(t * ad_mm) @ gamma_coeffs
    cutoff = support_threshold * np.sqrt(frame.m_norm2(gamma_coeffs))
    support = set()
    for alpha in frame.m_pos:
        ix, iy = frame.m_slot(alpha)
        if np.hypot(new[ix], new[iy]) > cutoff:
            support.add(alpha)
    return new, frozenset(support)


# ---------------------------------------------------------------------------
# identity suites


@dataclass(frozen=True)
class CheckResult:
    name: str
    description: str
    trials: int
    max_residual: float
    tolerance: float
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tolerance

    def to_json_dict(self) -> dict:
        out = {
            "name": self.name,
            "description": self.description,
            "trials": self.trials,
            "max_residual": self.max_residual,
            "pass": self.passed,
            "tolerance": self.tolerance,
        }
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class Report:
    suite: str
    frame_info: dict
    seed: int
    trials: int
    checks: tuple[CheckResult, ...]
    elapsed_ms: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json_dict(self) -> dict:
        return {
            "suite": self.suite,
            "frame": self.frame_info,
            "seed": self.seed,
            "trials": self.trials,
            "checks": [c.to_json_dict() for c in self.checks],
            "elapsed_ms": self.elapsed_ms,
            "pass": self.passed,
        }


TOL_IDENTITY = 1e-10


def _max_norm(arr: np.ndarray) -> float:
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def _brk(frame, x, y):
    return np.einsum("ni,nj,ijk->nk", x, y, frame.bracket_tensor, optimize=True)


def _embed_batch(frame, x_m):
    out = np.zeros((x_m.shape[0], frame.dim), dtype=x_m.dtype)
    out[:, frame.m_start:] = x_m
    return out


def _brk_m(frame, x_m, y_m):
    return _brk(frame, _embed_batch(frame, x_m), _embed_batch(frame, y_m))[:, frame.m_start:]


def _brk_k(frame, x_m, y_m):
    return _brk(frame, _embed_batch(frame, x_m), _embed_batch(frame, y_m))[:, : frame.m_start]


def _check_integrability(frame: RealFormFrame, rng, trials: int) -> CheckResult:
    j = frame.j_m
    x = frame.random_m(rng, trials)
    y = frame.random_m(rng, trials)
    res = (
        _brk_m(frame, x, y)
        + _brk_m(frame, x @ j.T, y) @ j.T
        + _brk_m(frame, x, y @ j.T) @ j.T
        - _brk_m(frame, x @ j.T, y @ j.T)
    )
    return CheckResult(
        "integrability-defect",
        "complex structure against the projected bracket",
        trials, _max_norm(res), TOL_IDENTITY,
    )


def _split_10(frame, x_m):
    """(1,0) part in complexified tangent coordinates."""
    return 0.5 * (x_m - 1j * (x_m @ frame.j_m.T))


def _check_holomorphic_closure(frame, rng, trials) -> CheckResult:
    x10 = _split_10(frame, frame.random_m(rng, trials))
    y10 = _split_10(frame, frame.random_m(rng, trials))
    z = _brk_m(frame, x10, y10)
    res = z @ frame.j_m.T - 1j * z
    return CheckResult(
        "holomorphic-closure",
        "brackets of (1,0) fields stay of type (1,0) in the tangent block",
        trials, _max_norm(res), TOL_IDENTITY,
    )


def _check_r_operator_form(frame, rng, trials) -> CheckResult:
    j = frame.j_m
    x = frame.random_m(rng, trials)
    y = frame.random_m(rng, trials)
    r_val = _brk_m(frame, y, x) + _brk_m(frame, y @ j.T, x) @ j.T
    w = _brk_m(frame, _split_10(frame, x), _split_10(frame, y).conj())
    z = w - 1j * (w @ j.T)
    res = r_val + (z + z.conj()).real
    return CheckResult(
        "r-operator-form",
        "the transport generator as the defect of a mixed-type bracket",
        trials, _max_norm(res), TOL_IDENTITY,
    )


def _check_isotropy_vanishing(frame, rng, trials) -> CheckResult:
    x10 = _split_10(frame, frame.random_m(rng, trials))
    y10 = _split_10(frame, frame.random_m(rng, trials))
    res = _brk_k(frame, x10, y10)
    return CheckResult(
        "isotropy-vanishing",
        "brackets of two (1,0) fields have no isotropy part",
        trials, _max_norm(res), TOL_IDENTITY,
    )


def _check_isotropy_pairing(frame, rng, trials) -> CheckResult:
    j = frame.j_m
    g_k = frame.metric[: frame.m_start, : frame.m_start]
    x = frame.random_m(rng, trials)
    y = frame.random_m(rng, trials)
    lhs = (
        np.einsum("ni,ij,nj->n", _brk_k(frame, x, y), g_k, _brk_k(frame, x, y))
        + np.einsum("ni,ij,nj->n", _brk_k(frame, x @ j.T, y), g_k, _brk_k(frame, x @ j.T, y))
    )
    w = _brk_k(frame, _split_10(frame, x), _split_10(frame, y).conj())
    rhs = 4.0 * np.einsum("ni,ij,nj->n", w, g_k, w.conj()).real
    return CheckResult(
        "isotropy-pairing",
        "isotropy bracket norms against the mixed-type pairing",
        trials, _max_norm(lhs - rhs), TOL_IDENTITY,
    )


def _kernel_supports(frame, delta):
    """Tangent-positive roots whose plane brackets the conjugate of the
    delta-plane back into anti-holomorphic directions only (after the tangent
    projection, which drops Cartan and isotropy parts)."""
    return [alpha for alpha in frame.m_pos
            if (alpha - delta) not in frame.split.delta_m_pos]


def _conditioned_pair(frame, rng):
    """Random (x, y) with y in one root plane and x supported so that the
    mixed-type bracket stays anti-holomorphic in the tangent block."""
    deltas = frame.m_pos
    delta = deltas[rng.integers(len(deltas))]
    a, b = rng.standard_normal(2)
    y = np.zeros(frame.m_dim)
    ix, iy = frame.m_slot(delta)
    y[ix], y[iy] = a, b
    x = np.zeros(frame.m_dim)
    for alpha in _kernel_supports(frame, delta):
        jx, jy = frame.m_slot(alpha)
        x[jx], x[jy] = rng.standard_normal(2)
    return x, y


def _check_conditioned_commutation(frame, rng, trials) -> CheckResult:
    j = frame.j_m
    res = 0.0
    xs, ys = [], []
    for _ in range(trials):
        x, y = _conditioned_pair(frame, rng)
        xs.append(x)
        ys.append(y)
    x = np.array(xs)
    y = np.array(ys)
    res = _brk_m(frame, y, x) @ j.T - _brk_m(frame, y @ j.T, x)
    return CheckResult(
        "conditioned-commutation",
        "complex structure passes through the bracket when the transport "
        "generator annihilates the field",
        trials, _max_norm(res), TOL_IDENTITY,
    )


def _check_conditioned_skew(frame, rng, trials) -> CheckResult:
    j = frame.j_m
    xs, ys = [], []
    for _ in range(trials):
        x, y = _conditioned_pair(frame, rng)
        xs.append(x)
        ys.append(y)
    x = np.array(xs)
    y = np.array(ys)
    z = _brk_m(frame, _split_10(frame, y), _split_10(frame, x))
    res = _brk_m(frame, y, x) @ j.T + _brk_m(frame, y, x @ j.T) + 4.0 * z.imag
    return CheckResult(
        "conditioned-skew",
        "the anti-linear defect of the bracket reduces to holomorphic terms",
        trials, _max_norm(res), TOL_IDENTITY,
    )


def _pair_sets(frame):
    """All unordered positive pairs summing to each tangent-positive root."""
    sys = frame.sys
    out = {}
    for delta in frame.m_pos:
        pairs = []
        seen = set()
        for alpha in sys.positives:
            beta = delta - alpha
            if alpha in seen:
                continue
            if sys.is_positive(beta) and sys.contains(beta):
                pairs.append((min(alpha, beta), max(alpha, beta)))
                seen.update((alpha, beta))
        if pairs:
            out[delta] = tuple(sorted(pairs))
    return out


def _check_double_bracket(frame, rng, trials) -> CheckResult:
    pair_sets = _pair_sets(frame)
    if not pair_sets:
        return CheckResult("double-bracket", "no decomposable roots in this frame",
                           0, 0.0, TOL_IDENTITY)
    deltas = sorted(pair_sets)
    worst = 0.0
    combos = sum(len(pair_sets[d]) for d in deltas)
    per = -(-trials // combos)
    total = 0
    for delta in deltas:
        for alpha, beta in pair_sets[delta]:
            a, b = rng.standard_normal(2)
            tilde = tilde_vector(frame, delta, a, b)
            idx = [*frame.slots[alpha], *frame.slots[beta]]
            c2 = float(frame.chev.constant(alpha, beta)) ** 2
            x = rng.standard_normal((per, 4))
            full = np.zeros((per, frame.dim))
            full[:, idx] = x
            once = _brk(frame, np.broadcast_to(tilde, full.shape), full)
            proj = np.zeros_like(full)
            proj[:, idx] = once[:, idx]
            twice = _brk(frame, np.broadcast_to(tilde, full.shape), proj)[:, idx]
            res = twice + (a * a + b * b) * c2 * x
            worst = max(worst, _max_norm(res))
            total += per
    return CheckResult(
        "double-bracket",
        "twice-projected bracketing against a root plane scales by the "
        "squared structure constant",
        total, worst, TOL_IDENTITY,
    )


def _check_quarter_turn(frame, rng, trials) -> CheckResult:
    """Involution, anticommutation and isometry of the pair-space operator."""
    pair_sets = _pair_sets(frame)
    usable = {d: p for d, p in pair_sets.items()
              if all(x in frame.split.delta_m_pos and y in frame.split.delta_m_pos
                     for x, y in p)}
    if not usable:
        return CheckResult("quarter-turn", "no usable pair sets", 0, 0.0, TOL_IDENTITY)
    worst = 0.0
    total = 0
    for delta in sorted(usable):
        a, b = rng.standard_normal(2)
        if a == 0 and b == 0:
            a = 1.0
        i_mat = map_I(frame, delta, a, b, usable[delta])
        n = i_mat.shape[0]
        worst = max(worst, _max_norm(i_mat @ i_mat + np.eye(n)))
        emb = s0_embedding(frame, usable[delta]) - frame.m_start
        j_s0 = frame.j_m[np.ix_(emb, emb)]
        worst = max(worst, _max_norm(i_mat @ j_s0 + j_s0 @ i_mat))
        x = rng.standard_normal((-(-trials // len(usable)), n))
        worst = max(
            worst,
            _max_norm(np.einsum("ni,ni->n", x @ i_mat.T, x @ i_mat.T)
                      - np.einsum("ni,ni->n", x, x)),
        )
        total += x.shape[0]
    return CheckResult(
        "quarter-turn",
        "pair-space operator squares to minus identity, anticommutes with "
        "the complex structure, and is an isometry",
        total, worst, TOL_IDENTITY,
    )


def _check_pair_bounds(frame, rng, trials) -> CheckResult:
    """Lower bound of the bracket pairing on pair spaces, slice level."""
    from .chevalley import n0_constant

    pair_sets = _pair_sets(frame)
    usable = {d: p for d, p in pair_sets.items()
              if all(x in frame.split.delta_m_pos and y in frame.split.delta_m_pos
                     for x, y in p)}
    if not usable:
        return CheckResult("pair-bound", "no usable pair sets", 0, 0.0, 1e-8)
    worst = 0.0
    total = 0
    for delta in sorted(usable):
        pairs = usable[delta]
        a, b = rng.standard_normal(2)
        if a == 0 and b == 0:
            a = 1.0
        n0 = n0_constant(frame.chev, [frozenset(p) for p in pairs])
        i_mat = map_I(frame, delta, a, b, pairs)
        emb_full = s0_embedding(frame, pairs)
        tilde = tilde_vector(frame, delta, a, b)
        per = -(-trials // len(usable))
        x = rng.standard_normal((per, i_mat.shape[0]))
        full = np.zeros((per, frame.dim))
        full[:, emb_full] = x @ i_mat.T
        full2 = np.zeros((per, frame.dim))
        full2[:, emb_full] = x
        br = _brk(frame, full, full2)
        val = np.einsum("ni,ij,j->n", br, frame.metric, tilde)
        norms = 2.0 * np.einsum("ni,ni->n", x, x)
        excess = val + n0 * np.hypot(a, b) * norms
        worst = max(worst, float(np.max(np.maximum(excess, 0.0))))
        # slice-level form of the twisted pairing bound (rate-free)
        j_full = np.zeros((frame.dim, frame.dim))
        j_full[frame.m_start:, frame.m_start:] = frame.j_m
        p_val = np.einsum(
            "ni,ij,j->n",
            _brk(frame, full, full2) - _brk(frame, full @ j_full.T, full2 @ j_full.T),
            frame.metric, tilde,
        )
        excess2 = p_val + 2.0 * n0 * np.hypot(a, b) * norms
        worst = max(worst, float(np.max(np.maximum(excess2, 0.0))))
        total += per
    return CheckResult(
        "pair-bound",
        "bracket pairing against the twist direction is at most minus the "
        "minimal structure constant times the squared norm",
        total, worst, 1e-8,
        note="the rate-free slice-level bound is checked; the literal "
             "rate-weighted display is dimensionally inconsistent at a slice",
    )


def _check_curvature_nonneg(frame, rng, trials) -> CheckResult:
    x = frame.random_m(rng, trials)
    y = frame.random_m(rng, trials)
    vals = curvature_quadratic(frame, x, y)
    worst = float(np.max(np.maximum(-vals, 0.0)))
    return CheckResult(
        "curvature-nonnegativity",
        "sectional curvature quadratic is a sum of squares",
        trials, worst, TOL_IDENTITY,
    )


def _check_curvature_diagonal(frame, rng, trials) -> CheckResult:
    x = frame.random_m(rng, trials)
    lam = rng.standard_normal((trials, 1))
    vals = curvature_quadratic(frame, x, lam * x)
    return CheckResult(
        "curvature-diagonal",
        "the quadratic vanishes on proportional arguments",
        trials, _max_norm(vals), TOL_IDENTITY,
    )


def curvature_quadratic(frame: RealFormFrame, x_m, y_m) -> np.ndarray:
    """<R(x, y) y, x> = (1/4)|[x, y]_m|^2 + |[x, y]_k|^2."""
    x2 = np.atleast_2d(x_m)
    y2 = np.atleast_2d(y_m)
    bm = _brk_m(frame, x2, y2)
    bk = _brk_k(frame, x2, y2)
    g_k = frame.metric[: frame.m_start, : frame.m_start]
    out = 0.25 * 2.0 * np.einsum("ni,ni->n", bm, bm) + np.einsum(
        "ni,ij,nj->n", bk, g_k, bk
    )
    return out if np.ndim(x_m) > 1 else out


def _check_hessian_chain(frame, rng, trials) -> CheckResult:
    j = frame.j_m
    g_k = frame.metric[: frame.m_start, : frame.m_start]
    a_f = frame.random_m(rng, trials)
    x = frame.random_m(rng, trials)
    g = frame.random_m(rng, trials)
    bm = _brk_m(frame, g, x)
    bmj = _brk_m(frame, g, x @ j.T)
    lhs = (
        frame.m_norm2(a_f + 0.5 * bm)
        + frame.m_norm2(a_f @ j.T + 0.5 * bmj)
        - curvature_quadratic(frame, g, x)
        - curvature_quadratic(frame, g, x @ j.T)
    )
    kx = _brk_k(frame, x, g)
    kjx = _brk_k(frame, x @ j.T, g)
    rhs = (
        2.0 * frame.m_norm2(a_f)
        + frame.m_inner(a_f, bm - bmj @ j.T)
        - np.einsum("ni,ij,nj->n", kx, g_k, kx)
        - np.einsum("ni,ij,nj->n", kjx, g_k, kjx)
    )
    return CheckResult(
        "hessian-chain",
        "pointwise reduction of the averaged second variation integrand",
        trials, _max_norm(lhs - rhs), TOL_IDENTITY,
    )


SUITES: dict[str, tuple[Callable, ...]] = {
    "integrability": (_check_integrability,),
    "mel": (
        _check_holomorphic_closure,
        _check_r_operator_form,
        _check_isotropy_vanishing,
        _check_isotropy_pairing,
    ),
    "onemel": (_check_conditioned_commutation, _check_conditioned_skew),
    "twomel": (_check_double_bracket, _check_quarter_turn, _check_pair_bounds),
    "curvature": (_check_curvature_nonneg, _check_curvature_diagonal),
    "ceh-chain": (_check_hessian_chain,),
}


def thread_count() -> int:
    raw = os.environ.get("FLAGMORSE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def identity_suite(
    frame: RealFormFrame, suite_name: str, trials: int = 10_000, seed: int = 0
) -> Report:
    """Run the named pointwise-identity suite on seeded random inputs."""
    if suite_name == "all":
        names = list(SUITES)
    elif suite_name in SUITES:
        names = [suite_name]
    else:
        raise UnknownSuite(f"unknown suite {suite_name!r}; "
                           f"choose from {sorted(SUITES)} or 'all'")
    start = time.perf_counter()
    checks: list[CheckResult] = []
    jobs = []
    for name in names:
        for ordinal, fn in enumerate(SUITES[name]):
            jobs.append((name, ordinal, fn))
    workers = thread_count()
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(fn, frame, np.random.default_rng([seed, i]), trials)
                for i, (_, _, fn) in enumerate(jobs)
            ]
            checks = [f.result() for f in futures]
    else:
        for i, (_, _, fn) in enumerate(jobs):
            checks.append(fn(frame, np.random.default_rng([seed, i]), trials))
    elapsed = (time.perf_counter() - start) * 1000.0
    return Report(
        suite=suite_name,
        frame_info=frame.describe(),
        seed=seed,
        trials=trials,
        checks=tuple(checks),
        elapsed_ms=elapsed,
    )


# ---------------------------------------------------------------------------
# frame invariants and the exact kernel classifier


def validate_frame(frame: RealFormFrame, trials: int = 2000, seed: int = 1) -> dict:
    """Numeric residuals for the structural frame invariants."""
    rng = np.random.default_rng(seed)
    d = frame.dim
    x = rng.standard_normal((trials, d))
    y = rng.standard_normal((trials, d))
    z = rng.standard_normal((trials, d))
    bxy = _brk(frame, x, y)
    assoc = np.einsum("ni,ij,nj->n", x, frame.metric, _brk(frame, y, z)) - np.einsum(
        "ni,ij,nj->n", bxy, frame.metric, z
    )
    jac = (
        _brk(frame, x, _brk(frame, y, z))
        + _brk(frame, y, _brk(frame, z, x))
        + _brk(frame, z, bxy)
    )
    xm = frame.random_m(rng, trials)
    ym = frame.random_m(rng, trials)
    j = frame.j_m
    herm = frame.m_inner(xm @ j.T, ym @ j.T) - frame.m_inner(xm, ym)
    return {
        "associativity": _max_norm(assoc),
        "jacobi": _max_norm(jac),
        "j_squared": _max_norm(j @ j + np.eye(frame.m_dim)),
        "hermitian": _max_norm(herm),
        "metric_blocks": _max_norm(
            frame.metric[frame.m_start:, frame.m_start:] - 2.0 * np.eye(frame.m_dim)
        ),
    }


def holomorphic_kernel_classification(
    frame: RealFormFrame,
    gamma_coeffs: dict[RootVector, tuple[Fraction, Fraction]],
    field_coeffs: dict[RootVector, tuple[Fraction, Fraction]],
) -> bool:
    """Exact test: does the (1,0) part of the field bracket the (0,1) part of
    the velocity into anti-holomorphic tangent directions only?

    Returns True when it does (degenerate averaged Hessian), False otherwise.
    Coefficients must be exact rationals.
    """
    sys = frame.sys
    chev = frame.chev
    x10 = ComplexElement.zero(sys)
    for alpha, (xa, ya) in field_coeffs.items():
        x10 = x10 + ComplexElement.root_vector(sys, alpha, CSqrt2.make(xa, ya))
    g01 = ComplexElement.zero(sys)
    for lam, (a, b) in gamma_coeffs.items():
        g01 = g01 + ComplexElement.root_vector(sys, -lam, CSqrt2.make(a, -b))
    result = bracket_c(chev, x10, g01)
    if any(not h.is_zero() for h in result.h_part):
        return False
    for root, coeff in result.coeffs.items():
        if coeff.is_zero():
            continue
        if not (sys.is_positive(-root) and (-root) in frame.split.delta_m_pos):
            return False
    return True
