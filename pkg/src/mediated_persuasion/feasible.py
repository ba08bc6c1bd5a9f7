"""The set of receiver-posterior pairs inducible through a fixed garbling.

For a full-rank 2x2 garbling and prior, the inducible ordered posterior
pairs form two convex "wings" meeting at the uninformative point
(prior, prior): the natural wing (first signal moves the belief down) and
the perverse wing (labels flipped). The wing boundaries are traced by the
four one-parameter experiment families that pin one experiment column to a
vertex of the simplex, and exact membership is decided by reconstructing
the inducing experiment in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DegeneratePrior,
    DimensionMismatch,
    NotSigmaPlausible,
    SingularGarbling,
)
from .info import (
    TOL,
    BeliefDistribution,
    BlackwellOrder,
    StochasticMatrix,
    _as_array,
    blackwell_compare,
    bayes_plausible_weights,
    compose,
    garbling_rank,
    induced_tau,
    validate_stochastic,
)

UNINFORMATIVE_X = np.full((2, 2), 0.5)

# extreme-point experiment families: one column pinned to a simplex vertex
X_FAMILIES = ("X1", "X2", "X3", "X4")


def family_experiment(family: str, p: float) -> np.ndarray:
    if family == "X1":
        return np.array([[1.0, p], [0.0, 1.0 - p]])
    if family == "X2":
        return np.array([[0.0, p], [1.0, 1.0 - p]])
    if family == "X3":
        return np.array([[p, 1.0], [1.0 - p, 0.0]])
    if family == "X4":
        return np.array([[p, 0.0], [1.0 - p, 1.0]])
    raise ValueError(f"unknown family {family!r}")


def posterior_pair(b, prior: float) -> tuple[float, float]:
    """Ordered posteriors (after signal 1, after signal 2) of a 2x2 structure.

    A zero-probability signal contributes its continuity limit, the prior.
    """
    a = _as_array(b)
    p = (1.0 - prior) * a[:, 0] + prior * a[:, 1]
    out = []
    for s in range(2):
        out.append(prior if p[s] <= TOL else prior * a[s, 1] / p[s])
    return float(out[0]), float(out[1])


def pairs_along_family(sigma, prior: float, family: str, ps) -> np.ndarray:
    """Ordered posterior pairs of ``sigma @ X_family(p)`` for an array of p."""
    a = _as_array(sigma)
    p = np.asarray(ps, dtype=float)
    mix0 = np.outer(a[:, 0], p) + np.outer(a[:, 1], 1.0 - p)  # sigma @ (p, 1-p)
    fixed0 = a[:, [0]] * np.ones_like(p)
    fixed1 = a[:, [1]] * np.ones_like(p)
    if family == "X1":
        col1, col2 = fixed0, mix0
    elif family == "X2":
        col1, col2 = fixed1, mix0
    elif family == "X3":
        col1, col2 = mix0, fixed0
    elif family == "X4":
        col1, col2 = mix0, fixed1
    else:
        raise ValueError(f"unknown family {family!r}")
    out = np.empty((p.size, 2))
    for s in range(2):
        mass = (1.0 - prior) * col1[s] + prior * col2[s]
        with np.errstate(invalid="ignore", divide="ignore"):
            beta = prior * col2[s] / np.where(mass > 0, mass, 1.0)
        out[:, s] = np.where(mass > TOL, beta, prior)
    return out


def _require_full_rank(sigma) -> np.ndarray:
    a = _as_array(sigma)
    if a.shape != (2, 2):
        raise DimensionMismatch("expected a 2x2 garbling")
    if not garbling_rank(a).full_rank:
        raise SingularGarbling(
            "rank-deficient garbling: every experiment induces the prior"
        )
    return a


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """One traced outer limit of the feasible set."""

    family: str
    params: np.ndarray  # strictly increasing in [0, 1]
    points: np.ndarray  # (n, 2) ordered posterior pairs


def boundary_curves(sigma, prior: float, n_points: int = 256) -> dict[str, BoundaryCurve]:
    """Trace the four boundary families at ``n_points`` equispaced parameters."""
    a = _require_full_rank(sigma)
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    ps = np.linspace(0.0, 1.0, n_points)
    return {
        fam: BoundaryCurve(fam, ps, pairs_along_family(a, prior, fam, ps))
        for fam in X_FAMILIES
    }


# ---------------------------------------------------------------------------
# Reconstruction and membership
# ---------------------------------------------------------------------------


def _composite_from_tau(tau: BeliefDistribution, prior: float) -> np.ndarray:
    """Entrywise composite with row s carrying atom s: b(s|w) = beta(w|s) tau / pi(w)."""
    b = np.empty((tau.beliefs.size, 2))
    b[:, 1] = tau.beliefs * tau.probs / prior
    b[:, 0] = (1.0 - tau.beliefs) * tau.probs / (1.0 - prior)
    return b


def _experiment_if_stochastic(sigma_inv: np.ndarray, b: np.ndarray) -> Optional[np.ndarray]:
    x = sigma_inv @ b
    if x.min() < -TOL or x.max() > 1.0 + TOL:
        return None
    x = np.clip(x, 0.0, 1.0)
    x /= x.sum(axis=0, keepdims=True)
    return x


def reconstruct_experiment(sigma, prior: float, tau: BeliefDistribution) -> np.ndarray:
    """Experiment X with ``induced_tau(sigma @ X, prior) == tau``, if one exists.

    Builds the composite entrywise from the posteriors and inverts the
    garbling; both assignments of signals to atoms are tried since the
    plausibility of a distribution does not depend on signal labels.
    Entries within 1e-9 of [0, 1] are clamped; anything beyond means the
    target lies outside the feasible set.
    """
    a = _require_full_rank(sigma)
    if tau.beliefs.size > 2:
        raise ValueError("two signals support at most two posteriors")
    if prior <= TOL or prior >= 1.0 - TOL:
        if tau.is_degenerate():
            return UNINFORMATIVE_X.copy()
        raise DegeneratePrior(f"prior {prior} cannot spread beliefs")
    if abs(tau.prior - prior) > TOL:
        raise NotSigmaPlausible(f"tau averages to {tau.prior}, prior is {prior}")
    if tau.is_degenerate():
        return UNINFORMATIVE_X.copy()
    inv = np.linalg.inv(a)
    b = _composite_from_tau(tau, prior)
    for rows in (b, b[::-1]):
        x = _experiment_if_stochastic(inv, rows)
        if x is not None:
            return x
    raise NotSigmaPlausible(
        f"support ({tau.beliefs[0]:.6g}, {tau.beliefs[1]:.6g}) is outside the feasible set"
    )


def membership(sigma, prior: float, b1: float, b2: float) -> Optional[np.ndarray]:
    """The inducing experiment for the posterior pair, or None.

    ``b1 <= prior <= b2`` is required; anything else is not Bayes-plausible.
    Zero-weight atoms are allowed (closure semantics), so e.g. (prior, prior)
    is always a member of a full-rank feasible set.
    """
    _require_full_rank(sigma)
    if not (b1 - TOL <= prior <= b2 + TOL):
        return None
    try:
        p1, p2 = bayes_plausible_weights(b1, b2, prior)
    except Exception:
        return None
    if b2 - b1 <= TOL:
        return UNINFORMATIVE_X.copy()
    tau_full = _PairTarget(np.array([b1, b2]), np.array([p1, p2]), prior)
    try:
        return _reconstruct_pair(sigma, prior, tau_full)
    except NotSigmaPlausible:
        return None


@dataclass(frozen=True)
class _PairTarget:
    beliefs: np.ndarray
    probs: np.ndarray
    prior: float


def _reconstruct_pair(sigma, prior, target) -> np.ndarray:
    """Like reconstruct_experiment but tolerates zero-weight atoms."""
    a = _require_full_rank(sigma)
    inv = np.linalg.inv(a)
    b = np.empty((2, 2))
    b[:, 1] = target.beliefs * target.probs / prior
    b[:, 0] = (1.0 - target.beliefs) * target.probs / (1.0 - prior)
    for rows in (b, b[::-1]):
        x = _experiment_if_stochastic(inv, rows)
        if x is not None:
            return x
    raise NotSigmaPlausible("pair outside the feasible set")


def _ordered_experiments(a: np.ndarray, prior: float, q1: np.ndarray, q2: np.ndarray):
    """Shared arithmetic for ordered-pair membership: feasibility mask plus
    the four experiment entries (x11, x12, x21, x22) for each pair."""
    inv = np.linalg.inv(a)
    lo, hi = np.minimum(q1, q2), np.maximum(q1, q2)
    ok_bayes = (lo <= prior + TOL) & (hi >= prior - TOL)
    deg = (hi - lo) <= TOL
    width = np.where(deg, 1.0, q2 - q1)
    w2 = np.minimum(np.maximum((prior - q1) / width, 0.0), 1.0)
    w1 = 1.0 - w2
    b1a = (1.0 - q1) * w1 / (1.0 - prior)
    b1b = q1 * w1 / prior
    b2a = (1.0 - q2) * w2 / (1.0 - prior)
    b2b = q2 * w2 / prior
    cols = []
    feas = np.ones(np.shape(q1), dtype=bool)
    for top, bot in ((b1a, b2a), (b1b, b2b)):  # columns of the composite
        x_top = inv[0, 0] * top + inv[0, 1] * bot
        x_bot = inv[1, 0] * top + inv[1, 1] * bot
        feas &= (x_top >= -TOL) & (x_bot >= -TOL)
        cols.append((x_top, x_bot))
    feas = (feas | (deg & (np.abs(lo - prior) <= TOL))) & ok_bayes
    return feas, deg, cols


def ordered_member_many(sigma, prior: float, q1s, q2s) -> np.ndarray:
    """Vectorized membership of ordered pairs (after signal 1, after signal 2)."""
    a = _require_full_rank(sigma)
    q1 = np.asarray(q1s, dtype=float)
    q2 = np.asarray(q2s, dtype=float)
    feas, _, _ = _ordered_experiments(a, prior, q1, q2)
    return feas


def member_pairs(sigma, prior: float, lows, highs) -> np.ndarray:
    """Vectorized label-free membership for sorted pairs (low <= prior <= high)."""
    lo = np.asarray(lows, dtype=float)
    hi = np.asarray(highs, dtype=float)
    return ordered_member_many(sigma, prior, lo, hi) | ordered_member_many(
        sigma, prior, hi, lo
    )


def ordered_member(sigma, prior: float, q1: float, q2: float) -> Optional[np.ndarray]:
    """Membership of the ordered pair (posterior after signal 1, after signal 2).

    Shares its arithmetic with :func:`ordered_member_many`, so verdicts agree
    bit for bit on boundary points.
    """
    a = _require_full_rank(sigma)
    qa = np.array([float(q1)])
    qb = np.array([float(q2)])
    feas, deg, cols = _ordered_experiments(a, prior, qa, qb)
    if not feas[0]:
        return None
    if deg[0]:
        return UNINFORMATIVE_X.copy()
    x = np.array(
        [[cols[0][0][0], cols[1][0][0]], [cols[0][1][0], cols[1][1][0]]]
    )
    x = np.clip(x, 0.0, 1.0)
    x /= x.sum(axis=0, keepdims=True)
    return x


# ---------------------------------------------------------------------------
# Wing polygons
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FeasibleSet:
    """Two convex wings of ordered posterior pairs, meeting at the origin."""

    garbling: StochasticMatrix
    prior: float
    left: np.ndarray  # natural wing vertices, CCW
    right: np.ndarray  # perverse wing vertices, CCW
    origin: tuple[float, float]


def _convex_hull(points: np.ndarray) -> np.ndarray:
    """Monotone chain; safe on degenerate (collinear or single-point) input."""
    pts = np.unique(np.round(points, 12), axis=0)
    if len(pts) <= 2:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def half(iterable):
        chain: list[np.ndarray] = []
        for q in iterable:
            while len(chain) >= 2:
                u = chain[-1] - chain[-2]
                v = q - chain[-2]
                if u[0] * v[1] - u[1] * v[0] <= 1e-15:
                    chain.pop()
                else:
                    break
            chain.append(q)
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    return hull if len(hull) >= 3 else pts


def polygon_area(vertices: np.ndarray) -> float:
    if len(vertices) < 3:
        return 0.0
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def wing_polygons(sigma, prior: float, n_points: int = 256) -> FeasibleSet:
    """Convex hull per wing of the boundary-curve samples, split at the origin.

    Sampling density doubles until successive hull areas agree to 1e-6.
    """
    a = _require_full_rank(sigma)
    n = max(int(n_points), 2)
    prev_areas = None
    for _ in range(6):
        curves = boundary_curves(a, prior, n)
        samples = np.vstack([c.points for c in curves.values()])
        samples = np.vstack([samples, [[prior, prior]]])
        left = _convex_hull(samples[samples[:, 0] <= prior + TOL])
        right = _convex_hull(samples[samples[:, 0] >= prior - TOL])
        areas = (polygon_area(left), polygon_area(right))
        if prev_areas is not None and max(
            abs(areas[0] - prev_areas[0]), abs(areas[1] - prev_areas[1])
        ) < 1e-6:
            break
        prev_areas = areas
        n *= 2
    return FeasibleSet(
        garbling=validate_stochastic(a),
        prior=prior,
        left=left,
        right=right,
        origin=(prior, prior),
    )


def point_to_polygon_distance(point, vertices: np.ndarray) -> float:
    """Distance from a point to the polygon boundary (edges)."""
    p = np.asarray(point, dtype=float)
    if len(vertices) == 1:
        return float(np.hypot(*(p - vertices[0])))
    v0 = vertices
    v1 = np.roll(vertices, -1, axis=0)
    d = v1 - v0
    denom = np.maximum((d * d).sum(axis=1), 1e-300)
    t = np.clip(((p - v0) * d).sum(axis=1) / denom, 0.0, 1.0)
    proj = v0 + t[:, None] * d
    return float(np.sqrt(((proj - p) ** 2).sum(axis=1)).min())


# ---------------------------------------------------------------------------
# Nesting and symmetry reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NestingReport:
    nested: bool
    violations: list
    witness_failures: list
    n_checked: int


def nesting_report(s1, s2, prior: float, n_samples: int = 1000, seed: int = 0) -> NestingReport:
    """Sample experiments through ``s2`` and test the induced pairs against
    ``F(s1, prior)``; when ``s1`` Blackwell-dominates ``s2`` the constructive
    witness Y = s1^-1 G s1 X is validated as well."""
    a1, a2 = _require_full_rank(s1), _require_full_rank(s2)
    rng = np.random.default_rng(seed)
    xs = rng.uniform(0.0, 1.0, size=(n_samples, 2))
    cmp = blackwell_compare(a1, a2)
    gamma = cmp.to_second if cmp.order in (BlackwellOrder.DOMINATES, BlackwellOrder.EQUIVALENT) else None
    inv1 = np.linalg.inv(a1)
    violations, witness_failures = [], []
    for x, y in xs:
        X = np.array([[x, y], [1.0 - x, 1.0 - y]])
        tau = induced_tau(a2 @ X, prior)
        lo, hi = tau.beliefs[0], tau.beliefs[-1]
        if not member_pairs(a1, prior, [lo], [hi])[0]:
            violations.append({"x": (x, y), "pair": (float(lo), float(hi))})
            continue
        if gamma is not None:
            Y = inv1 @ gamma @ a1 @ X
            if Y.min() < -TOL or abs(Y.sum(axis=0) - 1.0).max() > TOL:
                witness_failures.append({"x": (x, y), "reason": "Y not stochastic"})
                continue
            tau_y = induced_tau(a1 @ np.clip(Y, 0.0, 1.0), prior)
            if not tau_y.allclose(tau, tol=1e-8):
                witness_failures.append({"x": (x, y), "reason": "Y induces different tau"})
    return NestingReport(
        nested=not violations,
        violations=violations,
        witness_failures=witness_failures,
        n_checked=n_samples,
    )


@dataclass(frozen=True, eq=False)
class SymmetryReport:
    symmetric: bool
    witness: Optional[tuple]
    n_checked: int


def symmetry_report(sigma, prior: float, n_samples: int = 1000, seed: int = 0) -> SymmetryReport:
    """Test whether the feasible set contains the swap of each sampled pair."""
    a = _require_full_rank(sigma)
    rng = np.random.default_rng(seed)
    xs = rng.uniform(0.0, 1.0, size=(n_samples, 2))
    for x, y in xs:
        X = np.array([[x, y], [1.0 - x, 1.0 - y]])
        q1, q2 = posterior_pair(a @ X, prior)
        if ordered_member(a, prior, q2, q1) is None:
            return SymmetryReport(False, ((q1, q2)), n_samples)
    return SymmetryReport(True, None, n_samples)


# ---------------------------------------------------------------------------
# General m-signal sampling
# ---------------------------------------------------------------------------


def _simplex_grid(m: int, resolution: float) -> np.ndarray:
    """All points of the m-simplex with coordinates on a 1/k grid."""
    k = max(int(round(1.0 / resolution)), 1)

    def rec(parts_left, total):
        if parts_left == 1:
            yield (total,)
            return
        for v in range(total + 1):
            for rest in rec(parts_left - 1, total - v):
                yield (v,) + rest

    pts = np.array(list(rec(m, k)), dtype=float) / k
    return pts


@dataclass(frozen=True, eq=False)
class BeliefCloud:
    """Induced posterior supports over a grid of experiments."""

    posteriors: np.ndarray  # (N, m); prior where the signal has zero mass
    probs: np.ndarray  # (N, m)
    prior: float

    def attained_beliefs(self, min_prob: float = TOL) -> np.ndarray:
        mask = self.probs > min_prob
        return np.unique(np.round(self.posteriors[mask], 12))

    def min_belief(self, min_prob: float = TOL) -> float:
        return float(self.attained_beliefs(min_prob).min())


def sample_feasible_general(sigma, prior: float, grid_resolution: float = 0.02) -> BeliefCloud:
    """Enumerate m x 2 experiments on a simplex grid and push them through an
    m x m garbling; returns every induced posterior profile."""
    a = _as_array(sigma)
    m = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch("general sampler expects a square garbling")
    cols = _simplex_grid(m, grid_resolution)  # (nc, m) experiment columns
    d = a @ cols.T  # (m, nc): signal distribution per column choice
    nc = cols.shape[0]
    p = (1.0 - prior) * d[:, :, None] + prior * d[:, None, :]  # (m, nc, nc)
    with np.errstate(invalid="ignore", divide="ignore"):
        beta = prior * d[:, None, :] / p
    beta = np.where(p > TOL, beta, prior)
    n = nc * nc
    return BeliefCloud(
        posteriors=np.moveaxis(beta, 0, -1).reshape(n, m),
        probs=np.moveaxis(p, 0, -1).reshape(n, m),
        prior=prior,
    )


def brute_force_pairs(sigma, prior: float, step: float = 0.01) -> np.ndarray:
    """(N, 2) ordered posterior pairs from the full 2x2 experiment grid."""
    a = _as_array(sigma)
    g = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
    xx, yy = np.meshgrid(g, g, indexing="ij")
    x, y = xx.ravel(), yy.ravel()
    b11 = a[0, 0] * x + a[0, 1] * (1 - x)
    b12 = a[0, 0] * y + a[0, 1] * (1 - y)
    b21 = a[1, 0] * x + a[1, 1] * (1 - x)
    b22 = a[1, 0] * y + a[1, 1] * (1 - y)
    p1 = (1 - prior) * b11 + prior * b12
    p2 = (1 - prior) * b21 + prior * b22
    with np.errstate(invalid="ignore", divide="ignore"):
        q1 = np.where(p1 > TOL, prior * b12 / np.where(p1 > 0, p1, 1.0), prior)
        q2 = np.where(p2 > TOL, prior * b22 / np.where(p2 > 0, p2, 1.0), prior)
    return np.column_stack([q1, q2])


# ---------------------------------------------------------------------------
# Feasible slices (used by the best-response solver)
# ---------------------------------------------------------------------------


def companion_slices(
    sigma,
    prior: float,
    fixed_beliefs: list[tuple[float, bool]],
    n_scan: int = 257,
    n_bisect: int = 40,
) -> list[tuple[float, bool, tuple[float, float]]]:
    """Companion-belief ranges pairing feasibly with each fixed belief.

    Input is a list of (belief, is_low) tasks; each result entry is
    ``(fixed, is_low, (companion_lo, companion_hi))``. The slice through a
    fixed belief is an interval within each wing (wings are convex in
    ordered coordinates) but not globally, so each task contributes up to
    two entries, one per signal orientation. All edge refinements run as
    one batched bisection.
    """
    a = _require_full_rank(sigma)
    tasks = []  # (fixed, is_low, orientation_natural)
    for fixed, is_low in fixed_beliefs:
        if is_low and fixed <= prior + TOL:
            tasks.append((float(fixed), True, True))
            tasks.append((float(fixed), True, False))
        elif not is_low and fixed >= prior - TOL:
            tasks.append((float(fixed), False, True))
            tasks.append((float(fixed), False, False))
    if not tasks:
        return []
    grids = np.empty((len(tasks), n_scan))
    q1 = np.empty_like(grids)
    q2 = np.empty_like(grids)
    for t, (fixed, is_low, natural) in enumerate(tasks):
        grid = np.linspace(prior, 1.0, n_scan) if is_low else np.linspace(0.0, prior, n_scan)
        grids[t] = grid
        # natural orientation: signal-1 belief below the prior
        low_first = natural
        fixed_first = low_first == is_low
        q1[t] = fixed if fixed_first else grid
        q2[t] = grid if fixed_first else fixed
    feas = ordered_member_many(a, prior, q1.ravel(), q2.ravel()).reshape(grids.shape)

    # collect bisection edges: (task, inside, outside)
    edges = []
    spans = {}
    for t in range(len(tasks)):
        idx = np.nonzero(feas[t])[0]
        if idx.size == 0:
            continue
        spans[t] = [grids[t, idx[0]], grids[t, idx[-1]]]
        if idx[0] > 0:
            edges.append([t, 0, grids[t, idx[0]], grids[t, idx[0] - 1]])
        if idx[-1] < n_scan - 1:
            edges.append([t, 1, grids[t, idx[-1]], grids[t, idx[-1] + 1]])
    if edges:
        e_task = np.array([e[0] for e in edges])
        inside = np.array([e[2] for e in edges])
        outside = np.array([e[3] for e in edges])
        fixed_v = np.array([tasks[t][0] for t in e_task])
        fixed_first = np.array([tasks[t][2] == tasks[t][1] for t in e_task])
        for _ in range(n_bisect):
            mid = 0.5 * (inside + outside)
            eq1 = np.where(fixed_first, fixed_v, mid)
            eq2 = np.where(fixed_first, mid, fixed_v)
            ok = ordered_member_many(a, prior, eq1, eq2)
            inside = np.where(ok, mid, inside)
            outside = np.where(ok, outside, mid)
        for k, e in enumerate(edges):
            spans[e[0]][e[1]] = inside[k]
    out = []
    for t, (lo, hi) in spans.items():
        fixed, is_low, _ = tasks[t]
        rng = (float(min(lo, hi)), float(max(lo, hi)))
        out.append((fixed, is_low, rng))
    return out


def companion_intervals(
    sigma,
    prior: float,
    fixed: float,
    fixed_is_low: bool,
    n_scan: int = 257,
    n_bisect: int = 40,
) -> list[tuple[float, float]]:
    """Companion ranges for one fixed belief; see :func:`companion_slices`."""
    slices = companion_slices(sigma, prior, [(fixed, fixed_is_low)], n_scan, n_bisect)
    return [rng for _, _, rng in slices]
