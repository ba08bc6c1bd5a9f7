"""Stochastic-matrix information structures and belief algebra.

Conventions used throughout the library:

* Information structures are column-stochastic matrices: entry ``(i, j)``
  is the probability of realization ``i`` conditional on state (or
  upstream realization) ``j``.
* Two-state objects order their columns (state 1, state 2 = target) and a
  belief is the posterior probability of the target state.
* All algebraic identities are checked to ``TOL = 1e-9``; the worked
  inputs are exact rationals, so double precision leaves a wide margin.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .errors import (
    BarycenterMismatch,
    ColumnSumMismatch,
    DimensionMismatch,
    NegativeEntry,
    PriorOutsideSupport,
    TooFewRealizations,
    ZeroProbabilitySignal,
)

TOL = 1e-9


def _as_array(matrix) -> np.ndarray:
    if isinstance(matrix, StochasticMatrix):
        return matrix.a
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {a.shape}")
    return a


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """A validated column-stochastic matrix with m >= n.

    Entries within ``TOL`` of [0, 1] are clipped on construction; anything
    beyond raises.
    """

    a: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.ndim != 2:
            raise DimensionMismatch(f"expected a 2-d matrix, got shape {a.shape}")
        worst = a.min()
        if worst < -TOL:
            i, j = np.unravel_index(int(a.argmin()), a.shape)
            raise NegativeEntry(int(i), int(j), float(worst))
        sums = a.sum(axis=0)
        dev = sums - 1.0
        j = int(np.abs(dev).argmax())
        if abs(dev[j]) > TOL:
            raise ColumnSumMismatch(j, float(dev[j]))
        if a.shape[0] < a.shape[1]:
            raise TooFewRealizations(
                f"{a.shape[0]} realizations for {a.shape[1]} states"
            )
        a = np.clip(a, 0.0, 1.0)
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def n(self) -> int:
        return self.a.shape[1]

    @classmethod
    def identity(cls, n: int = 2) -> "StochasticMatrix":
        return cls(np.eye(n))

    @classmethod
    def uninformative(cls, m: int = 2, n: int = 2) -> "StochasticMatrix":
        return cls(np.full((m, n), 1.0 / m))

    def allclose(self, other, tol: float = TOL) -> bool:
        b = _as_array(other)
        return self.a.shape == b.shape and bool(np.abs(self.a - b).max() <= tol)

    def __repr__(self):
        rows = "; ".join(",".join(f"{v:.6g}" for v in row) for row in self.a)
        return f"StochasticMatrix([{rows}])"


def validate_stochastic(raw) -> StochasticMatrix:
    """Validate a raw matrix as a column-stochastic information structure."""
    if isinstance(raw, StochasticMatrix):
        return raw
    return StochasticMatrix(np.array(raw, dtype=float))


def compose(sigma, x) -> StochasticMatrix:
    """Composite structure ``sigma @ x`` (signal after experiment)."""
    s, e = _as_array(sigma), _as_array(x)
    if s.shape[1] != e.shape[0]:
        raise DimensionMismatch(f"cannot compose {s.shape} with {e.shape}")
    return StochasticMatrix(s @ e)


def _signal_probabilities(b: np.ndarray, prior: float) -> np.ndarray:
    return (1.0 - prior) * b[:, 0] + prior * b[:, 1]


def posterior_after_signal(b, prior: float, signal: int) -> float:
    """Bayes posterior of the target state after observing ``signal`` (0-based)."""
    a = _as_array(b)
    if a.shape[1] != 2:
        raise DimensionMismatch("posteriors need a two-state structure")
    if not 0.0 <= prior <= 1.0:
        raise ValueError(f"prior {prior} outside [0, 1]")
    if not 0 <= signal < a.shape[0]:
        raise IndexError(f"signal {signal} out of range for {a.shape[0]} rows")
    p = _signal_probabilities(a, prior)[signal]
    if p <= TOL:
        raise ZeroProbabilitySignal(f"signal {signal} has probability {p:.3g}")
    return float(prior * a[signal, 1] / p)


@dataclass(frozen=True, eq=False)
class BeliefDistribution:
    """Finite distribution of posterior beliefs, sorted, averaging to the prior."""

    beliefs: np.ndarray
    probs: np.ndarray
    prior: float

    def __post_init__(self):
        beliefs = np.atleast_1d(np.asarray(self.beliefs, dtype=float))
        probs = np.atleast_1d(np.asarray(self.probs, dtype=float))
        if beliefs.shape != probs.shape or beliefs.ndim != 1 or beliefs.size == 0:
            raise ValueError("beliefs and probs must be equal-length 1-d arrays")
        if probs.min() < -TOL:
            raise ValueError(f"negative probability {probs.min():.3g}")
        if abs(probs.sum() - 1.0) > TOL:
            raise ValueError(f"probabilities sum to {probs.sum():.12g}")
        if beliefs.min() < -TOL or beliefs.max() > 1.0 + TOL:
            raise ValueError("beliefs outside [0, 1]")
        if np.any(np.diff(beliefs) <= TOL):
            raise ValueError("beliefs must be strictly increasing; merge duplicates")
        bary = float(beliefs @ probs)
        if abs(bary - self.prior) > TOL:
            raise BarycenterMismatch(
                f"barycenter {bary:.12g} != prior {self.prior:.12g}"
            )
        beliefs = np.clip(beliefs, 0.0, 1.0)
        probs = np.clip(probs, 0.0, 1.0)
        beliefs.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "beliefs", beliefs)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_atoms(cls, atoms, prior: Optional[float] = None) -> "BeliefDistribution":
        """Build from (belief, prob) pairs; sorts, drops zero-probability atoms
        and merges beliefs closer than ``TOL``."""
        atoms = [(float(b), float(p)) for b, p in atoms]
        atoms = [(b, p) for b, p in atoms if p > TOL]
        if not atoms:
            raise ValueError("no atoms with positive probability")
        atoms.sort()
        merged: list[list[float]] = []
        for b, p in atoms:
            if merged and abs(b - merged[-1][0]) <= TOL:
                q = merged[-1][1] + p
                merged[-1][0] = (merged[-1][0] * merged[-1][1] + b * p) / q
                merged[-1][1] = q
            else:
                merged.append([b, p])
        beliefs = np.array([b for b, _ in merged])
        probs = np.array([p for _, p in merged])
        if prior is None:
            prior = float(beliefs @ probs)
        return cls(beliefs, probs, float(prior))

    @property
    def atoms(self):
        return list(zip(self.beliefs.tolist(), self.probs.tolist()))

    @property
    def support(self) -> np.ndarray:
        return self.beliefs

    def is_degenerate(self, tol: float = TOL) -> bool:
        return self.beliefs.size == 1

    def allclose(self, other: "BeliefDistribution", tol: float = TOL) -> bool:
        return (
            self.beliefs.size == other.beliefs.size
            and bool(np.abs(self.beliefs - other.beliefs).max() <= tol)
            and bool(np.abs(self.probs - other.probs).max() <= tol)
        )

    def __repr__(self):
        inner = ", ".join(
            f"({b:.6g}, {p:.6g})" for b, p in zip(self.beliefs, self.probs)
        )
        return f"BeliefDistribution([{inner}], prior={self.prior:.6g})"


def induced_tau(b, prior: float) -> BeliefDistribution:
    """Distribution of posteriors induced by a two-state structure.

    Zero-probability signals are dropped; coincident posteriors merge.
    """
    a = _as_array(b)
    if a.shape[1] != 2:
        raise DimensionMismatch("posteriors need a two-state structure")
    p = _signal_probabilities(a, prior)
    keep = p > TOL
    if not keep.any():  # only possible through float dust; the prior is certain
        return BeliefDistribution.from_atoms([(prior, 1.0)], prior)
    beliefs = prior * a[keep, 1] / p[keep]
    return BeliefDistribution.from_atoms(zip(beliefs, p[keep]), prior)


def bayes_plausible_weights(b1: float, b2: float, prior: float) -> tuple[float, float]:
    """Unique probabilities (p1, p2) with p1*b1 + p2*b2 = prior.

    Degenerate support b1 = b2 = prior returns (1/2, 1/2) by convention.
    """
    if not (b1 - TOL <= prior <= b2 + TOL) or b1 > b2 + TOL:
        raise PriorOutsideSupport(f"need b1 <= prior <= b2, got ({b1}, {prior}, {b2})")
    if b2 - b1 <= TOL:
        return 0.5, 0.5
    p1 = (b2 - prior) / (b2 - b1)
    p1 = min(max(p1, 0.0), 1.0)
    return p1, 1.0 - p1


# ---------------------------------------------------------------------------
# Mean-preserving spreads
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MpsResult:
    """Outcome of a mean-preserving-spread test, with the transition witness."""

    is_spread: bool
    witness: Optional[np.ndarray] = None  # rows: spread atoms, cols: contracted atoms

    def __bool__(self):
        return self.is_spread


def _validate_mps_witness(T, spread, contracted, tol=TOL) -> bool:
    if T.min() < -tol or abs(T.sum(axis=0) - 1.0).max() > tol:
        return False
    transport = T @ contracted.probs - spread.probs
    means = spread.beliefs @ T - contracted.beliefs
    return abs(transport).max() <= tol and abs(means).max() <= tol


def _mps_two_point(spread, contracted):
    a, f = spread.beliefs, spread.probs
    b, g = contracted.beliefs, contracted.probs
    if a.size == 1:
        # a single spread atom can only dominate itself
        if b.size == 1 and abs(a[0] - b[0]) <= TOL:
            return MpsResult(True, np.ones((1, 1)))
        return MpsResult(False)
    lo, hi = a[0], a[-1]
    if b[0] < lo - TOL or b[-1] > hi + TOL:
        return MpsResult(False)
    # column j splits contracted atom j across the two spread atoms, keeping its mean
    t = (hi - b) / (hi - lo)
    t = np.clip(t, 0.0, 1.0)
    T = np.vstack([t, 1.0 - t])
    return MpsResult(True, T)


def _mps_linear_program(spread, contracted):
    nf, ng = spread.beliefs.size, contracted.beliefs.size
    nvar = nf * ng

    def cell(i, j):
        return i * ng + j

    rows, rhs = [], []
    for i in range(nf):  # transport: sum_j T[i,j] g_j = f_i
        r = np.zeros(nvar)
        for j in range(ng):
            r[cell(i, j)] = contracted.probs[j]
        rows.append(r)
        rhs.append(spread.probs[i])
    for j in range(ng):  # column stochasticity
        r = np.zeros(nvar)
        for i in range(nf):
            r[cell(i, j)] = 1.0
        rows.append(r)
        rhs.append(1.0)
    for j in range(ng):  # column means preserved
        r = np.zeros(nvar)
        for i in range(nf):
            r[cell(i, j)] = spread.beliefs[i]
        rows.append(r)
        rhs.append(contracted.beliefs[j])
    A = np.array(rows)
    res = linprog(
        c=np.zeros(nvar), A_eq=A, b_eq=np.array(rhs), bounds=(0, 1), method="highs"
    )
    if not res.success:
        return MpsResult(False)
    T = res.x.reshape(nf, ng)
    # polish on the LP support so the witness meets the 1e-9 contract exactly
    mask = res.x > 1e-12
    if mask.any():
        sub, *_ = np.linalg.lstsq(A[:, mask], np.array(rhs), rcond=None)
        cand = np.zeros(nvar)
        cand[mask] = sub
        if cand.min() > -1e-12:
            cand = np.clip(cand, 0.0, 1.0)
            Tc = cand.reshape(nf, ng)
            if _validate_mps_witness(Tc, spread, contracted):
                return MpsResult(True, Tc)
    if _validate_mps_witness(T, spread, contracted, tol=1e-7):
        return MpsResult(True, T)
    return MpsResult(False)


def is_mps(tau_spread: BeliefDistribution, tau_contracted: BeliefDistribution) -> MpsResult:
    """Test whether ``tau_spread`` is a mean-preserving spread of ``tau_contracted``.

    Two-point supports use the exact interval-containment criterion; larger
    supports are decided by a linear feasibility problem. A valid transition
    witness (columns spread each contracted atom while keeping its mean)
    accompanies every positive answer.
    """
    if abs(tau_spread.prior - tau_contracted.prior) > TOL:
        raise BarycenterMismatch(
            f"priors differ: {tau_spread.prior} vs {tau_contracted.prior}"
        )
    if tau_spread.beliefs.size <= 2 and tau_contracted.beliefs.size <= 2:
        res = _mps_two_point(tau_spread, tau_contracted)
    else:
        res = _mps_linear_program(tau_spread, tau_contracted)
    if res.is_spread and not _validate_mps_witness(
        res.witness, tau_spread, tau_contracted, tol=1e-7
    ):
        raise AssertionError("internal: MPS witness failed validation")
    return res


# ---------------------------------------------------------------------------
# Blackwell ordering
# ---------------------------------------------------------------------------


class BlackwellOrder(enum.Enum):
    DOMINATES = "dominates"
    DOMINATED_BY = "dominated"
    EQUIVALENT = "equivalent"
    UNRANKED = "unranked"


@dataclass(frozen=True)
class BlackwellResult:
    order: BlackwellOrder
    to_second: Optional[np.ndarray] = None  # G with G @ s1 = s2
    to_first: Optional[np.ndarray] = None  # G with G @ s2 = s1


def _garbling_closed_form(a: np.ndarray, b: np.ndarray, tol=TOL) -> Optional[np.ndarray]:
    """For square invertible ``a``: the unique G with G a = b, if stochastic."""
    det = np.linalg.det(a)
    if abs(det) < 1e-12:
        return None
    G = b @ np.linalg.inv(a)
    if G.min() < -tol:
        return None
    G = np.clip(G, 0.0, 1.0)
    G /= G.sum(axis=0, keepdims=True)
    return G


def _garbling_lp(a: np.ndarray, b: np.ndarray, tol=TOL) -> Optional[np.ndarray]:
    ma, n = a.shape
    mb = b.shape[0]
    nvar = mb * ma

    def cell(i, k):
        return i * ma + k

    rows, rhs = [], []
    for i in range(mb):  # (G a)[i, j] = b[i, j]
        for j in range(n):
            r = np.zeros(nvar)
            for k in range(ma):
                r[cell(i, k)] = a[k, j]
            rows.append(r)
            rhs.append(b[i, j])
    for k in range(ma):  # columns of G sum to one
        r = np.zeros(nvar)
        for i in range(mb):
            r[cell(i, k)] = 1.0
        rows.append(r)
        rhs.append(1.0)
    A = np.array(rows)
    res = linprog(
        c=np.zeros(nvar), A_eq=A, b_eq=np.array(rhs), bounds=(0, 1), method="highs"
    )
    if not res.success:
        return None
    mask = res.x > 1e-12
    G = None
    if mask.any():
        sub, *_ = np.linalg.lstsq(A[:, mask], np.array(rhs), rcond=None)
        cand = np.zeros(nvar)
        cand[mask] = sub
        if cand.min() > -1e-12:
            G = np.clip(cand, 0.0, 1.0).reshape(mb, ma)
    if G is None:
        G = res.x.reshape(mb, ma)
    if abs(G @ a - b).max() > 1e-7 or abs(G.sum(axis=0) - 1.0).max() > 1e-7:
        return None
    return G


def _find_garbling(a: np.ndarray, b: np.ndarray) -> Optional[np.ndarray]:
    if a.shape[0] == a.shape[1]:
        G = _garbling_closed_form(a, b)
        if G is not None:
            return G
        if abs(np.linalg.det(a)) >= 1e-12:
            return None  # unique candidate was not stochastic
    return _garbling_lp(a, b)


def blackwell_compare(s1, s2) -> BlackwellResult:
    """Blackwell-rank two structures over the same conditioning space.

    ``DOMINATES`` means a column-stochastic G with ``G s1 = s2`` exists; the
    witness(es) are attached. Square invertible cases use the closed form
    ``G = s2 s1^-1``, everything else a linear feasibility problem.
    """
    a, b = _as_array(s1), _as_array(s2)
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch("structures condition on different spaces")
    fwd = _find_garbling(a, b)
    rev = _find_garbling(b, a)
    if fwd is not None and rev is not None:
        order = BlackwellOrder.EQUIVALENT
    elif fwd is not None:
        order = BlackwellOrder.DOMINATES
    elif rev is not None:
        order = BlackwellOrder.DOMINATED_BY
    else:
        order = BlackwellOrder.UNRANKED
    return BlackwellResult(order, to_second=fwd, to_first=rev)


@dataclass(frozen=True)
class GarblingRank:
    full_rank: bool
    rank: int


def garbling_rank(s) -> GarblingRank:
    """Numerical rank report; 2x2 matrices are deficient iff columns coincide."""
    a = _as_array(s)
    if a.shape == (2, 2):
        if abs(a[:, 0] - a[:, 1]).max() <= TOL:
            return GarblingRank(False, 1)
        return GarblingRank(True, 2)
    r = int(np.linalg.matrix_rank(a, tol=TOL))
    return GarblingRank(r == min(a.shape), r)
