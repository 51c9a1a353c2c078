"""Behavior boxes: conditional distributions p(x, y | a, b) with binary outcomes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ATOL = 1e-9


@dataclass(frozen=True)
class Check:
    """Outcome of a predicate together with the worst deviation seen.

    Truthiness follows ``passed`` so a check can be used directly in ``if``.
    """

    passed: bool
    deviation: float = 0.0
    note: str = ""

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True, eq=False)
class BehaviorBox:
    """Probability table indexed ``p[a, b, x, y]``."""

    p: np.ndarray
    atol: float = field(default=ATOL, repr=False)

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 4 or p.shape[2:] != (2, 2) or p.shape[0] < 1 or p.shape[1] < 1:
            raise ValueError(f"box table must have shape (n_a, n_b, 2, 2), got {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValueError("box table contains non-finite entries")
        if p.min() < -self.atol or p.max() > 1.0 + self.atol:
            raise ValueError("box entries must lie in [0, 1]")
        sums = p.sum(axis=(2, 3))
        worst = float(np.max(np.abs(sums - 1.0)))
        if worst > self.atol:
            raise ValueError(f"box is not normalized (max deviation {worst:.3e})")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def n_a(self) -> int:
        return self.p.shape[0]

    @property
    def n_b(self) -> int:
        return self.p.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_a, self.n_b

    def alice_marginals(self) -> np.ndarray:
        """``m[a, b, x]``, Alice's outcome distribution per setting pair."""
        return self.p.sum(axis=3)

    def bob_marginals(self) -> np.ndarray:
        """``m[a, b, y]``."""
        return self.p.sum(axis=2)

    def alice_marginal(self) -> np.ndarray:
        """``m[a, x]`` averaged over Bob's settings (exact for no-signalling boxes)."""
        return self.alice_marginals().mean(axis=1)

    def bob_marginal(self) -> np.ndarray:
        return self.bob_marginals().mean(axis=0)

    def alice_asymmetry(self) -> np.ndarray:
        """|p(0|a) - p(1|a)| for every Alice setting."""
        m = self.alice_marginal()
        return np.abs(m[:, 0] - m[:, 1])

    def is_deterministic(self, atol: float = ATOL) -> bool:
        return bool(np.all(np.minimum(np.abs(self.p), np.abs(self.p - 1.0)) <= atol))

    def relabel_alice(self, a_index: int) -> "BehaviorBox":
        """Swap Alice's outcome labels for one setting."""
        p = self.p.copy()
        p[a_index] = p[a_index, :, ::-1, :]
        return BehaviorBox(p, self.atol)

    def relabel_bob(self, b_index: int) -> "BehaviorBox":
        p = self.p.copy()
        p[:, b_index] = p[:, b_index, :, ::-1]
        return BehaviorBox(p, self.atol)


def mix(weights, boxes) -> BehaviorBox:
    """Convex combination of boxes sharing a shape."""
    weights = np.asarray(weights, dtype=float)
    tables = np.stack([b.p for b in boxes])
    return BehaviorBox(np.tensordot(weights, tables, axes=1))


def from_correlators(alice_bias, bob_bias, correlators) -> BehaviorBox:
    """Build ``p = (1 + (-1)^x A_a + (-1)^y B_b + (-1)^(x+y) C_ab) / 4``.

    Every no-signalling box with binary outcomes has this form; positivity
    holds iff ``-1 + |A+B| <= C <= 1 - |A-B|`` for each pair.
    """
    A = np.asarray(alice_bias, dtype=float)
    B = np.asarray(bob_bias, dtype=float)
    C = np.asarray(correlators, dtype=float)
    sx = np.array([1.0, -1.0])
    p = 0.25 * (
        1.0
        + A[:, None, None, None] * sx[None, None, :, None]
        + B[None, :, None, None] * sx[None, None, None, :]
        + C[:, :, None, None] * (sx[:, None] * sx[None, :])[None, None]
    )
    return BehaviorBox(np.clip(p, 0.0, 1.0))


def correlator_bounds(alice_bias, bob_bias) -> tuple[np.ndarray, np.ndarray]:
    A = np.asarray(alice_bias, dtype=float)[:, None]
    B = np.asarray(bob_bias, dtype=float)[None, :]
    return -1.0 + np.abs(A + B), 1.0 - np.abs(A - B)


def random_no_signalling_box(n_a: int, n_b: int, rng: np.random.Generator, extremal: float = 0.3) -> BehaviorBox:
    """Sample a no-signalling box directly in correlator coordinates.

    Each correlator is drawn uniformly from its positivity interval, or pinned
    to one of the interval's ends with probability ``extremal`` so that
    boundary boxes are well represented.
    """
    A = rng.uniform(-1.0, 1.0, n_a)
    B = rng.uniform(-1.0, 1.0, n_b)
    # occasionally make marginals deterministic, where the bound is tight
    A[rng.random(n_a) < extremal / 3] = rng.choice([-1.0, 1.0])
    lo, hi = correlator_bounds(A, B)
    u = rng.random((n_a, n_b))
    pin = rng.random((n_a, n_b))
    u = np.where(pin < extremal / 2, 0.0, np.where(pin < extremal, 1.0, u))
    return from_correlators(A, B, lo + u * (hi - lo))


def pr_box() -> BehaviorBox:
    """p(x, y | a, b) = 1/2 [x xor y = a b] on two settings per side."""
    p = np.zeros((2, 2, 2, 2))
    for a in range(2):
        for b in range(2):
            for x in range(2):
                for y in range(2):
                    if (x ^ y) == (a & b):
                        p[a, b, x, y] = 0.5
    return BehaviorBox(p)


def deterministic_box(alice_outcomes, bob_outcomes) -> BehaviorBox:
    """Local deterministic box: x = f(a), y = g(b)."""
    f = list(alice_outcomes)
    g = list(bob_outcomes)
    p = np.zeros((len(f), len(g), 2, 2))
    for a, x in enumerate(f):
        for b, y in enumerate(g):
            p[a, b, x, y] = 1.0
    return BehaviorBox(p)
