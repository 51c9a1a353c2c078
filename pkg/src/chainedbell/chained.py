"""Chained Bell measure I_N.

The chain visits Alice's and Bob's settings alternately::

    (A1, B1), (B1, A2), (A2, B2), ..., (AN, BN), (BN, A1)

Every link contributes the probability that the two outcomes differ, except
the closing link (BN, A1), which contributes the probability that they agree.
Local deterministic models cannot push the sum below 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import minimize

from .boxes import BehaviorBox
from .quantum import EntangledPairState, born_table, joint_table, normalize_angle

MAX_ENUMERATION_N = 12

ClosedFormVariant = Literal["corrected", "printed"]


@dataclass(frozen=True)
class ScenarioSettings:
    alice_angles: tuple[float, ...]
    bob_angles: tuple[float, ...]

    def __post_init__(self):
        alice = tuple(normalize_angle(t) for t in self.alice_angles)
        bob = tuple(normalize_angle(t) for t in self.bob_angles)
        if len(alice) < 2 or len(alice) != len(bob):
            raise ValueError(
                f"need equal numbers (>= 2) of Alice and Bob settings, got {len(alice)} and {len(bob)}"
            )
        object.__setattr__(self, "alice_angles", alice)
        object.__setattr__(self, "bob_angles", bob)

    @property
    def n(self) -> int:
        return len(self.alice_angles)


@dataclass(frozen=True)
class ChainLink:
    a_index: int
    b_index: int
    equal: bool  # True only for the closing link


@dataclass(frozen=True)
class ChainedBellReport:
    n: int
    terms: tuple[float, ...]
    value: float
    quantum_upper_bound: float
    local_lower_bound: float = 1.0
    links: tuple[ChainLink, ...] = field(default=(), repr=False)


def chain_links(n: int) -> list[ChainLink]:
    """Links in chain order, with 0-based setting indices."""
    if n < 2:
        raise ValueError("chain needs n >= 2")
    links = []
    for k in range(n):
        links.append(ChainLink(k, k, False))
        if k + 1 < n:
            links.append(ChainLink(k + 1, k, False))
    links.append(ChainLink(0, n - 1, True))
    return links


def _check_indices(box: BehaviorBox, a_index: int, b_index: int):
    if not (0 <= a_index < box.n_a and 0 <= b_index < box.n_b):
        raise IndexError(f"setting pair ({a_index}, {b_index}) outside a {box.n_a}x{box.n_b} scenario")


def term_unequal(box: BehaviorBox, a_index: int, b_index: int) -> float:
    """Probability that Alice's and Bob's outcomes differ, <|x - y|>."""
    _check_indices(box, a_index, b_index)
    t = box.p[a_index, b_index]
    return float(t[0, 1] + t[1, 0])


def term_equal_last(box: BehaviorBox, a_index: int = 0, b_index: int | None = None) -> float:
    """Probability that the outcomes agree, <|x - y - 1|>; the closing link."""
    if b_index is None:
        b_index = box.n_b - 1
    _check_indices(box, a_index, b_index)
    t = box.p[a_index, b_index]
    return float(t[0, 0] + t[1, 1])


def chain_terms(box: BehaviorBox) -> list[float]:
    if box.n_a != box.n_b:
        raise ValueError("chained measure needs as many Alice settings as Bob settings")
    return [
        term_equal_last(box, l.a_index, l.b_index) if l.equal else term_unequal(box, l.a_index, l.b_index)
        for l in chain_links(box.n_a)
    ]


def chained_value(box: BehaviorBox) -> float:
    """I_N of an arbitrary square box."""
    return float(sum(chain_terms(box)))


def equally_spaced_value(n: int) -> float:
    """2N sin^2(pi / 4N): I_N of the maximally entangled state on equally spaced settings."""
    return 2.0 * n * math.sin(math.pi / (4.0 * n)) ** 2


def small_angle_bound(n: int) -> float:
    """pi^2 / 8N, the sin t <= t relaxation of :func:`equally_spaced_value`."""
    return math.pi**2 / (8.0 * n)


def _report(n: int, terms: Sequence[float]) -> ChainedBellReport:
    return ChainedBellReport(
        n=n,
        terms=tuple(float(t) for t in terms),
        value=float(math.fsum(terms)),
        quantum_upper_bound=equally_spaced_value(n),
        links=tuple(chain_links(n)),
    )


def chained_value_trace(state: EntangledPairState, settings: ScenarioSettings) -> ChainedBellReport:
    """I_N by direct trace evaluation of every link."""
    terms = []
    for link in chain_links(settings.n):
        t = joint_table(state, settings.alice_angles[link.a_index], settings.bob_angles[link.b_index])
        terms.append(t[0, 0] + t[1, 1] if link.equal else t[0, 1] + t[1, 0])
    return _report(settings.n, terms)


def quantum_box(state: EntangledPairState, settings: ScenarioSettings) -> BehaviorBox:
    return BehaviorBox(born_table(state, settings.alice_angles, settings.bob_angles))


def chained_value_closed_form(
    state: EntangledPairState,
    settings: ScenarioSettings,
    variant: ClosedFormVariant = "corrected",
) -> float:
    """Trigonometric closed form of I_N.

    ``sum_n sin^2((t_n - t'_n)/2) + sin^2((t'_n - t_{n+1})/2)
      - (alpha beta - 1/2) sum_n (sin t_n sin t'_n + sin t'_n sin t_{n+1})``

    The wrapped angle ``t_{N+1}`` decides correctness. Flipping Alice's
    outcome is the same as rotating her axis by pi, so the ``"corrected"``
    variant uses ``t_{N+1} = t_1 + pi``. The ``"printed"`` variant wraps
    the index literally (``t_{N+1} = t_1``), which turns the closing
    agree-probability into a disagree-probability and disagrees with the trace.
    """
    t = np.asarray(settings.alice_angles, dtype=float)
    tp = np.asarray(settings.bob_angles, dtype=float)
    if variant == "corrected":
        nxt = np.append(t[1:], t[0] + np.pi)
    elif variant == "printed":
        nxt = np.append(t[1:], t[0])
    else:
        raise ValueError(f"unknown closed-form variant {variant!r}")
    coeff = state.alpha * state.beta - 0.5
    first = np.sin((t - tp) / 2) ** 2 + np.sin((tp - nxt) / 2) ** 2
    second = np.sin(t) * np.sin(tp) + np.sin(tp) * np.sin(nxt)
    return float(first.sum() - coeff * second.sum())


@dataclass(frozen=True)
class ClosedFormDiscrepancy:
    trace: float
    printed: float
    corrected: float

    @property
    def printed_error(self) -> float:
        return abs(self.printed - self.trace)

    @property
    def corrected_error(self) -> float:
        return abs(self.corrected - self.trace)

    def summary(self) -> str:
        return (
            f"trace={self.trace:.17g} printed={self.printed:.17g} (|err|={self.printed_error:.3e}) "
            f"corrected={self.corrected:.17g} (|err|={self.corrected_error:.3e}); "
            "the literal wrap t_{N+1}=t_1 misses the outcome flip on the closing link, "
            "t_{N+1}=t_1+pi restores it"
        )


def closed_form_discrepancy(state: EntangledPairState, settings: ScenarioSettings) -> ClosedFormDiscrepancy:
    return ClosedFormDiscrepancy(
        trace=chained_value_trace(state, settings).value,
        printed=chained_value_closed_form(state, settings, "printed"),
        corrected=chained_value_closed_form(state, settings, "corrected"),
    )


def equally_spaced_settings(n: int) -> ScenarioSettings:
    """Alice at pi(k-1)/N, Bob at pi(l-1/2)/N, for k, l = 1..N."""
    if int(n) != n or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    n = int(n)
    k = np.arange(n)
    return ScenarioSettings(tuple(np.pi * k / n), tuple(np.pi * (k + 0.5) / n))


def settings_for_epsilon(epsilon: float) -> tuple[int, ScenarioSettings]:
    """Pick N = ceil(pi^2 / 4 eps) (at least 2) so that I_N <= pi^2/8N <= eps/2."""
    if not epsilon > 0 or not math.isfinite(epsilon):
        raise ValueError(f"epsilon must be a positive number, got {epsilon!r}")
    n = max(2, math.ceil(math.pi**2 / (4.0 * epsilon)))
    return n, equally_spaced_settings(n)


def _bits(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    return ((idx[:, None] >> np.arange(n)[None, :]) & 1).astype(np.int8)


def local_deterministic_minimum(n: int) -> int:
    """Brute-force min of I_N over all local deterministic strategies.

    Alice's outcome is a function of her setting only, likewise Bob's;
    all 2^(2n) pairs of functions are enumerated.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if n > MAX_ENUMERATION_N:
        raise ValueError(f"n={n} exceeds the enumeration budget (n <= {MAX_ENUMERATION_N})")
    f = _bits(n)  # f[i, k]: Alice's outcome at setting k under strategy i
    g = _bits(n)
    best = None
    # chunk over Alice strategies to bound memory at n = 12
    step = max(1, 2**20 // (2**n))
    for start in range(0, f.shape[0], step):
        fa = f[start : start + step, None, :]
        gb = g[None, :, :]
        total = (fa != gb).sum(axis=2, dtype=np.int32)
        total += (fa[:, :, 1:] != gb[:, :, :-1]).sum(axis=2, dtype=np.int32)
        total += fa[:, :, 0] == gb[:, :, -1]
        m = int(total.min())
        best = m if best is None else min(best, m)
    return best


def minimize_chained_value(
    state: EntangledPairState,
    n: int,
    starts: int = 20,
    seed: int = 0,
) -> tuple[float, ScenarioSettings]:
    """Multi-start numerical minimum of the trace-evaluated I_N over all 2N angles."""
    rng = np.random.default_rng(seed)

    def objective(v):
        s = ScenarioSettings(tuple(v[:n]), tuple(v[n:]))
        return chained_value_trace(state, s).value

    best_val, best_x = np.inf, None
    for _ in range(starts):
        x0 = rng.uniform(0.0, 2 * np.pi, 2 * n)
        res = minimize(objective, x0, method="BFGS", options={"gtol": 1e-10})
        if res.fun < best_val:
            best_val, best_x = float(res.fun), res.x
    return best_val, ScenarioSettings(tuple(best_x[:n]), tuple(best_x[n:]))
