"""Largest predictive advantage compatible with no-signalling and the Born rule.

Variables are ``q[z, a, b, x, y] = mu(z) p(x, y | a, b, z)``, which makes the
weights-times-boxes product linear. A decomposition is feasible when

* ``sum_z q[z] = p_Born``                        (it averages to the Born rule)
* ``sum_xy q[z, a, b] = mu(z)`` for every (a, b)  (each box is normalized)
* the marginals of ``q[z]`` ignore the remote setting (no-signalling)

and it has advantage ``t`` at Alice's setting ``a*`` under the sign pattern
``s`` when, for every atom,

    s_z (q[z](x=0 | a*) - q[z](x=1 | a*)) >= t mu(z).

The last constraint is bilinear in ``(t, q)``. For a fixed ``t`` it is
linear, and the feasible set shrinks as ``t`` grows, so ``t`` is raised by
a Dinkelbach-style iteration. Each step solves a max-margin LP at the
current level and jumps to the advantage the solution actually attains.

Atoms are interchangeable, so a sign pattern is described by how many atoms
favour outcome 0. Merging atoms that share a sign keeps every constraint, and
splitting one atom into equal parts does too. Any pattern with both signs
present is therefore equivalent to the two-atom program (``reduce=True``),
whose solution is then split back to ``z_count`` atoms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .boxes import BehaviorBox
from .chained import ScenarioSettings, chained_value_trace
from .decomposition import DecompositionModel
from .quantum import EntangledPairState, born_table

LP_TOL = 1e-7
_MAX_LEVEL_STEPS = 200


class SolverError(RuntimeError):
    def __init__(self, message: str, residuals: dict | None = None):
        super().__init__(message)
        self.residuals = residuals or {}


@dataclass(frozen=True)
class AdvantageLPResult:
    t_star: float
    a_star: int
    signs: tuple[int, ...]
    model: DecompositionModel | None
    quantum_bound: float  # I_N of the Born box on this scenario
    residuals: dict = field(default_factory=dict)
    per_setting: tuple[float, ...] = ()
    lp_solves: int = 0

    def excluded(self, epsilon: float) -> bool:
        return self.t_star < epsilon

    def verdict(self, epsilon: float) -> str:
        return "ADVANTAGE-EXCLUDED" if self.excluded(epsilon) else "ADVANTAGE-FEASIBLE"

    @property
    def certificate(self) -> str:
        if self.t_star <= LP_TOL:
            return "every decomposition has an atom with no advantage at any setting"
        return f"advantage {self.t_star:.9g} at a*={self.a_star}, signs {self.signs}"


class DecompositionProgram:
    """Constraint data for a fixed (state, scenario, z_count)."""

    def __init__(self, target: np.ndarray, z_count: int):
        if z_count < 1:
            raise ValueError("z_count must be >= 1")
        self.target = np.asarray(target, dtype=float)
        self.n_a, self.n_b = self.target.shape[:2]
        self.z_count = z_count
        self.block = self.n_a * self.n_b * 4
        self.n_q = z_count * self.block
        self.A_eq, self.b_eq = self._equalities()

    def idx(self, z, a, b, x, y) -> int:
        return (((z * self.n_a + a) * self.n_b + b) * 2 + x) * 2 + y

    def _equalities(self):
        rows, cols, vals, rhs = [], [], [], []

        def add(entries, value):
            r = len(rhs)
            for c, v in entries:
                rows.append(r)
                cols.append(c)
                vals.append(v)
            rhs.append(value)

        Z, NA, NB = self.z_count, self.n_a, self.n_b
        xy = [(x, y) for x in range(2) for y in range(2)]
        for a in range(NA):
            for b in range(NB):
                for x, y in xy:
                    add([(self.idx(z, a, b, x, y), 1.0) for z in range(Z)], self.target[a, b, x, y])
        for z in range(Z):
            ref = [(self.idx(z, 0, 0, x, y), -1.0) for x, y in xy]
            for a in range(NA):
                for b in range(NB):
                    if (a, b) != (0, 0):
                        add([(self.idx(z, a, b, x, y), 1.0) for x, y in xy] + ref, 0.0)
            # normalization is already tied down, so one outcome per marginal suffices
            for a in range(NA):
                for b in range(1, NB):
                    add(
                        [(self.idx(z, a, b, 0, y), 1.0) for y in range(2)]
                        + [(self.idx(z, a, 0, 0, y), -1.0) for y in range(2)],
                        0.0,
                    )
            for b in range(NB):
                for a in range(1, NA):
                    add(
                        [(self.idx(z, a, b, x, 0), 1.0) for x in range(2)]
                        + [(self.idx(z, 0, b, x, 0), -1.0) for x in range(2)],
                        0.0,
                    )
        n_cols = self.n_q + 1  # trailing column: the margin r
        return sp.csr_matrix((vals, (rows, cols)), shape=(len(rhs), n_cols)), np.array(rhs)

    def weights(self, q: np.ndarray) -> np.ndarray:
        return q.reshape(self.z_count, self.n_a, self.n_b, 2, 2)[:, 0, 0].sum(axis=(1, 2))

    def signed_bias(self, q: np.ndarray, a_star: int) -> np.ndarray:
        """q_z(x=0|a*) - q_z(x=1|a*), read at b = 0."""
        m = q.reshape(self.z_count, self.n_a, self.n_b, 2, 2)[:, a_star, 0].sum(axis=2)
        return m[:, 0] - m[:, 1]

    def _margin_lp(self, a_star: int, signs, level: float):
        """max r  s.t.  s_z d_z - level mu_z >= r  for every atom."""
        rows, cols, vals = [], [], []
        for z, s in enumerate(signs):
            for x in range(2):
                for y in range(2):
                    rows.append(z)
                    cols.append(self.idx(z, 0, 0, x, y))
                    vals.append(level)
            for y in range(2):
                rows += [z, z]
                cols += [self.idx(z, a_star, 0, 0, y), self.idx(z, a_star, 0, 1, y)]
                vals += [-float(s), float(s)]
            rows.append(z)
            cols.append(self.n_q)
            vals.append(1.0)
        A_ub = sp.csr_matrix((vals, (rows, cols)), shape=(len(signs), self.n_q + 1))
        c = np.zeros(self.n_q + 1)
        c[-1] = -1.0
        bounds = [(0.0, None)] * self.n_q + [(-4.0, 1.0)]
        res = linprog(
            c, A_ub=A_ub, b_ub=np.zeros(len(signs)), A_eq=self.A_eq, b_eq=self.b_eq,
            bounds=bounds, method="highs",
        )
        if res.status != 0:
            raise SolverError(f"LP failed at level {level:.6g}: {res.message}", {"status": res.status})
        return res.x[: self.n_q], float(res.x[-1])

    def attained(self, q: np.ndarray, a_star: int, signs, floor: float = 1e-12) -> float:
        """min over atoms with weight of s_z d_z / mu_z."""
        mu = self.weights(q)
        d = self.signed_bias(q, a_star) * np.asarray(signs, dtype=float)
        live = mu > floor
        return float(np.min(d[live] / mu[live]))

    def maximize(self, a_star: int, signs, tol: float = 1e-10):
        """Largest level t reachable for (a*, signs); returns (t, q, solves)."""
        level = -1.0
        best_q = None
        solves = 0
        for _ in range(_MAX_LEVEL_STEPS):
            q, margin = self._margin_lp(a_star, signs, level)
            solves += 1
            reached = self.attained(q, a_star, signs)
            if best_q is None or reached >= level:
                best_q = q
            if margin <= tol or reached <= level + tol:
                level = max(level, reached)
                break
            level = reached
        else:
            raise SolverError("level iteration did not converge", {"level": level})
        return min(level, 1.0), best_q, solves

    def residuals(self, q: np.ndarray) -> dict:
        x = np.append(q, 0.0)
        return {
            "equality": float(np.max(np.abs(self.A_eq @ x - self.b_eq))),
            "negativity": float(max(0.0, -q.min())),
        }


def _sign_patterns(z_count: int):
    for k in range(z_count, -1, -1):
        yield tuple([1] * k + [-1] * (z_count - k))


def _lift(q2: np.ndarray, prog2: DecompositionProgram, signs) -> np.ndarray:
    """Split the (+, -) atoms of a two-atom solution evenly across ``signs``."""
    blocks = q2.reshape(2, -1)
    k = sum(1 for s in signs if s > 0)
    out = []
    for s in signs:
        out.append(blocks[0] / k if s > 0 else blocks[1] / (len(signs) - k))
    return np.concatenate(out)


def _extract_model(q, prog: DecompositionProgram, state, scenario, atol: float) -> DecompositionModel:
    mu = prog.weights(q)
    tables = q.reshape(prog.z_count, prog.n_a, prog.n_b, 2, 2)
    keep = mu > 1e-12
    boxes = []
    for t, m in zip(tables[keep], mu[keep]):
        p = np.clip(t / m, 0.0, None)
        p /= p.sum(axis=(2, 3), keepdims=True)
        boxes.append(BehaviorBox(p, atol=atol))
    w = mu[keep] / mu[keep].sum()
    return DecompositionModel(w, tuple(boxes), scenario, state, atol=atol)


def lp_max_advantage(
    state: EntangledPairState,
    scenario: ScenarioSettings,
    z_count: int,
    a_star: int | None = None,
    reduce: bool = True,
    tol: float = LP_TOL,
) -> AdvantageLPResult:
    """Maximize the advantage every atom of a decomposition holds at one Alice setting.

    Scans every Alice setting (or only ``a_star``) and every sign count.
    Raises :class:`SolverError` when HiGHS fails or the lifted solution breaks
    a constraint by more than ``tol``.
    """
    if z_count < 1:
        raise ValueError("z_count must be >= 1")
    target = born_table(state, scenario.alice_angles, scenario.bob_angles)
    full = DecompositionProgram(target, z_count)
    single = DecompositionProgram(target, 1) if reduce or z_count == 1 else None
    pair = DecompositionProgram(target, 2) if reduce and z_count >= 2 else None
    settings = range(full.n_a) if a_star is None else [a_star]

    best = None
    per_setting = []
    solves = 0
    for a in settings:
        best_here = -math.inf
        pair_solution = None
        for signs in _sign_patterns(z_count):
            mixed = 0 < sum(s > 0 for s in signs) < z_count
            if not reduce:
                t, q, n = full.maximize(a, signs)
            elif mixed:
                # every mixed pattern reduces to the same two-atom program
                if pair_solution is None:
                    pair_solution = pair.maximize(a, (1, -1))
                    n = pair_solution[2]
                else:
                    n = 0
                t, q2 = pair_solution[:2]
                q = _lift(q2, pair, signs)
            else:
                t, q1, n = single.maximize(a, signs[:1])
                q = np.tile(q1 / z_count, z_count)
            solves += n
            best_here = max(best_here, t)
            if best is None or t > best[0]:
                best = (t, a, signs, q)
        per_setting.append(best_here)

    t, a, signs, q = best
    res = full.residuals(q)
    reached = full.attained(q, a, signs)
    res["advantage"] = max(0.0, t - reached)
    if max(res.values()) > tol:
        raise SolverError("solution violates the decomposition constraints", res)
    model = _extract_model(q, full, state, scenario, atol=tol)
    return AdvantageLPResult(
        t_star=float(t),
        a_star=int(a),
        signs=tuple(signs),
        model=model,
        quantum_bound=chained_value_trace(state, scenario).value,
        residuals=res,
        per_setting=tuple(per_setting),
        lp_solves=solves,
    )
