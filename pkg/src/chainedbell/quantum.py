"""Born-rule probabilities for the two-qubit family alpha|00> + sqrt(1-alpha^2)|11>.

Measurements are projective and confined to the x-z plane of the Bloch
sphere: the axis at angle ``theta`` is ``(sin theta, 0, cos theta)``.
Outcome 0 corresponds to the +1 eigenvalue of that axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ATOL = 1e-12
TWO_PI = 2.0 * np.pi

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class NotPureSubsystemError(ValueError):
    pass


@dataclass(frozen=True)
class EntangledPairState:
    """Pure state with real, non-negative Schmidt coefficients."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not np.isfinite(a) or a < 0.0 or a > 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    @classmethod
    def maximally_entangled(cls) -> "EntangledPairState":
        return cls(1.0 / np.sqrt(2.0))

    @property
    def beta(self) -> float:
        return float(np.sqrt(max(0.0, 1.0 - self.alpha**2)))

    def ket(self) -> np.ndarray:
        psi = np.zeros(4, dtype=complex)
        psi[0] = self.alpha
        psi[3] = self.beta
        return psi

    def density_matrix(self) -> np.ndarray:
        psi = self.ket()
        return np.outer(psi, psi.conj())

    def reduced_state(self, party: int = 0) -> np.ndarray:
        """Partial trace onto Alice (``party=0``) or Bob (``party=1``)."""
        rho = self.density_matrix().reshape(2, 2, 2, 2)
        if party == 0:
            return np.einsum("ijkj->ik", rho)
        if party == 1:
            return np.einsum("ijil->jl", rho)
        raise ValueError("party must be 0 or 1")

    @property
    def is_product(self) -> bool:
        return self.alpha in (0.0, 1.0)


def normalize_angle(theta: float) -> float:
    return float(np.mod(theta, TWO_PI))


def bloch_axis(theta: float) -> np.ndarray:
    return np.array([np.sin(theta), 0.0, np.cos(theta)])


def sigma_n(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [s, -c]], dtype=complex)


def povm_element(theta: float, outcome: int) -> np.ndarray:
    """Projector ``(1 + (-1)^outcome sigma_n) / 2`` for the planar axis at ``theta``."""
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome!r}")
    sign = 1.0 if outcome == 0 else -1.0
    return 0.5 * (IDENTITY + sign * sigma_n(theta))


def joint_probability(state: EntangledPairState, a: float, b: float, x: int, y: int) -> float:
    """tr((E_x^a kron E_y^b) rho)."""
    op = np.kron(povm_element(a, x), povm_element(b, y))
    p = np.trace(op @ state.density_matrix()).real
    return float(min(1.0, max(0.0, p)))


def joint_table(state: EntangledPairState, a: float, b: float) -> np.ndarray:
    """2x2 array ``p[x, y]`` for one setting pair, computed by trace."""
    rho = state.density_matrix()
    table = np.empty((2, 2))
    for x in (0, 1):
        for y in (0, 1):
            op = np.kron(povm_element(a, x), povm_element(b, y))
            table[x, y] = np.trace(op @ rho).real
    return np.clip(table, 0.0, 1.0)


def born_table(state: EntangledPairState, alice_angles, bob_angles) -> np.ndarray:
    """Array ``p[a, b, x, y]`` over all setting pairs."""
    alice_angles = np.atleast_1d(np.asarray(alice_angles, dtype=float))
    bob_angles = np.atleast_1d(np.asarray(bob_angles, dtype=float))
    out = np.empty((alice_angles.size, bob_angles.size, 2, 2))
    for i, a in enumerate(alice_angles):
        for j, b in enumerate(bob_angles):
            out[i, j] = joint_table(state, a, b)
    return out


def marginal(state: EntangledPairState, a: float, b: float, x: int) -> float:
    """Alice's outcome probability p(x|a,b) = sum_y p(x,y|a,b)."""
    return float(sum(joint_probability(state, a, b, x, y) for y in (0, 1)))


def bob_marginal(state: EntangledPairState, a: float, b: float, y: int) -> float:
    return float(sum(joint_probability(state, a, b, x, y) for x in (0, 1)))


def decorrelation_check(state: EntangledPairState, a: float, b: float, atol: float = ATOL) -> bool:
    """Whether outcomes factorize into the two local marginals.

    Only meaningful when the subsystem state is pure, i.e. for a product
    state; entangled members of the family are rejected.
    """
    if not state.is_product:
        raise NotPureSubsystemError(
            f"subsystem not pure: alpha={state.alpha!r} gives an entangled state"
        )
    table = joint_table(state, a, b)
    px = table.sum(axis=1)
    py = table.sum(axis=0)
    return bool(np.allclose(table, np.outer(px, py), rtol=0.0, atol=atol))
