"""Decompositions of Born probabilities into z-conditioned prediction boxes.

A :class:`DecompositionModel` is a finite family of behavior boxes with
weights ``mu(z)``. The weights carry no setting index, so the model cannot
express a dependence of z on the measurement settings.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boxes import ATOL, BehaviorBox, Check, deterministic_box
from .chained import ScenarioSettings, chained_value, quantum_box
from .quantum import EntangledPairState, born_table


class SignallingBoxError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DecompositionModel:
    weights: np.ndarray
    boxes: tuple[BehaviorBox, ...]
    scenario: ScenarioSettings
    state: EntangledPairState
    atol: float = field(default=ATOL, repr=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1:
            raise ValueError(
                f"weights must be a flat list over z (got shape {w.shape}); "
                "setting-dependent weights are not representable"
            )
        if w.size == 0 or w.size != len(self.boxes):
            raise ValueError("need exactly one box per weight")
        if np.any(w < -self.atol):
            raise ValueError("weights must be non-negative")
        if abs(w.sum() - 1.0) > self.atol:
            raise ValueError(f"weights sum to {w.sum():.17g}, not 1")
        boxes = tuple(self.boxes)
        shape = (self.scenario.n, self.scenario.n)
        for b in boxes:
            if b.shape != shape:
                raise ValueError(f"box shape {b.shape} does not match the {shape} scenario")
        w = np.clip(w, 0.0, None)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "boxes", boxes)

    @property
    def z_count(self) -> int:
        return len(self.boxes)

    def averaged_box(self) -> BehaviorBox:
        return BehaviorBox(np.tensordot(self.weights, np.stack([b.p for b in self.boxes]), axes=1))


@dataclass(frozen=True)
class AdvantageReport:
    epsilon_achieved: float
    witness: tuple[int, int, int]  # (z, a, x)
    per_z_bkp_bounds: tuple[tuple[float, float], ...]  # (I_N(z), max_a asymmetry(z))


def check_normalization(box: BehaviorBox, atol: float = ATOL) -> Check:
    dev = float(np.max(np.abs(box.p.sum(axis=(2, 3)) - 1.0)))
    neg = float(max(0.0, -box.p.min()))
    dev = max(dev, neg)
    return Check(dev <= atol, dev)


def check_no_signalling(box: BehaviorBox, atol: float = ATOL) -> Check:
    """Alice's marginals must not depend on b, nor Bob's on a."""
    ma = box.alice_marginals()  # [a, b, x]
    mb = box.bob_marginals()  # [a, b, y]
    dev_a = np.max(ma.max(axis=1) - ma.min(axis=1))
    dev_b = np.max(mb.max(axis=0) - mb.min(axis=0))
    dev = float(max(dev_a, dev_b))
    return Check(dev <= atol, dev)


def check_no_conspiracy(model: DecompositionModel) -> Check:
    return Check(
        True,
        0.0,
        note="weights mu(z) carry no setting index, so p(z|a,b) = p(z) holds by construction",
    )


def averages_to_quantum(model: DecompositionModel, atol: float = ATOL) -> Check:
    target = born_table(model.state, model.scenario.alice_angles, model.scenario.bob_angles)
    dev = float(np.max(np.abs(model.averaged_box().p - target)))
    return Check(dev <= atol, dev)


def advantage(model: DecompositionModel) -> AdvantageReport:
    """Largest Alice-marginal asymmetry |p(x|a,z) - p(1-x|a,z)| over z and a.

    Atoms with zero weight are ignored; they never occur.
    """
    best, witness = -1.0, (0, 0, 0)
    per_z = []
    for z, (w, box) in enumerate(zip(model.weights, model.boxes)):
        asym = box.alice_asymmetry()
        per_z.append((chained_value(box), float(asym.max())))
        if w <= 0:
            continue
        a = int(np.argmax(asym))
        if asym[a] > best:
            m = box.alice_marginal()[a]
            best, witness = float(asym[a]), (z, a, int(m[1] > m[0]))
    return AdvantageReport(max(best, 0.0), witness, tuple(per_z))


def average_asymmetry(model: DecompositionModel, a_index: int) -> float:
    """sum_z mu(z) |p(0|a,z) - p(1|a,z)|; never exceeds I_N of the averaged box."""
    return float(sum(w * b.alice_asymmetry()[a_index] for w, b in zip(model.weights, model.boxes)))


@dataclass(frozen=True)
class BKPResult:
    passed: bool
    slack: tuple[float, ...]  # per z: I_N(z) - max_a asymmetry(z)

    def __bool__(self) -> bool:
        return self.passed


def bkp_bound_check(model: DecompositionModel, atol: float = ATOL) -> BKPResult:
    """Check I_N(z) >= |p(x|a,z) - p(1-x|a,z)| for every z and Alice setting.

    A theorem for no-signalling boxes; signalling boxes are rejected.
    """
    for z, box in enumerate(model.boxes):
        ns = check_no_signalling(box, atol)
        if not ns:
            raise SignallingBoxError(
                f"BKP bound presupposes no-signalling (box z={z} deviates by {ns.deviation:.3e})"
            )
    slack = tuple(chained_value(b) - float(b.alice_asymmetry().max()) for b in model.boxes)
    return BKPResult(all(s >= -atol for s in slack), slack)


def box_bkp_slack(box: BehaviorBox) -> float:
    return chained_value(box) - float(box.alice_asymmetry().max())


@dataclass(frozen=True)
class FactorizationResult:
    factorizes: bool
    no_signalling: bool

    def __bool__(self) -> bool:
        return self.factorizes and self.no_signalling


def deterministic_factorization_check(box: BehaviorBox) -> FactorizationResult:
    """For a 0/1 box, test p(x,y|a,b) = p(x|a) p(y|b) exactly.

    A deterministic box picks one (x, y) per setting pair. It factorizes iff
    x depends only on a and y only on b, which for such boxes coincides with
    no-signalling.
    """
    p = box.p
    if not np.all((p == 0.0) | (p == 1.0)):
        raise ValueError("box has non-deterministic entries")
    flat = p.reshape(box.n_a, box.n_b, 4).argmax(axis=2)
    xs, ys = flat // 2, flat % 2
    f = xs[:, 0]
    g = ys[0, :]
    factorizes = bool(np.array_equal(p, deterministic_box(f, g).p))
    return FactorizationResult(factorizes, bool(check_no_signalling(box, 0.0)))


def all_deterministic_boxes(n_a: int = 2, n_b: int = 2):
    """Every 0/1 box on an n_a x n_b scenario: 4^(n_a n_b) of them."""
    pairs = n_a * n_b
    for code in range(4**pairs):
        p = np.zeros((n_a, n_b, 2, 2))
        c = code
        for a in range(n_a):
            for b in range(n_b):
                o = c % 4
                c //= 4
                p[a, b, o // 2, o % 2] = 1.0
        yield BehaviorBox(p)


def identity_model(state: EntangledPairState, scenario: ScenarioSettings) -> DecompositionModel:
    """Trivial decomposition: one atom carrying the Born box."""
    return DecompositionModel(np.array([1.0]), (quantum_box(state, scenario),), scenario, state)


def construct_product_state_model(alpha: float, scenario: ScenarioSettings) -> DecompositionModel:
    """Exact decomposition of a product state into two factorized boxes.

    For alpha in {0, 1} the Born box is p(x|a) q(y|b). Splitting it on Alice's
    outcome at her first setting gives atoms where that outcome is certain.
    """
    if alpha not in (0, 1, 0.0, 1.0):
        raise ValueError(f"product-state model needs alpha in {{0, 1}}, got {alpha!r}")
    state = EntangledPairState(float(alpha))
    table = born_table(state, scenario.alice_angles, scenario.bob_angles)
    pa = table.sum(axis=3)[:, 0, :]  # p(x|a)
    pb = table.sum(axis=2)[0, :, :]  # p(y|b)
    weights, boxes = [], []
    for x0 in (0, 1):
        w = pa[0, x0]
        if w <= ATOL:
            continue
        alice = pa.copy()
        # given x at setting 0 the only change is to that row; other rows are independent
        alice[0] = [1.0, 0.0] if x0 == 0 else [0.0, 1.0]
        boxes.append(BehaviorBox(np.einsum("ax,by->abxy", alice, pb)))
        weights.append(w)
    weights = np.array(weights) / np.sum(weights)
    return DecompositionModel(weights, tuple(boxes), scenario, state)
