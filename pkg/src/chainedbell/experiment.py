"""Finite-statistics emulation of a chained Bell test.

Rounds are drawn from the Born distribution, the chain links are estimated
by plug-in frequencies, and the total is bounded with a distribution-free
confidence interval: Hoeffding per link, union bound over the 2N links.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Iterator, Literal

import numpy as np
from scipy import stats

from .chained import ScenarioSettings, chain_links
from .quantum import EntangledPairState, born_table

RNG_ALGORITHM = "numpy.random.PCG64/SeedSequence.spawn"
CHUNK_ROUNDS = 1 << 18
MIN_SAMPLES_PER_LINK = 100

Schedule = Literal["chain-only", "uniform"]
Method = Literal["hoeffding", "clopper-pearson"]

TRIAL_COLUMNS = ("round", "a_index", "b_index", "x", "y")


class UndersampledError(ValueError):
    pass


@dataclass(frozen=True)
class TrialRecord:
    a_index: int
    b_index: int
    x: int
    y: int
    round: int


@dataclass(eq=False)
class TrialLog:
    """Column storage for sampled rounds; iterating yields :class:`TrialRecord`."""

    a_index: np.ndarray
    b_index: np.ndarray
    x: np.ndarray
    y: np.ndarray
    seed: int | None = None
    rng_algorithm: str = RNG_ALGORITHM

    @property
    def round(self) -> np.ndarray:
        return np.arange(len(self.a_index))

    def __len__(self) -> int:
        return len(self.a_index)

    def __iter__(self) -> Iterator[TrialRecord]:
        for r, (a, b, x, y) in enumerate(zip(self.a_index, self.b_index, self.x, self.y)):
            yield TrialRecord(int(a), int(b), int(x), int(y), r)

    def __getitem__(self, i: int) -> TrialRecord:
        return TrialRecord(int(self.a_index[i]), int(self.b_index[i]), int(self.x[i]), int(self.y[i]), int(i))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# rng={self.rng_algorithm} seed={self.seed}\n")
        buf.write(",".join(TRIAL_COLUMNS) + "\n")
        data = np.column_stack([self.round, self.a_index, self.b_index, self.x, self.y])
        np.savetxt(buf, data, fmt="%d", delimiter=",")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "TrialLog":
        lines = text.splitlines()
        seed = None
        algo = RNG_ALGORITHM
        while lines and lines[0].startswith("#"):
            for tok in lines.pop(0)[1:].split():
                key, _, val = tok.partition("=")
                if key == "seed" and val != "None":
                    seed = int(val)
                elif key == "rng":
                    algo = val
        if not lines or tuple(lines[0].split(",")) != TRIAL_COLUMNS:
            raise ValueError(f"trial log header must be {','.join(TRIAL_COLUMNS)}")
        body = "\n".join(lines[1:])
        data = np.loadtxt(io.StringIO(body), dtype=np.int64, delimiter=",", ndmin=2)
        if data.size == 0:
            data = np.zeros((0, 5), dtype=np.int64)
        if not np.array_equal(data[:, 0], np.arange(len(data))):
            raise ValueError("round column must count 0, 1, 2, ...")
        return cls(data[:, 1], data[:, 2], data[:, 3], data[:, 4], seed, algo)


def schedule_pairs(n: int, schedule: Schedule) -> np.ndarray:
    if schedule == "chain-only":
        return np.array([(l.a_index, l.b_index) for l in chain_links(n)])
    if schedule == "uniform":
        return np.array([(a, b) for a in range(n) for b in range(n)])
    raise ValueError(f"unknown schedule {schedule!r}")


def sample_rounds(
    state: EntangledPairState,
    scenario: ScenarioSettings,
    rounds: int,
    seed: int,
    schedule: Schedule = "chain-only",
) -> TrialLog:
    """Draw ``rounds`` settings uniformly from the schedule and outcomes from the Born rule.

    Rounds are generated in fixed-size chunks, each from its own spawned
    seed, so the stream depends only on ``seed``.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    pairs = schedule_pairs(scenario.n, schedule)
    table = born_table(state, scenario.alice_angles, scenario.bob_angles)
    cum = np.cumsum(table[pairs[:, 0], pairs[:, 1]].reshape(len(pairs), 4), axis=1)
    cum[:, -1] = 1.0
    n_chunks = -(-rounds // CHUNK_ROUNDS)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    a_parts, b_parts, o_parts = [], [], []
    for i, child in enumerate(children):
        size = min(CHUNK_ROUNDS, rounds - i * CHUNK_ROUNDS)
        rng = np.random.Generator(np.random.PCG64(child))
        which = rng.integers(0, len(pairs), size)
        u = rng.random(size)
        outcome = (u[:, None] >= cum[which]).sum(axis=1)
        a_parts.append(pairs[which, 0])
        b_parts.append(pairs[which, 1])
        o_parts.append(np.minimum(outcome, 3))
    o = np.concatenate(o_parts).astype(np.int8)
    return TrialLog(
        np.concatenate(a_parts).astype(np.int32),
        np.concatenate(b_parts).astype(np.int32),
        o // 2,
        o % 2,
        seed=seed,
    )


@dataclass(frozen=True)
class EmpiricalCertificate:
    n_rounds: int
    i_n_hat: float
    confidence: float
    half_width: float
    certified_epsilon: float
    lower: float
    method: str = "hoeffding"
    term_counts: tuple[int, ...] = field(default=(), repr=False)
    term_frequencies: tuple[float, ...] = field(default=(), repr=False)
    seed: int | None = None
    rng_algorithm: str = RNG_ALGORITHM

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.certified_epsilon

    def to_text(self) -> str:
        rows = [
            ("n_rounds", str(self.n_rounds)),
            ("n_links", str(len(self.term_counts))),
            ("method", self.method),
            ("confidence", f"{self.confidence:.17g}"),
            ("i_n_hat", f"{self.i_n_hat:.17g}"),
            ("half_width", f"{self.half_width:.17g}"),
            ("lower", f"{self.lower:.17g}"),
            ("certified_epsilon", f"{self.certified_epsilon:.17g}"),
            ("min_link_samples", str(min(self.term_counts) if self.term_counts else 0)),
            ("seed", str(self.seed)),
            ("rng", self.rng_algorithm),
        ]
        return "".join(f"{k}={v}\n" for k, v in rows)


def hoeffding_half_width(counts, confidence: float) -> float:
    """sum_k sqrt(ln(2 L / delta) / (2 m_k)) over L links, delta = 1 - confidence."""
    counts = np.asarray(counts, dtype=float)
    delta = 1.0 - confidence
    L = counts.size
    return float(np.sum(np.sqrt(math.log(2.0 * L / delta) / (2.0 * counts))))


def _clopper_pearson(k: np.ndarray, m: np.ndarray, alpha: float):
    lo = np.where(k > 0, stats.beta.ppf(alpha / 2, k, m - k + 1), 0.0)
    hi = np.where(k < m, stats.beta.ppf(1 - alpha / 2, k + 1, m - k), 1.0)
    return lo, hi


def certificate_from_counts(
    hits,
    counts,
    confidence: float = 0.99,
    method: Method = "hoeffding",
    n_rounds: int | None = None,
    seed: int | None = None,
) -> EmpiricalCertificate:
    """Certificate from per-link event counts (``hits`` out of ``counts``).

    ``hits`` may be fractional, which lets exact probabilities stand in for
    an infinite-sample limit.
    """
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    hits = np.asarray(hits, dtype=float)
    counts = np.asarray(counts, dtype=float)
    if np.any(counts <= 0):
        raise UndersampledError("every chain link needs at least one sample")
    freq = hits / counts
    i_hat = float(math.fsum(freq))
    if method == "hoeffding":
        hw = hoeffding_half_width(counts, confidence)
        lower, upper = i_hat - hw, i_hat + hw
    elif method == "clopper-pearson":
        alpha = (1.0 - confidence) / counts.size
        lo, hi = _clopper_pearson(np.round(hits), counts, alpha)
        lower, upper = float(lo.sum()), float(hi.sum())
        hw = max(upper - i_hat, i_hat - lower)
    else:
        raise ValueError(f"unknown method {method!r}")
    return EmpiricalCertificate(
        n_rounds=int(n_rounds if n_rounds is not None else counts.sum()),
        i_n_hat=i_hat,
        confidence=confidence,
        half_width=float(hw),
        certified_epsilon=float(upper),
        lower=float(lower),
        method=method,
        term_counts=tuple(int(c) for c in counts),
        term_frequencies=tuple(float(f) for f in freq),
        seed=seed,
    )


def link_counts(log: TrialLog, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Per chain link: rounds at that setting pair and rounds hitting the link's event."""
    pair_id = log.a_index.astype(np.int64) * n + log.b_index
    equal = log.x == log.y
    total = np.bincount(pair_id, minlength=n * n)
    same = np.bincount(pair_id, weights=equal, minlength=n * n)
    hits, counts = [], []
    for link in chain_links(n):
        k = link.a_index * n + link.b_index
        counts.append(total[k])
        hits.append(same[k] if link.equal else total[k] - same[k])
    return np.asarray(hits, dtype=float), np.asarray(counts, dtype=np.int64)


def estimate_chained(
    log: TrialLog,
    scenario: ScenarioSettings,
    confidence: float = 0.99,
    method: Method = "hoeffding",
    min_samples: int = MIN_SAMPLES_PER_LINK,
) -> EmpiricalCertificate:
    hits, counts = link_counts(log, scenario.n)
    if counts.min() < min_samples:
        worst = int(np.argmin(counts))
        raise UndersampledError(
            f"chain link {worst} has {int(counts[worst])} samples, need at least {min_samples}"
        )
    return certificate_from_counts(hits, counts, confidence, method, n_rounds=len(log), seed=log.seed)
