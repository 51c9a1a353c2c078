import math

import numpy as np
import pytest

from chainedbell.chained import ScenarioSettings, chained_value_trace, equally_spaced_settings
from chainedbell.experiment import (
    TrialLog,
    TrialRecord,
    UndersampledError,
    certificate_from_counts,
    estimate_chained,
    hoeffding_half_width,
    link_counts,
    sample_rounds,
)
from chainedbell.quantum import EntangledPairState

MAX = EntangledPairState(1 / math.sqrt(2))
SIN2_PI8 = 0.1464466094067262


def test_equal_angles_never_disagree():
    s = ScenarioSettings((0.4, 0.4), (0.4, 0.4))
    log = sample_rounds(MAX, s, 20_000, seed=1, schedule="uniform")
    assert np.all(log.x == log.y)


def test_product_state_schmidt_axis_is_deterministic():
    s = ScenarioSettings((0.0, 0.0), (0.0, 1.0))
    log = sample_rounds(EntangledPairState(1.0), s, 5_000, seed=2, schedule="uniform")
    assert np.all(log.x == 0)


def test_link_event_rate_at_pi_over_4():
    # every N=2 link has event probability sin^2(pi/8)
    s = equally_spaced_settings(2)
    rounds = 10**6
    log = sample_rounds(MAX, s, rounds, seed=3)
    hits, counts = link_counts(log, 2)
    rate = hits.sum() / counts.sum()
    assert abs(rate - SIN2_PI8) <= 3 * math.sqrt(0.125 / rounds)


def test_frequencies_converge_to_born():
    s = equally_spaced_settings(3)
    log = sample_rounds(EntangledPairState(0.6), s, 400_000, seed=4, schedule="uniform")
    from chainedbell.quantum import born_table

    table = born_table(EntangledPairState(0.6), s.alice_angles, s.bob_angles)
    for a in range(3):
        for b in range(3):
            sel = (log.a_index == a) & (log.b_index == b)
            m = sel.sum()
            for x in (0, 1):
                for y in (0, 1):
                    f = np.sum(sel & (log.x == x) & (log.y == y)) / m
                    assert abs(f - table[a, b, x, y]) < 5 * math.sqrt(0.25 / m)


def test_chain_only_schedule_visits_only_links():
    s = equally_spaced_settings(4)
    log = sample_rounds(MAX, s, 10_000, seed=5)
    pairs = set(zip(log.a_index.tolist(), log.b_index.tolist()))
    assert pairs == {(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (3, 2), (3, 3), (0, 3)}


def test_reproducible_streams():
    s = equally_spaced_settings(3)
    a = sample_rounds(MAX, s, 300_000, seed=99)
    b = sample_rounds(MAX, s, 300_000, seed=99)
    c = sample_rounds(MAX, s, 300_000, seed=100)
    assert a.to_csv() == b.to_csv()
    assert a.to_csv() != c.to_csv()


def test_trial_log_csv_round_trip():
    log = sample_rounds(MAX, equally_spaced_settings(2), 1000, seed=6)
    text = log.to_csv()
    assert text.splitlines()[1] == "round,a_index,b_index,x,y"
    back = TrialLog.from_csv(text)
    assert back.to_csv() == text
    assert back.seed == 6
    assert back[3] == log[3]
    assert isinstance(next(iter(back)), TrialRecord)


def test_trial_log_rejects_bad_header():
    with pytest.raises(ValueError):
        TrialLog.from_csv("a,b,c\n1,2,3\n")


def test_rejects_nonpositive_rounds():
    with pytest.raises(ValueError):
        sample_rounds(MAX, equally_spaced_settings(2), 0, seed=1)


def test_infinite_sample_limit_plug_in():
    s = equally_spaced_settings(5)
    report = chained_value_trace(MAX, s)
    counts = np.full(10, 10_000)
    cert = certificate_from_counts(np.array(report.terms) * counts, counts, 0.99)
    assert cert.i_n_hat == pytest.approx(report.value, abs=1e-12)
    expected_hw = 10 * math.sqrt(math.log(2 * 10 / 0.01) / (2 * 10_000))
    assert cert.half_width == pytest.approx(expected_hw, rel=1e-12)
    assert cert.certified_epsilon == pytest.approx(report.value + expected_hw)


def test_half_width_formula_mixed_counts():
    counts = [100, 400, 900, 1600]
    hw = hoeffding_half_width(counts, 0.95)
    expected = sum(math.sqrt(math.log(2 * 4 / 0.05) / (2 * m)) for m in counts)
    assert hw == pytest.approx(expected, rel=1e-12)


def test_zero_count_link_rejected():
    with pytest.raises(UndersampledError):
        certificate_from_counts([0, 1], [0, 10])


def test_undersampled_estimate():
    s = equally_spaced_settings(9)
    log = sample_rounds(MAX, s, 10, seed=1)
    with pytest.raises(UndersampledError):
        estimate_chained(log, s)


def test_estimate_n9_million_rounds():
    s = equally_spaced_settings(9)
    true = chained_value_trace(MAX, s).value
    assert true == pytest.approx(0.1367302228901276, abs=1e-12)
    cert = estimate_chained(sample_rounds(MAX, s, 10**6, seed=42), s, 0.99)
    assert abs(cert.i_n_hat - true) <= 3 * cert.half_width
    assert cert.certified_epsilon >= cert.i_n_hat
    assert cert.contains(true)
    # exact binomial intervals are much tighter than the Hoeffding sum
    cp = estimate_chained(sample_rounds(MAX, s, 10**6, seed=42), s, 0.99, method="clopper-pearson")
    assert 0.14 <= cp.certified_epsilon <= 0.16
    assert cp.certified_epsilon < cert.certified_epsilon


def test_certified_epsilon_tends_to_quantum_value():
    s = equally_spaced_settings(4)
    true = chained_value_trace(MAX, s).value
    gaps = []
    for rounds in (10**3, 10**4, 10**5, 10**6, 10**7):
        cert = estimate_chained(sample_rounds(MAX, s, rounds, seed=7), s, 0.99, min_samples=1)
        gaps.append(cert.certified_epsilon - true)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.02


def test_certificate_text_keys():
    s = equally_spaced_settings(2)
    cert = estimate_chained(sample_rounds(MAX, s, 2000, seed=8), s)
    keys = [line.split("=")[0] for line in cert.to_text().splitlines()]
    assert keys[:5] == ["n_rounds", "n_links", "method", "confidence", "i_n_hat"]
    assert "certified_epsilon" in keys and "rng" in keys
