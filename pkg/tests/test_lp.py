import math

import numpy as np
import pytest

from chainedbell.chained import (
    chained_value,
    chained_value_trace,
    equally_spaced_settings,
    quantum_box,
    settings_for_epsilon,
)
from chainedbell.decomposition import (
    advantage,
    average_asymmetry,
    averages_to_quantum,
    bkp_bound_check,
    check_no_signalling,
)
from chainedbell.lp import LP_TOL, lp_max_advantage
from chainedbell.quantum import EntangledPairState

MAX = EntangledPairState(1 / math.sqrt(2))


def test_single_atom_has_no_advantage():
    res = lp_max_advantage(MAX, equally_spaced_settings(3), 1)
    assert res.t_star == pytest.approx(0.0, abs=LP_TOL)
    assert res.model.z_count == 1


def test_product_state_full_advantage():
    res = lp_max_advantage(EntangledPairState(1.0), equally_spaced_settings(2), 2)
    assert res.t_star == pytest.approx(1.0, abs=LP_TOL)
    assert res.a_star == 0
    assert res.verdict(0.3) == "ADVANTAGE-FEASIBLE"


def test_epsilon_point_three_scenario():
    n, s = settings_for_epsilon(0.3)
    assert n == 9
    bound = 2 * 9 * math.sin(math.pi / 36) ** 2
    assert bound == pytest.approx(0.1367302228901275, abs=1e-12)
    res = lp_max_advantage(MAX, s, 4)
    assert res.t_star <= bound + LP_TOL
    assert res.verdict(0.3) == "ADVANTAGE-EXCLUDED"


@pytest.mark.parametrize("n,z", [(2, 2), (2, 3), (3, 2), (3, 3), (4, 3)])
def test_reduction_matches_full_program(n, z):
    s = equally_spaced_settings(n)
    reduced = lp_max_advantage(MAX, s, z, reduce=True)
    full = lp_max_advantage(MAX, s, z, reduce=False)
    assert reduced.t_star == pytest.approx(full.t_star, abs=1e-7)


def test_reduction_matches_full_program_skewed_state():
    rng = np.random.default_rng(8)
    from chainedbell.chained import ScenarioSettings

    s = ScenarioSettings(tuple(rng.uniform(0, 6, 3)), tuple(rng.uniform(0, 6, 3)))
    st = EntangledPairState(0.45)
    reduced = lp_max_advantage(st, s, 3, reduce=True)
    full = lp_max_advantage(st, s, 3, reduce=False)
    assert reduced.t_star == pytest.approx(full.t_star, abs=1e-7)
    assert reduced.t_star <= chained_value_trace(st, s).value + LP_TOL


def test_advantage_independent_of_atom_count_beyond_two():
    s = equally_spaced_settings(5)
    values = [lp_max_advantage(MAX, s, z).t_star for z in (2, 4, 8)]
    assert max(values) - min(values) < 1e-9


@pytest.mark.parametrize("alpha", [1 / math.sqrt(2), 0.9, 0.3])
def test_extracted_model_passes_predicates(alpha):
    state = EntangledPairState(alpha)
    s = equally_spaced_settings(4)
    res = lp_max_advantage(state, s, 3)
    model = res.model
    assert averages_to_quantum(model, atol=LP_TOL)
    assert all(check_no_signalling(b, LP_TOL) for b in model.boxes)
    assert bkp_bound_check(model, atol=LP_TOL)
    qm = chained_value(quantum_box(state, s))
    assert average_asymmetry(model, res.a_star) <= qm + LP_TOL
    # every live atom holds at least t* at a*
    for b in model.boxes:
        assert b.alice_asymmetry()[res.a_star] >= res.t_star - LP_TOL
    assert advantage(model).epsilon_achieved >= res.t_star - LP_TOL


def test_pinned_setting():
    s = equally_spaced_settings(3)
    res = lp_max_advantage(MAX, s, 2, a_star=1)
    assert res.a_star == 1
    assert len(res.per_setting) == 1


def test_zero_atoms_rejected():
    with pytest.raises(ValueError):
        lp_max_advantage(MAX, equally_spaced_settings(2), 0)


def test_result_certificate_text():
    res = lp_max_advantage(MAX, equally_spaced_settings(2), 1)
    assert "no advantage" in res.certificate
