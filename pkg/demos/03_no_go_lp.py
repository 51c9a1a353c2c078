"""How much can a no-signalling refinement predict Alice's outcome? A linear program answers."""
import math

from chainedbell.chained import chained_value_trace, equally_spaced_settings
from chainedbell.decomposition import (
    advantage,
    average_asymmetry,
    averages_to_quantum,
    bkp_bound_check,
    construct_product_state_model,
)
from chainedbell.lp import lp_max_advantage
from chainedbell.quantum import EntangledPairState

state = EntangledPairState(1 / math.sqrt(2))

print(" N  z   t*            I_N(QM)")
for n in (2, 5, 9):
    s = equally_spaced_settings(n)
    qm = chained_value_trace(state, s).value
    for z in (1, 2, 8):
        res = lp_max_advantage(state, s, z)
        print(f"{n:2d} {z:2d}   {res.t_star:.10f}  {qm:.10f}")

# the optimal refinement saturates the bound, and every atom is a valid box
res = lp_max_advantage(state, equally_spaced_settings(5), 3)
model = res.model
print("\nweights:", model.weights)
print("averages to the Born box:", bool(averages_to_quantum(model, atol=1e-7)))
print("bound holds per atom:", bool(bkp_bound_check(model, atol=1e-7)))
print("average |bias| at a*:", average_asymmetry(model, res.a_star))
print(res.certificate)

# without entanglement the outcome can be fully predetermined
prod = construct_product_state_model(1.0, equally_spaced_settings(5))
print("\nproduct state advantage:", advantage(prod).epsilon_achieved)
print("LP at alpha=1:", lp_max_advantage(EntangledPairState(1.0), equally_spaced_settings(5), 2).t_star)
