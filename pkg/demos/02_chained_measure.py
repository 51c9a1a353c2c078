"""The chained Bell measure I_N: how it is built and how it shrinks with N."""
import math

from chainedbell.chained import (
    ScenarioSettings,
    chain_links,
    chained_value_closed_form,
    chained_value_trace,
    closed_form_discrepancy,
    equally_spaced_settings,
    local_deterministic_minimum,
    minimize_chained_value,
    settings_for_epsilon,
    small_angle_bound,
)
from chainedbell.quantum import EntangledPairState

state = EntangledPairState(1 / math.sqrt(2))

print("links for N=3:")
for link in chain_links(3):
    kind = "equal" if link.equal else "unequal"
    print(f"  A{link.a_index + 1} B{link.b_index + 1} counts {kind} outcomes")

print("\n  N   I_N (trace)     pi^2/8N   local min")
for n in (2, 3, 4, 6, 8):
    value = chained_value_trace(state, equally_spaced_settings(n)).value
    print(f"{n:3d}   {value:.10f}  {small_angle_bound(n):.6f}   {local_deterministic_minimum(n)}")
for n in (25, 100, 1000):
    value = chained_value_trace(state, equally_spaced_settings(n)).value
    print(f"{n:4d}  {value:.10f}  {small_angle_bound(n):.6f}")

best, s = minimize_chained_value(state, 2)
print("\nnumerical minimum of I_2:", best, " 2 - sqrt 2 =", 2 - math.sqrt(2))

print("\nsettings chosen for a target epsilon:")
for eps in (0.5, 0.3, 0.2, 0.1):
    n, s = settings_for_epsilon(eps)
    print(f"  eps={eps}: N={n}, I_N={chained_value_trace(state, s).value:.6f}")

# closed form versus the trace, on a skewed state with arbitrary angles
skew = EntangledPairState(0.35)
s = ScenarioSettings((0.2, 1.9, 3.1), (0.8, 2.2, 4.4))
print("\ntrace:", chained_value_trace(skew, s).value)
print("closed form:", chained_value_closed_form(skew, s))
print(closed_form_discrepancy(skew, s).summary())
