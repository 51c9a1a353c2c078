"""Simulated chained Bell runs and the confidence bound they certify."""
import math

from chainedbell.chained import chained_value_trace, equally_spaced_settings
from chainedbell.experiment import estimate_chained, sample_rounds
from chainedbell.quantum import EntangledPairState

state = EntangledPairState(1 / math.sqrt(2))
s = equally_spaced_settings(9)
true = chained_value_trace(state, s).value
print("true I_9:", true)

log = sample_rounds(state, s, 10**6, seed=42)
for r in list(log)[:3]:
    print(f"round {r.round}: A{r.a_index + 1} B{r.b_index + 1} -> x={r.x} y={r.y}")

for method in ("hoeffding", "clopper-pearson"):
    cert = estimate_chained(log, s, confidence=0.99, method=method)
    print(f"\n[{method}]")
    print(cert.to_text(), end="")

print("\nrounds      estimate   certified eps")
for rounds in (10**4, 10**5, 10**6, 10**7):
    cert = estimate_chained(sample_rounds(state, s, rounds, seed=1), s, 0.99)
    print(f"{rounds:>9d}   {cert.i_n_hat:.5f}    {cert.certified_epsilon:.5f}")

covered = 0
for seed in range(50):
    covered += estimate_chained(sample_rounds(state, s, 10**5, seed=seed), s).contains(true)
print(f"\ncoverage over 50 seeds at 1e5 rounds: {covered}/50")
