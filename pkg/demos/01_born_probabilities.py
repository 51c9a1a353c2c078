"""Born-rule statistics of the state alpha|00> + beta|11> under planar spin measurements."""
import math

import numpy as np

from chainedbell.quantum import EntangledPairState, born_table, decorrelation_check, marginal

state = EntangledPairState(1 / math.sqrt(2))
print("state vector:", state.ket().real)
print("density matrix trace:", np.trace(state.density_matrix()).real)

# joint table at Alice angle 0, Bob angle pi/4
table = born_table(state, [0.0], [math.pi / 4])[0, 0]
print("p(x,y | 0, pi/4) =")
print(table)
print("disagreement probability:", table[0, 1] + table[1, 0], "vs sin^2(pi/8) =", math.sin(math.pi / 8) ** 2)

# Alice's marginal does not care what Bob measures
for b in (0.0, 0.7, 2.1):
    t = born_table(state, [0.3], [b])[0, 0]
    print(f"bob angle {b:.1f}: alice p(0) = {t[0].sum():.12f}")

# a skewed state has a biased marginal along the Schmidt axis
skew = EntangledPairState(0.8)
print("alpha=0.8, p(x=0 | theta=0) =", marginal(skew, 0.0, 1.3, 0))

# outcomes factorize only when the pair is in a product state
for alpha in (1.0, 0.0, 0.9):
    try:
        ok = decorrelation_check(EntangledPairState(alpha), 0.4, 1.1)
        print(f"alpha={alpha}: factorizes {ok}")
    except Exception as exc:
        print(f"alpha={alpha}: {exc}")
