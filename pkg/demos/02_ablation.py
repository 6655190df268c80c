"""Which error source dominates at the end of sampling?

Final W2 to the data law for every scheme, step count, truncation time and
initialization, laid out as one small table per initialization.

    python demos/02_ablation.py [SPECTRUM_CSV]
"""
import sys

import numpy as np

from gdiff import ablation_table, load_spectrum_csv, synthetic_spectrum

if len(sys.argv) > 1:
    lam = load_spectrum_csv(sys.argv[1])
else:
    lam = np.append(np.asarray(synthetic_spectrum("powerlaw", 3072, 1e-6, 1e3)), 0.0)

cells = ablation_table(lam)
eps_values = sorted({c.eps for c in cells})
columns = ["continuous", 50, 250, 500, 1000]
for init in ("pT", "N0"):
    print(f"\ninitialization {init}")
    print(f"{'scheme':<8}{'eps':>8}" + "".join(f"{str(c):>12}" for c in columns))
    for scheme in ("em", "ei", "euler", "heun"):
        for eps in eps_values:
            row = {c.N: c.w2 for c in cells if c.scheme == scheme and c.eps == eps and c.init == init}
            text = "".join(f"{'-' if row[c] is None else f'{row[c]:.4f}':>12}" for c in columns)
            print(f"{scheme:<8}{eps:>8.0e}{text}")
print("\n'-' marks Heun without truncation: it would evaluate the score where an eigenvalue is zero.")
