"""Mixed-norm solver: one global scale, coupled across the whole map.

The squared column-L1 penalty couples every source within a column, so
the model is driven by per-coordinate coupling magnitudes (the L1 mass of
all *other* coordinates) plus a single scale learned over the full
spatio-temporal map. This script compares the learned scale against fixed
choices and shows the purely spatial single-column mode.
"""

import numpy as np

from rvmix import (
    NoiseSpec,
    ProblemData,
    SolverConfig,
    add_noise,
    evaluate,
    make_phantom,
    solve_mxn,
)

ph = make_phantom()
V, _ = add_noise(ph.V_clean, NoiseSpec(42.0, seed=0))
data = ProblemData(K=ph.K, V=V)

print("=== mixed-norm arms on the 42 dB phantom ===\n")
finals = {}
for name, cfg in {
    "learned": SolverConfig(),
    "fixed a=1": SolverConfig(fixed_alpha=1.0),
    "fixed a=10": SolverConfig(fixed_alpha=10.0),
}.items():
    sol = solve_mxn(data, cfg)
    rep = evaluate(name, sol.mu, ph.J_true, ph.support_true)
    finals[name] = sol.objective_trace[-1]
    print(f"{name:11s} alpha={sol.extras['alpha_final']:7.3f} "
          f"sweeps={sol.iterations:3d} 1-corr={rep.one_minus_corr:.3f} "
          f"Sp={rep.sparseness_pct:5.1f} AUC={rep.auc_pct:5.1f} "
          f"objective={finals[name]:12.1f}")

best = min(finals, key=finals.get)
print(f"\nlowest objective: {best}")

single = ProblemData(K=ph.K, V=V[:, [40]])
sol1 = solve_mxn(single)
print(f"\nsingle-column (purely spatial) mode: map shape {sol1.mu.shape}, "
      f"{sol1.iterations} sweeps, converged={sol1.converged}")
print("""
With one time sample the solver still runs - the coupling magnitudes then
express purely spatial competition between generators, which yields small
smooth patches rather than isolated spikes.
""")
