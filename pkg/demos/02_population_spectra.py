"""Exact population quantities of a block model, without any n x n matrix.

The population regularized Laplacian of a K-block model has rank K; its
nonzero eigenvalues are those of a K x K reduction, and the rows of its
top-K eigenvector matrix collapse to K centers whose pairwise distances
are sqrt(1/n_k + 1/n_l) regardless of tau.
"""

import numpy as np

import specluster as sp

model = sp.BlockModel.from_sizes(
    [30, 40, 50],
    [[0.50, 0.08, 0.05],
     [0.08, 0.45, 0.06],
     [0.05, 0.06, 0.40]],
)

for tau in (0.0, 5.0, 120.0):
    reduced = sp.reduced_spectrum(model, tau)
    dense = np.linalg.eigvalsh(sp.population_laplacian(model, tau))[::-1][:3]
    print(f"tau={tau:>6.1f}  reduced {np.round(reduced, 6)}  dense {np.round(dense, 6)}")

print("\ncenter distances (tau-independent):")
print(np.round(sp.center_distances(model), 6))
print("formula check sqrt(1/30 + 1/40) =", round(np.sqrt(1 / 30 + 1 / 40), 6))

# strong/weak structure: two clean communities plus a pool of stragglers
params = sp.StrongWeakParams(
    num_strong=2, strong_size=800, p_strong=0.025, q=0.015,
    b_sw=0.015, num_weak_nodes=400,
)
print("\nstrong/weak closed-form spectrum (1, repeated, last):")
for tau in (0.0, 10.0, 2000.0):
    mu1, mu_rep, mu_last = sp.strong_weak_spectrum(params, tau)
    print(f"  tau={tau:>7.1f}  ({mu1:.4f}, {mu_rep:.4f}, {mu_last:.4f})")

merged = sp.merged_model(params)
dense = np.linalg.eigvalsh(sp.population_laplacian(merged, 10.0))[::-1][:3]
print("dense check at tau=10:", np.round(dense, 4))
