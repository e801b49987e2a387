"""Why regularize? A sparse two-community graph, clustered at several tau.

One community is much denser than the other (expected degrees 18.75 vs
8.25).  At tau = 0 the top eigenvectors are dominated by low-degree noise
and K-means splits almost at random; adding tau/n to every adjacency entry
before normalizing stabilizes the spectrum.
"""

import specluster as sp

model = sp.BlockModel.from_sizes(
    [1500, 1500], [[0.01, 0.0025], [0.0025, 0.003]]
)
truth = sp.Partition(model.membership, 2)

print("population degrees per block:", sp.block_degrees(model))
print("spectral gap (2nd eigenvalue) vs tau:")
for tau in (0.0, 10.0, 100.0, 3000.0):
    print(f"  tau={tau:>7.1f}  gap={sp.eigen_gap(model, tau):.5f}")

seed = 5  # this sample has no isolated nodes, so tau = 0 is well defined
g = sp.sample(model, seed)
print(f"\nsampled graph: n={g.n}, edges={g.num_edges}, degree range {sp.degree_extremes(g)}")

print("\nmisclassified fraction vs tau (single sample):")
for tau in (0.0, 5.0, 26.5, 300.0, 3000.0):
    part = sp.regularized_spectral_clustering(g, 2, tau, seed=0)
    rep = sp.clustering_error(part, truth)
    print(
        f"  tau={tau:>7.1f}  misclassified={rep.misclassified_fraction:.3f}"
        f"  worst-cluster error={rep.error:.3f}  nmi={sp.nmi(part, truth):.3f}"
    )

print(
    "\nThe unregularized run loses a third of the nodes; moderate tau"
    "\nroughly halves the error.  demos/04_tau_selection.py picks tau from"
    "\ndata alone."
)
