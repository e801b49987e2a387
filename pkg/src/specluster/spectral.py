"""Matrix-free regularized Laplacian, top-K eigensolver, norm utilities.

The regularized adjacency A + tau J (J = all-ones / n) is dense if
materialized, so the operator keeps A sparse and applies the tau term as a
rank-one correction inside the matvec.  Cost per apply is O(|E| + n).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, SingularLaplacianError, SpeclusterError
from .util import rng_from

DENSE_FALLBACK = 512
_BREAKDOWN = 1e-14


class RegularizedLaplacian:
    """Symmetric operator D_tau^{-1/2} (A + tau J) D_tau^{-1/2}.

    D_tau adds tau to every node degree, which are exactly the row sums of
    A + tau J.  The all-ones direction scaled by sqrt(degree + tau) is an
    eigenvector with eigenvalue 1.
    """

    def __init__(self, graph, tau):
        if tau < 0:
            raise SpeclusterError("tau must be non-negative")
        if tau == 0 and graph.degrees.min() == 0:
            raise SingularLaplacianError(
                "graph has isolated nodes; the unregularized Laplacian is "
                "undefined there, pass tau > 0"
            )
        self.graph = graph
        self.tau = float(tau)
        self.inv_sqrt_deg = 1.0 / np.sqrt(graph.degrees + tau)
        self.shape = (graph.n, graph.n)

    def apply(self, x):
        """Full operator, with the rank-one tau J correction."""
        y = self.inv_sqrt_deg * x
        out = self.graph.adjacency @ y
        out += (self.tau / self.graph.n) * y.sum()
        return self.inv_sqrt_deg * out

    def apply_deg_variant(self, x):
        """Degree-only regularization D_tau^{-1/2} A D_tau^{-1/2}."""
        y = self.inv_sqrt_deg * x
        return self.inv_sqrt_deg * (self.graph.adjacency @ y)

    matvec = apply

    def to_dense(self):
        a = self.graph.adjacency.toarray()
        a += self.tau / self.graph.n
        return self.inv_sqrt_deg[:, None] * a * self.inv_sqrt_deg[None, :]


@dataclass(frozen=True)
class EigenBasis:
    """Top eigenpairs: descending eigenvalues, orthonormal vector columns.

    Row i of vectors is the spectral embedding of node i.  residuals holds
    ||Op v - lambda v|| for each retained pair.
    """

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray


def _fix_signs(vectors):
    """Make each column's largest-magnitude entry positive (ties: lowest index)."""
    out = vectors.copy()
    for col in range(out.shape[1]):
        idx = int(np.argmax(np.abs(out[:, col])))
        if out[idx, col] < 0:
            out[:, col] = -out[:, col]
    return out


def _as_matvec(obj):
    if isinstance(obj, np.ndarray):
        if obj.ndim != 2 or obj.shape[0] != obj.shape[1]:
            raise SpeclusterError("expected a square matrix")
        return (lambda x: obj @ x), obj.shape[0]
    for name in ("apply", "matvec"):
        fn = getattr(obj, name, None)
        if callable(fn):
            return fn, obj.shape[0]
    raise SpeclusterError(f"cannot interpret {type(obj).__name__} as a linear operator")


def _materialize(op):
    if isinstance(op, np.ndarray):
        return op
    dense_fn = getattr(op, "to_dense", None)
    if callable(dense_fn):
        return dense_fn()
    mv, n = _as_matvec(op)
    cols = np.empty((n, n))
    eye = np.eye(n)
    for i in range(n):
        cols[:, i] = mv(eye[:, i])
    return cols


def _lanczos(mv, n, k, tol, max_dim, seed):
    rng = rng_from(seed)
    dim0 = min(n, max(2 * k + 10, 40))
    max_dim = min(n, max(max_dim, dim0))

    q_basis = np.zeros((n, max_dim))
    alphas = np.zeros(max_dim)
    betas = np.zeros(max_dim)  # betas[j] couples q_j and q_{j+1}

    q = rng.standard_normal(n)
    q /= np.linalg.norm(q)
    q_basis[:, 0] = q
    j = 0
    target = dim0

    def ritz(dim):
        t = np.diag(alphas[:dim]) + np.diag(betas[: dim - 1], 1) + np.diag(betas[: dim - 1], -1)
        vals, vecs = np.linalg.eigh(t)
        order = np.argsort(vals)[::-1][:k]
        return vals[order], q_basis[:, :dim] @ vecs[:, order]

    while True:
        while j < target:
            u = mv(q_basis[:, j])
            alphas[j] = q_basis[:, j] @ u
            r = u - alphas[j] * q_basis[:, j]
            if j > 0:
                r -= betas[j - 1] * q_basis[:, j - 1]
            # full reorthogonalization, applied twice for stability
            for _ in range(2):
                r -= q_basis[:, : j + 1] @ (q_basis[:, : j + 1].T @ r)
            beta = np.linalg.norm(r)
            if j + 1 == max_dim or j + 1 == n:
                j += 1
                break
            if beta < _BREAKDOWN:
                # invariant subspace found: restart with a fresh direction
                r = rng.standard_normal(n)
                for _ in range(2):
                    r -= q_basis[:, : j + 1] @ (q_basis[:, : j + 1].T @ r)
                nrm = np.linalg.norm(r)
                if nrm < _BREAKDOWN:
                    j += 1
                    break
                betas[j] = 0.0
                q_basis[:, j + 1] = r / nrm
            else:
                betas[j] = beta
                q_basis[:, j + 1] = r / beta
            j += 1

        dim = j
        vals, vecs = ritz(dim)
        res = np.array([np.linalg.norm(mv(vecs[:, i]) - vals[i] * vecs[:, i]) for i in range(vals.size)])
        if vals.size >= k and np.all(res <= tol):
            return vals, vecs, res
        if dim >= max_dim or dim >= n:
            raise ConvergenceError(
                f"Lanczos did not reach tol={tol} within Krylov dimension {dim}",
                residuals=res,
            )
        target = min(max_dim, dim + 20)


def top_eigenpairs(op, k, tol=1e-8, max_iter=300, seed=0, dense_threshold=DENSE_FALLBACK):
    """K algebraically-largest eigenpairs of a symmetric operator.

    Uses dense symmetric eigendecomposition for small operators and
    restart-free Lanczos with full reorthogonalization otherwise.  The
    Krylov basis starts at max(2K + 10, 40) vectors and is extended until
    every retained pair has residual below tol; max_iter caps the basis
    size.  Deterministic given seed.
    """
    mv, n = _as_matvec(op)
    if k < 1 or k > n:
        raise SpeclusterError(f"k={k} out of range for operator of size {n}")

    if n <= dense_threshold:
        dense = _materialize(op)
        vals, vecs = np.linalg.eigh(dense)
        vals = vals[::-1][:k].copy()
        vecs = vecs[:, ::-1][:, :k].copy()
        res = np.array([np.linalg.norm(mv(vecs[:, i]) - vals[i] * vecs[:, i]) for i in range(k)])
        return EigenBasis(values=vals, vectors=_fix_signs(vecs), residuals=res)

    vals, vecs, res = _lanczos(mv, n, k, tol, max_iter, seed)
    return EigenBasis(values=vals, vectors=_fix_signs(vecs), residuals=res)


def spectral_norm_diff(op_a, op_b, tol=1e-6, max_iter=400, seed=0):
    """Largest |eigenvalue| of the difference of two symmetric operators.

    Accepts dense arrays or matrix-free operators; the difference is only
    ever applied to vectors.  The extreme eigenvalues at both ends of the
    spectrum are located by restart-free Lanczos (plain power iteration
    stalls without a certificate when the top of the noise spectrum is
    nearly tied); the iteration stops once the winning end's Ritz residual
    certifies the requested relative accuracy.  max_iter caps the Krylov
    dimension.
    """
    mv_a, n_a = _as_matvec(op_a)
    mv_b, n_b = _as_matvec(op_b)
    if n_a != n_b:
        raise SpeclusterError("operator dimensions differ")
    n = n_a
    mv = lambda v: mv_a(v) - mv_b(v)
    rng = rng_from(seed)

    max_dim = min(n, max_iter)
    q_basis = np.zeros((n, max_dim))
    alphas = np.zeros(max_dim)
    betas = np.zeros(max_dim)
    q = rng.standard_normal(n)
    q /= np.linalg.norm(q)
    y = mv(q)
    if np.linalg.norm(y) < 1e-300:
        return 0.0
    q_basis[:, 0] = q
    j = 0
    estimate = 0.0
    target = min(max_dim, 12)
    while True:
        while j < target:
            u = mv(q_basis[:, j])
            alphas[j] = q_basis[:, j] @ u
            r = u - alphas[j] * q_basis[:, j]
            if j > 0:
                r -= betas[j - 1] * q_basis[:, j - 1]
            for _ in range(2):
                r -= q_basis[:, : j + 1] @ (q_basis[:, : j + 1].T @ r)
            beta = np.linalg.norm(r)
            j += 1
            if j == max_dim or j == n:
                break
            if beta < _BREAKDOWN:
                r = rng.standard_normal(n)
                for _ in range(2):
                    r -= q_basis[:, :j] @ (q_basis[:, :j].T @ r)
                nrm = np.linalg.norm(r)
                if nrm < _BREAKDOWN:
                    break
                betas[j - 1] = 0.0
                q_basis[:, j] = r / nrm
            else:
                betas[j - 1] = beta
                q_basis[:, j] = r / beta
        dim = j
        t = np.diag(alphas[:dim]) + np.diag(betas[: dim - 1], 1) + np.diag(betas[: dim - 1], -1)
        vals, vecs = np.linalg.eigh(t)
        side = int(np.argmax(np.abs(vals[[0, -1]])))
        idx = 0 if side == 0 else dim - 1
        estimate = float(np.abs(vals[idx]))
        # Ritz residual of the winning extreme pair
        tail = betas[dim - 1] if dim < max_dim else 0.0
        resid = abs(tail * vecs[dim - 1, idx]) if dim < n else 0.0
        vec = q_basis[:, :dim] @ vecs[:, idx]
        resid = np.linalg.norm(mv(vec) - vals[idx] * vec)
        if resid <= tol * max(estimate, 1e-300) or dim >= n:
            return estimate
        if dim >= max_dim:
            raise ConvergenceError(
                f"norm estimate did not certify tol={tol} within Krylov dimension {dim}",
                estimate=estimate,
            )
        target = min(max_dim, dim + 12)


def frobenius_norm_diff(a, b, chunk=4096):
    """Frobenius norm of (a - b), accumulated row-block by row-block."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise SpeclusterError("shape mismatch")
    total = 0.0
    for r0 in range(0, a.shape[0], chunk):
        d = a[r0 : r0 + chunk] - b[r0 : r0 + chunk]
        total += float((d * d).sum())
    return np.sqrt(total)


def save_eigenbasis(basis, path):
    """CSV form: one header row of eigenvalues, then one row per node."""
    with open(path, "w") as fh:
        fh.write(",".join(repr(float(v)) for v in basis.values) + "\n")
        for row in basis.vectors:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def load_eigenbasis(path):
    with open(path) as fh:
        values = np.asarray([float(v) for v in fh.readline().split(",")])
        vectors = np.loadtxt(fh, delimiter=",", ndmin=2)
    if vectors.shape[1] != values.size:
        raise SpeclusterError("eigenbasis file is inconsistent")
    residuals = np.full(values.size, np.nan)
    return EigenBasis(values=values, vectors=vectors, residuals=residuals)
