"""Classical scattered-data interpolation with radial basis functions.

Given sites x_1..x_m and values y, the interpolant is
f(x) = sum_j c_j phi(||x - x_j||) with coefficients solving the
symmetric system A c = y, A_ij = phi(||x_i - x_j||).

Two matrix conventions are supported.  The raw convention stores A as
written above.  The normalized convention divides both A and y by m, so
the matrix has unit-bounded spectrum for unit-diagonal kernels and trace
equal to phi(0); the coefficient vector is unchanged because the scaling
cancels.  Quantum-facing code works in the normalized convention.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.sparse import coo_array
from scipy.sparse.linalg import cg
from scipy.spatial import cKDTree

from .kernels import Kernel


def pair_distance(a, b):
    """Euclidean distance along the last axis.

    Used for every site-to-site and site-to-query distance in the
    package so that scalar, batched, and matrix evaluations share one
    floating-point path and agree bit for bit.
    """
    diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return np.sqrt(np.add.reduce(diff * diff, axis=-1))


@dataclass
class DataSet:
    """Scattered sites (m, d), target values (m,), and cached site norms."""

    sites: np.ndarray
    values: np.ndarray
    site_norms: np.ndarray | None = None

    def __post_init__(self):
        self.sites = np.atleast_2d(np.asarray(self.sites, dtype=float))
        self.values = np.asarray(self.values, dtype=float).ravel()
        if self.sites.shape[0] != self.values.shape[0]:
            raise ValueError("sites and values disagree on the number of points")
        if self.sites.shape[0] == 0:
            raise ValueError("empty dataset")
        uniq = np.unique(self.sites, axis=0)
        if uniq.shape[0] != self.sites.shape[0]:
            raise ValueError("sites must be pairwise distinct")
        norms = np.linalg.norm(self.sites, axis=1)
        if self.site_norms is None:
            self.site_norms = norms
        else:
            self.site_norms = np.asarray(self.site_norms, dtype=float).ravel()
            if self.site_norms.shape != norms.shape or not np.allclose(
                self.site_norms, norms, rtol=1e-12, atol=1e-14
            ):
                raise ValueError("provided site_norms disagree with the sites")

    @property
    def m(self) -> int:
        return self.sites.shape[0]

    @property
    def d(self) -> int:
        return self.sites.shape[1]


def save_dataset(dataset: DataSet, path) -> None:
    """Write sites and values as CSV with header x1..xd,y.

    Floats are written with repr so a reload is bit-exact and reruns are
    byte-identical.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i + 1}" for i in range(dataset.d)] + ["y"])
        for row, y in zip(dataset.sites, dataset.values):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(y))])


def load_dataset(path) -> DataSet:
    """Read a dataset CSV written by `save_dataset` (header x1..xd,y)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[-1] != "y" or any(h != f"x{i + 1}" for i, h in enumerate(header[:-1])):
            raise ValueError(f"unexpected dataset header {header}")
        rows = [[float(v) for v in row] for row in reader if row]
    arr = np.asarray(rows, dtype=float)
    return DataSet(sites=arr[:, :-1], values=arr[:, -1])


@dataclass
class InterpMatrix:
    """Interpolation matrix plus bookkeeping.

    data is a dense ndarray or a CSR array (compact kernels); sparsity is
    the maximum number of nonzeros in any row, counting the diagonal.
    """

    data: object
    normalized: bool
    family: str
    sparsity: int | None = None
    spectrum_cache: object = field(default=None, repr=False, compare=False)

    @property
    def is_sparse(self) -> bool:
        return not isinstance(self.data, np.ndarray)

    @property
    def m(self) -> int:
        return self.data.shape[0]

    def toarray(self) -> np.ndarray:
        return self.data.toarray() if self.is_sparse else self.data


def _as_matrix_data(matrix):
    return matrix.data if isinstance(matrix, InterpMatrix) else np.asarray(matrix, dtype=float)


def save_matrix(matrix, path) -> None:
    """Write a matrix as CSV.

    Dense input becomes a plain m x m grid of repr floats, one matrix
    row per line.  Sparse input becomes coordinate triples under a
    row,col,value header, stored entries only, row-major order.  repr
    keeps the export bit-exact on reload, matching `save_dataset`.
    """
    data = _as_matrix_data(matrix)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if isinstance(data, np.ndarray):
            for row in data:
                writer.writerow([repr(float(v)) for v in row])
        else:
            coo = data.tocoo()
            order = np.lexsort((coo.col, coo.row))
            writer.writerow(["row", "col", "value"])
            for i in order:
                writer.writerow([int(coo.row[i]), int(coo.col[i]), repr(float(coo.data[i]))])


def assemble(
    dataset: DataSet,
    kernel: Kernel,
    normalized: bool = False,
    override_pd: bool = False,
    storage: str = "auto",
) -> InterpMatrix:
    """Assemble the interpolation matrix for a dataset and kernel.

    Compact kernels are stored as CSR with only the pairs inside the
    support radius (storage="dense" forces a dense matrix for
    cross-checks); global kernels are always dense.  Kernels that are not
    positive definite are refused unless override_pd is set.
    """
    if not kernel.positive_definite and not override_pd:
        raise ValueError(
            f"{kernel.family} is not positive definite; pass override_pd=True to assemble anyway"
        )
    if storage not in ("auto", "dense", "sparse"):
        raise ValueError(f"unknown storage mode {storage!r}")
    if storage == "sparse" and not kernel.is_compact:
        raise ValueError("sparse storage only applies to compact kernels")
    m = dataset.m
    scale = 1.0 / m if normalized else 1.0

    if kernel.is_compact and storage != "dense":
        tree = cKDTree(dataset.sites)
        pairs = tree.query_pairs(kernel.alpha, output_type="ndarray")
        if pairs.size:
            dist = pair_distance(dataset.sites[pairs[:, 0]], dataset.sites[pairs[:, 1]])
            vals = kernel.eval(dist)
            keep = vals != 0.0  # drop the support boundary, phi is exactly 0 there
            pairs, vals = pairs[keep], vals[keep]
        else:
            pairs = pairs.reshape(0, 2)
            vals = np.zeros(0)
        diag = np.full(m, kernel.phi0)
        rows = np.concatenate([pairs[:, 0], pairs[:, 1], np.arange(m)])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0], np.arange(m)])
        data = np.concatenate([vals, vals, diag]) * scale
        mat = coo_array((data, (rows, cols)), shape=(m, m)).tocsr()
        mat.sort_indices()
        sparsity = int(np.max(np.diff(mat.indptr)))
        return InterpMatrix(data=mat, normalized=normalized, family=kernel.family, sparsity=sparsity)

    dist = pair_distance(dataset.sites[:, None, :], dataset.sites[None, :, :])
    mat = kernel.eval(dist) * scale
    if kernel.is_compact:
        sparsity = int(np.max(np.count_nonzero(mat, axis=1)))
    else:
        sparsity = m
    return InterpMatrix(data=mat, normalized=normalized, family=kernel.family, sparsity=sparsity)


@dataclass
class Coefficients:
    """Solution of the interpolation system.

    residual is the maximum over sites of |f(x_j) - y_j| in the raw
    convention, regardless of which convention the system was solved in.
    """

    c: np.ndarray
    norm: float
    residual: float
    rel_residual: float


def solve(matrix: InterpMatrix, y) -> Coefficients:
    """Solve A c = y by Cholesky (dense) or conjugate gradients (sparse)."""
    y = np.asarray(y, dtype=float).ravel()
    A = _as_matrix_data(matrix)
    if A.shape[0] != y.shape[0]:
        raise ValueError("matrix and right-hand side sizes disagree")
    m = y.shape[0]
    sparse = not isinstance(A, np.ndarray)
    if sparse:
        c, info = cg(A, y, rtol=1e-12, atol=0.0, maxiter=max(10 * m, 200))
        if info != 0:
            raise RuntimeError(f"conjugate gradient did not converge (info={info})")
    else:
        try:
            c = cho_solve(cho_factor(A), y)
        except np.linalg.LinAlgError as exc:
            w = np.linalg.eigvalsh(A)
            raise ValueError(
                f"matrix is not positive definite (smallest eigenvalue {w[0]:.6e})"
            ) from exc
    res = A @ c - y
    ynorm = np.linalg.norm(y)
    rel = float(np.linalg.norm(res) / ynorm) if ynorm > 0 else float(np.linalg.norm(res))
    site_res = float(np.max(np.abs(res)))
    if isinstance(matrix, InterpMatrix) and matrix.normalized:
        site_res *= m  # raw-convention residual: the 1/m scaling cancels in c but not in A c - y
    return Coefficients(c=c, norm=float(np.linalg.norm(c)), residual=site_res, rel_residual=rel)


def _coeff_vector(coeffs) -> np.ndarray:
    return coeffs.c if isinstance(coeffs, Coefficients) else np.asarray(coeffs, dtype=float)


def evaluate(coeffs, dataset: DataSet, kernel: Kernel, x) -> float:
    """Evaluate the interpolant at a single point x of matching dimension."""
    c = _coeff_vector(coeffs)
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != dataset.d:
        raise ValueError(f"query point has dimension {x.shape[0]}, expected {dataset.d}")
    r = pair_distance(dataset.sites, x)
    if kernel.is_compact:
        mask = r < kernel.alpha
        if not np.any(mask):
            return 0.0
        return float(np.dot(c[mask], kernel.eval(r[mask])))
    return float(np.dot(c, kernel.eval(r)))


def evaluate_many(coeffs, dataset: DataSet, kernel: Kernel, points) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return np.array([evaluate(coeffs, dataset, kernel, x) for x in points])


def basis_vector(dataset: DataSet, kernel: Kernel, x) -> np.ndarray:
    """Vector of kernel values (phi(||x - x_j||))_j at a query point."""
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != dataset.d:
        raise ValueError(f"query point has dimension {x.shape[0]}, expected {dataset.d}")
    r = pair_distance(dataset.sites, x)
    return np.asarray(kernel.eval(r), dtype=float)


@dataclass
class Spectrum:
    lambda_max: float
    lambda_min: float
    kappa: float
    eigenvalues: np.ndarray


def spectrum(matrix) -> Spectrum:
    """Eigenvalue range and condition number of a (symmetric) matrix.

    kappa is lambda_max / lambda_min, reported as inf when the smallest
    eigenvalue is not positive.  Results are cached on InterpMatrix.
    """
    if isinstance(matrix, InterpMatrix) and matrix.spectrum_cache is not None:
        return matrix.spectrum_cache
    A = _as_matrix_data(matrix)
    dense = A.toarray() if not isinstance(A, np.ndarray) else A
    w = np.linalg.eigvalsh(dense)
    lam_min, lam_max = float(w[0]), float(w[-1])
    kappa = lam_max / lam_min if lam_min > 0 else math.inf
    spec = Spectrum(lambda_max=lam_max, lambda_min=lam_min, kappa=kappa, eigenvalues=w)
    if isinstance(matrix, InterpMatrix):
        if matrix.normalized and matrix.family == "gaussian" and lam_max > 1.0 + 1e-12:
            raise ValueError(
                f"normalized gaussian matrix has lambda_max = {lam_max}; expected <= 1"
            )
        matrix.spectrum_cache = spec
    return spec


@dataclass
class PerturbationReport:
    """Measured perturbation effects against their a-priori bounds.

    Inverse side: || (A+E)^-1 - A^-1 || <= ||E|| ||A^-1||^2 / (1 - r)
    with r = ||A^-1 E|| < 1 (spectral norms); skipped when r >= 1.
    Eigenvalue side: every sorted eigenvalue moves by at most ||E||_2.
    """

    contraction: float
    inverse_bound: float
    inverse_measured: float
    inverse_ok: bool
    inverse_skipped: bool
    eig_shift_bound: float
    eig_shift_measured: float
    eig_shift_ok: bool


def perturbation_check(A, E) -> PerturbationReport:
    A = np.asarray(_as_matrix_data(A), dtype=float)
    A = A.toarray() if not isinstance(A, np.ndarray) else A
    E = np.asarray(E, dtype=float)
    if A.shape != E.shape or A.shape[0] != A.shape[1]:
        raise ValueError("A and E must be square matrices of the same shape")
    try:
        A_inv = np.linalg.inv(A)
    except np.linalg.LinAlgError as exc:
        raise ValueError("A must be nonsingular") from exc

    r = float(np.linalg.norm(A_inv @ E, 2))
    if r < 1.0:
        bound = float(np.linalg.norm(E, 2) * np.linalg.norm(A_inv, 2) ** 2 / (1.0 - r))
        measured = float(np.linalg.norm(np.linalg.inv(A + E) - A_inv, 2))
        inv_ok = measured <= bound * (1.0 + 1e-12)
        skipped = False
    else:
        bound = math.inf
        measured = math.nan
        inv_ok = True
        skipped = True

    shift_bound = float(np.linalg.norm(E, 2))
    wA = np.linalg.eigvalsh(A)
    wAE = np.linalg.eigvalsh(A + E)
    shift = float(np.max(np.abs(wAE - wA)))
    return PerturbationReport(
        contraction=r,
        inverse_bound=bound,
        inverse_measured=measured,
        inverse_ok=inv_ok,
        inverse_skipped=skipped,
        eig_shift_bound=shift_bound,
        eig_shift_measured=shift,
        eig_shift_ok=shift <= shift_bound * (1.0 + 1e-12) + 1e-15,
    )
