r"""Projection of torus mode fields onto the finite matrix algebra.

chi_n sends the mode E_m to the window matrix sign(m) * L_{m mod n} and
drops every mode with m = 0 modulo n in both slots.  At the matched
deformation value hbar = 2 pi / n it intertwines the mode bracket with the
matrix commutator:

    chi_n({f, g}_{2 pi / n}) = [chi_n f, chi_n g].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fourier import FourierField, moyal_bracket
from .grids import GriddedFourierField, SpacetimeGrid
from .sine_basis import basis_matrix, fold_mode

__all__ = [
    "matched_hbar",
    "chi_project",
    "chi_project_gridded",
    "MatrixField",
    "commutator_defect",
]


def matched_hbar(n: int) -> float:
    """Deformation value 2 pi / n at which folding respects brackets."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return 2.0 * np.pi / n


def chi_project(field: FourierField, n: int) -> np.ndarray:
    """Fold a mode field into an n x n matrix.

    Modes congruent to (0, 0) mod n are annihilated; every other mode m
    lands on its window representative with the periodicity sign.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    acc = np.zeros((n, n), dtype=np.complex128)
    for (m1, m2), coeff in field.items():
        mu, sign = fold_mode(n, m1, m2)
        if mu == (0, 0):
            continue
        acc += (sign * coeff) * basis_matrix(n, *mu)
    return acc


@dataclass
class MatrixField:
    """Matrix-valued samples over a spacetime grid.

    values has shape grid.shape + (n_dim, n_dim).
    """

    grid: SpacetimeGrid
    values: np.ndarray
    n_dim: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        expected = self.grid.shape + (self.n_dim, self.n_dim)
        if self.values.shape != expected:
            raise ValueError(
                f"values shape {self.values.shape} does not match {expected}"
            )

    def anti_hermitian_defect(self) -> float:
        """sup-norm of values + values^dagger over the grid."""
        swap = self.values.conj().swapaxes(-1, -2)
        return float(np.max(np.abs(self.values + swap))) if self.values.size else 0.0

    def trace_defect(self) -> float:
        tr = np.trace(self.values, axis1=-2, axis2=-1)
        return float(np.max(np.abs(tr))) if tr.size else 0.0


def chi_project_gridded(field: GriddedFourierField, n: int, hbar_tol: float = 1e-12) -> MatrixField:
    """Fold every node of a gridded mode field at the matched hbar.

    Refuses fields whose deformation value is not 2 pi / n, since folding
    only commutes with the bracket at the matched value.
    """
    target = matched_hbar(n)
    if abs(field.hbar - target) > hbar_tol:
        raise ValueError(
            f"gridded field carries hbar={field.hbar!r}, expected 2*pi/{n}={target!r}"
        )
    shape = field.grid.shape
    out = np.zeros(shape + (n, n), dtype=np.complex128)
    flat = out.reshape(-1, n, n)
    for idx, f in enumerate(field.values.reshape(-1)):
        flat[idx] = chi_project(f, n)
    return MatrixField(field.grid, out, n)


def commutator_defect(f: FourierField, g: FourierField, n: int) -> float:
    """Max-abs entry of chi_n({f, g}_{2 pi/n}) - [chi_n f, chi_n g]."""
    hbar = matched_hbar(n)
    lhs = chi_project(moyal_bracket(f, g, hbar), n)
    pf = chi_project(f, n)
    pg = chi_project(g, n)
    rhs = pf @ pg - pg @ pf
    return float(np.max(np.abs(lhs - rhs)))
