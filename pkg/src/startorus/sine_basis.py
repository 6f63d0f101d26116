r"""Trigonometric basis of sl(N, C) from clock and shift matrices.

With w = exp(2 pi i / N) and the fixed branch sqrt(w) = exp(i pi / N),

    S = sqrt(w) * diag(1, w, ..., w^(N-1)),        T = cyclic shift, T[N-1,0] = -1,
    L_m = (i N / 2 pi) * exp(i pi m1 m2 / N) * S^m1 T^m2,

so that T S = w S T and S^N = T^N = -1.  Negative powers use unitarity.
The family is N^2-periodic in m up to signs and closes under products,

    L_m L_n = (i N / 2 pi) exp(i pi (n x m)/N) L_{m+n},   n x m = n1 m2 - n2 m1,

which gives the commutators [L_mu, L_nu] = (N/pi) sin(pi/N mu x nu) L_{mu+nu}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from math import lgamma  # noqa: F401  (kept nearby for tail estimates elsewhere)

import numpy as np

__all__ = [
    "clock_matrix",
    "shift_matrix",
    "basis_matrix",
    "fold_mode",
    "fundamental_window",
    "structure_constant",
    "verify_basis_properties",
    "BasisPropertyReport",
    "su_n_basis",
    "SuNBasisElement",
    "matrix_to_json",
    "matrix_from_json",
]


def clock_matrix(n: int) -> np.ndarray:
    """S = exp(i pi/n) * diag(1, w, ..., w^(n-1)), w = exp(2 pi i/n)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    k = np.arange(n)
    return np.exp(1j * np.pi / n) * np.diag(np.exp(2j * np.pi * k / n))


def shift_matrix(n: int) -> np.ndarray:
    """Cyclic shift with a -1 in the wrap-around corner, so T^n = -1."""
    if n < 2:
        raise ValueError("n must be >= 2")
    t = np.zeros((n, n), dtype=np.complex128)
    t[np.arange(n - 1), np.arange(1, n)] = 1.0
    t[n - 1, 0] = -1.0
    return t


def _unitary_power(m: np.ndarray, k: int) -> np.ndarray:
    if k >= 0:
        return np.linalg.matrix_power(m, k)
    return np.linalg.matrix_power(m.conj().T, -k)


@lru_cache(maxsize=None)
def _basis_cached(n: int, m1: int, m2: int):
    s = clock_matrix(n)
    t = shift_matrix(n)
    phase = np.exp(1j * np.pi * m1 * m2 / n)
    mat = (1j * n / (2.0 * np.pi)) * phase * (_unitary_power(s, m1) @ _unitary_power(t, m2))
    mat.setflags(write=False)
    return mat


def basis_matrix(n: int, m1: int, m2: int) -> np.ndarray:
    """L_(m1, m2) as an n x n array; any integer indices are accepted."""
    return _basis_cached(n, int(m1), int(m2))


def fold_mode(n: int, m1: int, m2: int):
    """Reduce m into the fundamental window [0, n)^2.

    Returns ((mu1, mu2), sign) with L_m = sign * L_mu, sign = +-1 from the
    periodicity rule L_{mu + n r} = (-1)^((mu1+1) r2 + (mu2+1) r1 + n r1 r2) L_mu.
    """
    mu1 = m1 % n
    mu2 = m2 % n
    r1 = (m1 - mu1) // n
    r2 = (m2 - mu2) // n
    exponent = (mu1 + 1) * r2 + (mu2 + 1) * r1 + n * r1 * r2
    return (mu1, mu2), (-1 if exponent % 2 else 1)


def fundamental_window(n: int):
    """Lexicographic list of mu in [0, n)^2 with mu != (0, 0)."""
    return [(a, b) for a in range(n) for b in range(n) if (a, b) != (0, 0)]


def structure_constant(n: int, mu, nu) -> float:
    """(n/pi) sin(pi/n * (mu1 nu2 - mu2 nu1))."""
    cross = mu[0] * nu[1] - mu[1] * nu[0]
    return (n / np.pi) * np.sin(np.pi * cross / n)


@dataclass
class BasisPropertyReport:
    """Deviations, one entry per algebraic property of the L family.

    deviations holds max-abs entrywise errors keyed by property name;
    det_rel_dev is the relative error of the determinant closed form
    (-1)^(n(m1+m2) + m1 m2) (i n / 2 pi)^n.  The naive variant that scales
    the m1*m2 term by n as well fails for even n at odd m1*m2, which is
    recorded separately in det_rel_dev_naive for transparency.
    """

    n: int
    deviations: dict
    det_rel_dev: float
    det_rel_dev_naive: float
    tol: float
    det_rtol: float

    @property
    def passed(self) -> bool:
        return (
            all(v <= self.tol for v in self.deviations.values())
            and self.det_rel_dev <= self.det_rtol
        )

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "passed": self.passed,
            "tol": self.tol,
            "det_rtol": self.det_rtol,
            "det_rel_dev": self.det_rel_dev,
            "det_rel_dev_naive": self.det_rel_dev_naive,
            "determinant_ok": self.det_rel_dev <= self.det_rtol,
        }
        for k, v in sorted(self.deviations.items()):
            out[k] = float(v)
            out[f"{k}_ok"] = bool(v <= self.tol)
        return out


def det_closed_form(n: int, m1: int, m2: int) -> complex:
    """det L_m = (-1)^(n (m1 + m2) + m1 m2) * (i n / 2 pi)^n."""
    sign = -1.0 if (n * (m1 + m2) + m1 * m2) % 2 else 1.0
    return sign * (1j * n / (2.0 * np.pi)) ** n


def verify_basis_properties(
    n: int,
    shift_range: int = 2,
    tol: float = 1e-11,
    det_rtol: float = 1e-10,
) -> BasisPropertyReport:
    """Check the defining algebraic properties of the L_m family.

    Covers: periodicity signs under m -> m + n r, tracelessness off the
    n-divisible lattice, the trace on that lattice, the product and
    commutator closure, adjoint and inverse relations (two independent
    equalities), and the determinant closed form.
    """
    window = fundamental_window(n)
    pref = 1j * n / (2.0 * np.pi)
    dev = {}

    shifts = [
        (r1, r2)
        for r1 in range(-shift_range, shift_range + 1)
        for r2 in range(-shift_range, shift_range + 1)
    ]

    d = 0.0
    for mu in window:
        base = basis_matrix(n, *mu)
        for r1, r2 in shifts:
            m = (mu[0] + n * r1, mu[1] + n * r2)
            folded, sign = fold_mode(n, *m)
            assert folded == mu
            d = max(d, np.max(np.abs(basis_matrix(n, *m) - sign * base)))
    dev["periodicity"] = d

    dev["trace_window"] = max(abs(np.trace(basis_matrix(n, *mu))) for mu in window)

    d = 0.0
    for r1, r2 in shifts:
        sign = -1.0 if (r1 + r2 + n * r1 * r2) % 2 else 1.0
        expected = sign * 1j * n * n / (2.0 * np.pi)
        d = max(d, abs(np.trace(basis_matrix(n, n * r1, n * r2)) - expected))
    dev["trace_lattice"] = d

    d_prod = 0.0
    d_comm = 0.0
    for mu in window:
        lmu = basis_matrix(n, *mu)
        for nu in window:
            lnu = basis_matrix(n, *nu)
            total = basis_matrix(n, mu[0] + nu[0], mu[1] + nu[1])
            cross = nu[0] * mu[1] - nu[1] * mu[0]
            phase = np.exp(1j * np.pi * cross / n)
            d_prod = max(d_prod, np.max(np.abs(lmu @ lnu - pref * phase * total)))
            comm = lmu @ lnu - lnu @ lmu
            d_comm = max(
                d_comm,
                np.max(np.abs(comm - structure_constant(n, mu, nu) * total)),
            )
    dev["product"] = d_prod
    dev["commutator"] = d_comm

    d_adj = 0.0
    d_inv = 0.0
    for mu in window:
        lmu = basis_matrix(n, *mu)
        adj = lmu.conj().T
        d_adj = max(d_adj, np.max(np.abs(adj + basis_matrix(n, -mu[0], -mu[1]))))
        d_inv = max(
            d_inv,
            np.max(np.abs(adj - (n / (2.0 * np.pi)) ** 2 * np.linalg.inv(lmu))),
        )
    dev["adjoint"] = d_adj
    dev["inverse"] = d_inv

    d_det = 0.0
    d_naive = 0.0
    for mu in window:
        det = np.linalg.det(basis_matrix(n, *mu))
        expect = det_closed_form(n, *mu)
        naive_sign = -1.0 if (n * (mu[0] + mu[1] + mu[0] * mu[1])) % 2 else 1.0
        naive = naive_sign * pref**n
        d_det = max(d_det, abs(det - expect) / abs(expect))
        d_naive = max(d_naive, abs(det - naive) / abs(naive))
    return BasisPropertyReport(
        n=n,
        deviations={k: float(v) for k, v in dev.items()},
        det_rel_dev=float(d_det),
        det_rel_dev_naive=float(d_naive),
        tol=tol,
        det_rtol=det_rtol,
    )


@dataclass
class SuNBasisElement:
    """One anti-hermitian combination of window matrices."""

    n_dim: int
    label: str
    matrix: np.ndarray


def su_n_basis(n: int) -> list:
    """Anti-hermitian basis of su(n) built from window pairs mu, -mu.

    For each window mode mu with partner mub = (-mu) mod n and sign c
    defined by L_{-mu} = c * L_{mub}, the combinations

        (1/2)  (L_mu + c L_mub)     and     (1/2i) (L_mu - c L_mub)

    are anti-hermitian; self-paired modes contribute whichever of the two
    survives.  Exactly n^2 - 1 elements come out.
    """
    elements = []
    for mu in fundamental_window(n):
        mub, c = fold_mode(n, -mu[0], -mu[1])
        if mub < mu:
            continue  # handled when mub came up first
        lmu = basis_matrix(n, *mu)
        if mub == mu:
            if c == 1:
                elements.append(SuNBasisElement(n, f"sym{mu}", lmu.copy()))
            else:
                elements.append(SuNBasisElement(n, f"asym{mu}", (lmu / 1j).copy()))
            continue
        lmub = basis_matrix(n, *mub)
        elements.append(SuNBasisElement(n, f"sym{mu}", 0.5 * (lmu + c * lmub)))
        elements.append(SuNBasisElement(n, f"asym{mu}", (0.5 / 1j) * (lmu - c * lmub)))
    assert len(elements) == n * n - 1
    return elements


def matrix_to_json(mat: np.ndarray) -> str:
    mat = np.asarray(mat, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("expected a square matrix")
    return json.dumps(
        {
            "n": mat.shape[0],
            "re": [[float(v) for v in row] for row in mat.real],
            "im": [[float(v) for v in row] for row in mat.imag],
        },
        sort_keys=True,
    )


def matrix_from_json(text: str) -> np.ndarray:
    data = json.loads(text)
    re = np.asarray(data["re"], dtype=np.float64)
    im = np.asarray(data["im"], dtype=np.float64)
    if re.shape != (data["n"], data["n"]) or im.shape != re.shape:
        raise ValueError("matrix payload shape mismatch")
    return re + 1j * im
