r"""Finite-rank chiral fields obtained by folding the deformed wave solution.

At the matched deformation hbar = 2 pi / n the torus solution folds to an
anti-hermitian n x n field

    vartheta(w, z) = lead + w * w_mat + sum_j c_j(z) * M_j,

where every coefficient c_j is a signed sum of Bessel integrals

    I_ell(x) = int_0^x J_ell(t) dt,   x = z * sigma,   sigma = (n/pi) sin(pi/n),

and the M_j are fixed anti-hermitian combinations of window basis matrices.
The field solves vartheta_ww + vartheta_zz + [vartheta_w, vartheta_z] = 0
and encodes a principally embedded chiral model whose n -> infinity limit
recovers the torus solution at quadratic rate in 1/n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import jv

from .fourier import FourierField
from .grids import SpacetimeGrid
from .master_equation import ResidualReport, _report, freq_factor
from .projection import MatrixField, matched_hbar
from .sine_basis import basis_matrix

__all__ = [
    "bessel_integral",
    "BesselCoefficient",
    "ChiralModel",
    "chiral_model",
    "ExpansionResult",
    "fourier_expansion_theta",
    "residual_chiral",
    "chiral_system_check",
    "ConvergenceReport",
    "convergence_study",
    "BesselIdentityReport",
    "bessel_identity_check",
]


@lru_cache(maxsize=None)
def bessel_integral(ell: int, x: float) -> float:
    """I_ell(x) = int_0^x J_ell(t) dt by adaptive quadrature."""
    if x == 0.0:
        return 0.0
    val, _ = quad(lambda t: jv(ell, t), 0.0, x, epsabs=1e-13, epsrel=1e-12, limit=300)
    return float(val)


def _i_bound(ell: int, x: float) -> float:
    """Crude but safe bound on |I_ell(x)| for truncation decisions."""
    ax = abs(x)
    if ax == 0.0:
        return 0.0
    if ell <= ax + 1.0:
        return ax  # |J_ell| <= 1
    # |J_ell(t)| <= (t/2)^ell / ell! once ell clears the argument
    log_b = (ell + 1) * math.log(ax / 2.0) - math.lgamma(ell + 2) + math.log(2.0)
    return math.exp(log_b)


class BesselCoefficient:
    """prefactor * sum_k weight(k) I_{index(k)}(z sigma), truncated safely.

    index(k) must be strictly increasing; truncation stops once the next
    term bound clears tol with a geometric safety factor.
    """

    def __init__(self, label: str, sigma: float, prefactor: float, term: Callable):
        self.label = label
        self.sigma = sigma
        self.prefactor = prefactor
        self.term = term  # k -> (weight, ell)

    def __call__(self, z: float, tol: float = 1e-13) -> float:
        x = z * self.sigma
        total = 0.0
        k = 0
        while True:
            weight, ell = self.term(k)
            total += weight * bessel_integral(ell, x)
            k += 1
            _, nxt = self.term(k)
            if nxt > abs(x) + 2.0 and 4.0 * _i_bound(nxt, x) < tol:
                break
            if k > 300:
                break
        return self.prefactor * total


def _coefficients(n: int, sigma: float):
    """Coefficient families for even and odd rank, label -> BesselCoefficient."""
    inv = 1.0 / sigma
    coefs = {}
    if n % 2 == 0:
        half = n // 2
        for nu in range(1, half + 1):
            ell0 = 2 * nu - 1
            coefs[f"a{ell0}"] = BesselCoefficient(
                f"a{ell0}",
                sigma,
                (-1.0) ** nu * inv,
                lambda k, e=ell0: ((-1.0) ** (half * k), e + n * k),
            )
        for nu in range(1, half):
            ell0 = 2 * nu
            coefs[f"a{ell0}"] = BesselCoefficient(
                f"a{ell0}",
                sigma,
                (-1.0) ** (nu + 1) * inv,
                lambda k, e=ell0: ((-1.0) ** (half * k), e + n * k),
            )
        coefs["a0"] = BesselCoefficient(
            "a0",
            sigma,
            -inv,
            lambda k: (1.0, 0) if k == 0 else (2.0 * (-1.0) ** (half * k), n * k),
        )
    else:
        half = (n - 1) // 2
        parity = (n + 1) // 2
        for nu in range(1, half + 1):
            ell_a = 2 * nu - 1
            coefs[f"a{ell_a}"] = BesselCoefficient(
                f"a{ell_a}",
                sigma,
                (-1.0) ** nu * inv,
                lambda k, e=ell_a: ((-1.0) ** k, e + 2 * n * k),
            )
            ell_b = 2 * nu
            coefs[f"a{ell_b}"] = BesselCoefficient(
                f"a{ell_b}",
                sigma,
                (-1.0) ** (nu + parity) * inv,
                lambda k, e=ell_b: ((-1.0) ** k, e + n * (2 * k + 1)),
            )
            coefs[f"b{ell_a}"] = BesselCoefficient(
                f"b{ell_a}",
                sigma,
                (-1.0) ** (nu + parity) * inv,
                lambda k, e=ell_a: ((-1.0) ** k, e + n * (2 * k + 1)),
            )
            coefs[f"b{ell_b}"] = BesselCoefficient(
                f"b{ell_b}",
                sigma,
                (-1.0) ** (nu + 1) * inv,
                lambda k, e=ell_b: ((-1.0) ** k, e + 2 * n * k),
            )
        coefs["a0"] = BesselCoefficient(
            "a0",
            sigma,
            (-1.0) ** parity * inv,
            lambda k: ((-1.0) ** k, n * (2 * k + 1)),
        )
        coefs["b0"] = BesselCoefficient(
            "b0",
            sigma,
            -inv,
            lambda k: (1.0, 0) if k == 0 else (2.0 * (-1.0) ** k, 2 * n * k),
        )
    return coefs


def _combos(n: int):
    """Matrix partner of each coefficient label, plus lead and w matrices."""
    L = lambda a, b: basis_matrix(n, a, b)  # noqa: E731
    half_i = 0.5 / 1j
    even = n % 2 == 0
    lead_sign = 1.0 if even else -1.0
    lead = (np.pi / 2.0) * 0.5 * (L(1, 1) + lead_sign * L(n - 1, n - 1))
    w_mat = -half_i * (L(0, 1) + L(0, n - 1))
    mats = {}
    if even:
        for nu in range(1, n // 2 + 1):
            ell = 2 * nu - 1
            mats[f"a{ell}"] = 0.5 * (
                L(1, ell) + L(n - 1, n - ell) + L(n - 1, ell) + L(1, n - ell)
            )
        for nu in range(1, n // 2):
            ell = 2 * nu
            mats[f"a{ell}"] = half_i * (
                L(1, ell) + L(n - 1, n - ell) + L(n - 1, ell) + L(1, n - ell)
            )
        mats["a0"] = half_i * (L(1, 0) + L(n - 1, 0))
    else:
        for nu in range(1, (n - 1) // 2 + 1):
            ell = 2 * nu - 1
            mats[f"a{ell}"] = 0.5 * (
                L(1, ell) - L(n - 1, n - ell) + L(n - 1, ell) + L(1, n - ell)
            )
            mats[f"b{ell}"] = half_i * (
                L(1, ell) + L(n - 1, n - ell) + L(1, n - ell) - L(n - 1, ell)
            )
            ell = 2 * nu
            mats[f"a{ell}"] = 0.5 * (
                L(1, ell) + L(n - 1, n - ell) + L(1, n - ell) - L(n - 1, ell)
            )
            mats[f"b{ell}"] = half_i * (
                L(1, ell) - L(n - 1, n - ell) + L(n - 1, ell) + L(1, n - ell)
            )
        mats["a0"] = L(1, 0) - L(n - 1, 0)
        mats["b0"] = half_i * (L(1, 0) + L(n - 1, 0))
    return lead, w_mat, mats


@dataclass
class ChiralModel:
    """Closed-form finite-rank field and its building blocks."""

    n: int
    sigma: float
    lead: np.ndarray
    w_mat: np.ndarray
    terms: list  # (BesselCoefficient, matrix) pairs, label-sorted

    def field_matrix(self, w: float, z: float) -> np.ndarray:
        acc = self.lead + w * self.w_mat
        for coef, mat in self.terms:
            acc = acc + coef(z) * mat
        return acc

    def matrix_field(self, grid: SpacetimeGrid) -> MatrixField:
        if grid.names != ("w", "z"):
            raise ValueError("expected a grid with axes ('w', 'z')")
        ws = grid.axis("w")
        zs = grid.axis("z")
        vals = np.zeros((ws.size, zs.size, self.n, self.n), dtype=np.complex128)
        vals += self.lead
        vals += ws[:, None, None, None] * self.w_mat
        for coef, mat in self.terms:
            cz = np.array([coef(z) for z in zs])
            vals += cz[None, :, None, None] * mat
        return MatrixField(grid, vals, self.n)


def chiral_model(n: int) -> ChiralModel:
    if n < 2:
        raise ValueError("n must be >= 2")
    sigma = freq_factor(matched_hbar(n))
    coefs = _coefficients(n, sigma)
    lead, w_mat, mats = _combos(n)
    if set(coefs) != set(mats):
        raise AssertionError("coefficient and matrix labels out of sync")
    terms = [(coefs[label], mats[label]) for label in sorted(coefs)]
    return ChiralModel(n=n, sigma=sigma, lead=lead, w_mat=w_mat, terms=terms)


@dataclass
class ExpansionResult:
    """Torus-mode expansion of the deformed solution at fixed (w, z)."""

    field: FourierField
    tail_bound: float
    band_limit: int
    hbar: float
    w: float
    z: float


def fourier_expansion_theta(hbar: float, w: float, z: float, band_limit: int) -> ExpansionResult:
    """Mode expansion with Bessel-integral coefficients.

    A_0 = -I_0(x)/s, A_{2m-1} = (-1)^m I_{2m-1}(x)/s,
    A_{2m} = (-1)^(m+1) I_{2m}(x)/s with x = z s; modes beyond band_limit
    in the second slot are dropped and bounded in the reported tail.
    """
    if band_limit < 1:
        raise ValueError("band_limit must be >= 1")
    s = freq_factor(hbar)
    x = z * s
    coeffs = {}

    def add(m, c):
        coeffs[m] = coeffs.get(m, 0.0) + c

    add((1, 1), np.pi / 4.0)
    add((-1, -1), np.pi / 4.0)
    add((0, 1), -w / 2j)
    add((0, -1), w / 2j)

    a0 = -bessel_integral(0, x) / s
    add((1, 0), a0 / 2j)
    add((-1, 0), -a0 / 2j)
    for ell in range(1, band_limit + 1):
        m = (ell + 1) // 2
        if ell % 2 == 1:
            a = ((-1.0) ** m / s) * bessel_integral(ell, x)
            for mode in ((1, ell), (1, -ell), (-1, ell), (-1, -ell)):
                add(mode, a / 2.0)
        else:
            a = ((-1.0) ** (m + 1) / s) * bessel_integral(ell, x)
            add((1, ell), a / 2j)
            add((1, -ell), a / 2j)
            add((-1, ell), -a / 2j)
            add((-1, -ell), -a / 2j)

    tail = sum(2.0 * _i_bound(ell, x) / s for ell in range(band_limit + 1, band_limit + 81))
    field = FourierField.from_dict(coeffs)
    return ExpansionResult(
        field=field, tail_bound=float(tail), band_limit=band_limit,
        hbar=float(hbar), w=float(w), z=float(z),
    )


def _frobenius(block: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(block) ** 2, axis=(-2, -1)))


def residual_chiral(field: MatrixField) -> ResidualReport:
    """Residual of vartheta_ww + vartheta_zz + [vartheta_w, vartheta_z].

    Frobenius norm per interior node; the deformation value tied to the
    rank, 2 pi / n, is recorded in the report.
    """
    grid = field.grid
    if grid.names != ("w", "z"):
        raise ValueError("expected a grid with axes ('w', 'z')")
    hw = grid.steps["w"]
    hz = grid.steps["z"]
    v = field.values
    if v.shape[0] < 3 or v.shape[1] < 3:
        raise ValueError("need at least 3 nodes per axis")
    d2w = (v[2:, 1:-1] - 2.0 * v[1:-1, 1:-1] + v[:-2, 1:-1]) / hw**2
    d2z = (v[1:-1, 2:] - 2.0 * v[1:-1, 1:-1] + v[1:-1, :-2]) / hz**2
    dw = (v[2:, 1:-1] - v[:-2, 1:-1]) / (2.0 * hw)
    dz = (v[1:-1, 2:] - v[1:-1, :-2]) / (2.0 * hz)
    res = d2w + d2z + dw @ dz - dz @ dw
    per = _frobenius(res)
    return _report(per, {"w": hw, "z": hz}, matched_hbar(field.n_dim), "chiral")


@dataclass
class SystemCheckReport:
    curvature_sup: float
    divergence_sup: float
    steps: dict


def chiral_system_check(field: MatrixField) -> SystemCheckReport:
    """First-order reformulation residuals.

    With A_w = -vartheta_z and A_z = vartheta_w the second-order equation
    splits into a zero-curvature part d_w A_z - d_z A_w + [A_w, A_z] and a
    divergence part d_w A_w + d_z A_z; both are differenced centrally.
    """
    grid = field.grid
    if grid.names != ("w", "z"):
        raise ValueError("expected a grid with axes ('w', 'z')")
    hw = grid.steps["w"]
    hz = grid.steps["z"]
    v = field.values
    if v.shape[0] < 5 or v.shape[1] < 5:
        raise ValueError("need at least 5 nodes per axis")
    a_w = -(v[1:-1, 2:] - v[1:-1, :-2]) / (2.0 * hz)
    a_z = (v[2:, 1:-1] - v[:-2, 1:-1]) / (2.0 * hw)
    daz_dw = (a_z[2:, 1:-1] - a_z[:-2, 1:-1]) / (2.0 * hw)
    daw_dz = (a_w[1:-1, 2:] - a_w[1:-1, :-2]) / (2.0 * hz)
    daw_dw = (a_w[2:, 1:-1] - a_w[:-2, 1:-1]) / (2.0 * hw)
    daz_dz = (a_z[1:-1, 2:] - a_z[1:-1, :-2]) / (2.0 * hz)
    aw_c = a_w[1:-1, 1:-1]
    az_c = a_z[1:-1, 1:-1]
    curv = daz_dw - daw_dz + aw_c @ az_c - az_c @ aw_c
    div = daw_dw + daz_dz
    return SystemCheckReport(
        curvature_sup=float(np.max(_frobenius(curv))),
        divergence_sup=float(np.max(_frobenius(div))),
        steps={"w": hw, "z": hz},
    )


@dataclass
class ConvergenceReport:
    n_values: list
    distances: list
    exponent: float

    @property
    def monotone(self) -> bool:
        return all(a > b for a, b in zip(self.distances, self.distances[1:]))

    def to_dict(self) -> dict:
        return {
            "n_values": [int(n) for n in self.n_values],
            "distances": [float(d) for d in self.distances],
            "exponent": self.exponent,
            "monotone": self.monotone,
        }


def convergence_study(
    n_values: Sequence[int],
    points: Optional[Sequence] = None,
    band_limit: int = 40,
    hbar_ref: float = 1e-8,
) -> ConvergenceReport:
    """Distance from the matched-deformation expansion to its limit.

    For each rank n the expansions at hbar = 2 pi / n and at hbar_ref are
    compared on the modes inside the fundamental window [0, n)^2; the
    largest gap over the sample points is d(n), and the log-log slope of
    d(n) gives the observed rate (quadratic for this family).
    """
    if points is None:
        points = [(0.0, 0.5), (0.3, 0.9), (-0.2, 1.3)]
    n_values = sorted(int(n) for n in n_values)
    if any(n < 2 for n in n_values) or len(n_values) < 2:
        raise ValueError("need at least two ranks, all >= 2")
    if band_limit < max(n_values):
        raise ValueError("band_limit must cover the largest window")
    distances = []
    for n in n_values:
        hbar = matched_hbar(n)
        worst = 0.0
        for w, z in points:
            f_n = fourier_expansion_theta(hbar, w, z, band_limit).field
            f_ref = fourier_expansion_theta(hbar_ref, w, z, band_limit).field
            diff = f_n - f_ref
            for (m1, m2), c in diff.items():
                if 0 <= m1 < n and 0 <= m2 < n and (m1, m2) != (0, 0):
                    worst = max(worst, abs(c))
        distances.append(worst)
    slope = np.polyfit(np.log(n_values), np.log(distances), 1)[0]
    return ConvergenceReport(
        n_values=list(n_values), distances=distances, exponent=float(-slope)
    )


@dataclass
class BesselIdentityReport:
    """Deviations of two printed Bessel resummations against a dense grid.

    The second identity holds as printed; the first only holds in its
    standard normalization 2 sum_{k>=0} (-1)^k J_{2k+1}(x) = sin x, and the
    as-printed variant is kept for the record.
    """

    printed_first_dev: float
    standard_first_dev: float
    second_dev: float
    zeta_max: float
    terms: int

    @property
    def first_identity_form(self) -> str:
        return "standard" if self.standard_first_dev < 1e-10 else "printed"

    def to_dict(self) -> dict:
        return {
            "printed_first_dev": self.printed_first_dev,
            "standard_first_dev": self.standard_first_dev,
            "second_dev": self.second_dev,
            "first_identity_form": self.first_identity_form,
            "zeta_max": self.zeta_max,
            "terms": self.terms,
        }


def bessel_identity_check(
    zeta_max: float = 4.0, terms: int = 40, samples: int = 401
) -> BesselIdentityReport:
    zeta = np.linspace(0.0, zeta_max, samples)
    odd_sum = sum((-1.0) ** k * jv(2 * k + 1, zeta) for k in range(terms + 1))
    odd_from_one = odd_sum - jv(1, zeta)
    even_sum = jv(0, zeta) + 2.0 * sum(
        (-1.0) ** k * jv(2 * k, zeta) for k in range(1, terms + 1)
    )
    printed = float(np.max(np.abs(odd_from_one - np.sinc(zeta / np.pi))))
    standard = float(np.max(np.abs(2.0 * odd_sum - np.sin(zeta))))
    second = float(np.max(np.abs(even_sum - np.cos(zeta))))
    return BesselIdentityReport(
        printed_first_dev=printed,
        standard_first_dev=standard,
        second_dev=second,
        zeta_max=zeta_max,
        terms=terms,
    )
