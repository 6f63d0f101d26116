r"""Deformed second-heavenly dynamics on the torus.

The scalar field Theta(w, z; p, q) is carried as a mode field over the
torus factor and a low-degree polynomial over w.  Everything here feeds on
the bracket

    {f, g}_hbar = (2/hbar) sin(hbar/2 (m x n)) f_m g_n E_{m+n},

which degenerates to the Poisson bracket as hbar -> 0.  The governing
equation in its symmetric-slice form reads

    Theta_ww + Theta_zz + {Theta_w, Theta_z}_hbar = 0,

and in doubled coordinates (w, z, wt, zt) on a Kahler background

    Theta_yy - Theta_ytyt
      + (1/g^{wt w}) [ g^{zt z} Theta_z zt + g^{zt w} (d_y + d_yt) Theta_zt
                       + g^{wt z} (d_y - d_yt) Theta_z ]
      + (1/(G g^{wt w})) {(d_y + d_yt) Theta, d_z Theta}_hbar = 0,

with w = (y + yt)/2 and wt = (y - yt)/2, which collapses to the flat form
Theta_w wt + Theta_z zt + {Theta_w, Theta_z}_hbar on the identity metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Optional, Sequence

import numpy as np

from .fourier import (
    DEFAULT_PRUNE,
    FourierField,
    fft_project,
    moyal_bracket,
    poisson_bracket,
)
from .grids import GriddedFourierField, SpacetimeGrid, torus_nodes
from .numerics import SingularMetricError, cross_diff

__all__ = [
    "freq_factor",
    "ClosedFormSolution",
    "example_solution",
    "example_cauchy_data",
    "WPolyField",
    "SeriesSolution",
    "kowalewska_series",
    "ResidualReport",
    "residual_moyal_hp",
    "residual_me_flat",
    "KahlerBackground",
    "residual_me_kahler",
]

_SMALL_HBAR = 1e-4
_COSQ_CUTOFF = 1e-6


def freq_factor(hbar: float) -> float:
    """s(hbar) = (2/hbar) sin(hbar/2); the hbar -> 0 limit is 1.

    Below 1e-4 the closed form loses digits to cancellation, so a short
    even series takes over there.
    """
    if hbar < 0:
        raise ValueError("hbar must be >= 0")
    if hbar < _SMALL_HBAR:
        h2 = hbar * hbar
        return 1.0 - h2 / 24.0 + h2 * h2 / 1920.0
    return (2.0 / hbar) * math.sin(0.5 * hbar)


def _bracket(f: FourierField, g: FourierField, hbar: float) -> FourierField:
    if hbar == 0:
        return poisson_bracket(f, g)
    return moyal_bracket(f, g, hbar)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


class ClosedFormSolution:
    """Exact deformed wave solution.

    Theta = (pi/2) cos(p+q) - w sin q + [cos(z s cos q + p) - cos p]/(s cos q)

    with s = freq_factor(hbar).  Near cos q = 0 the last term is evaluated
    as -int_0^z sin(zeta s cos q + p) dzeta by 16-point Gauss-Legendre,
    which is the same analytic object without the 0/0.
    """

    def __init__(self, hbar: float):
        self.hbar = float(hbar)
        self.s = freq_factor(self.hbar)

    def evaluate(self, w, z, p, q):
        w, z, p, q = np.broadcast_arrays(
            np.asarray(w, dtype=np.float64),
            np.asarray(z, dtype=np.float64),
            np.asarray(p, dtype=np.float64),
            np.asarray(q, dtype=np.float64),
        )
        cq = np.cos(q)
        scq = self.s * cq
        singular = np.abs(cq) < _COSQ_CUTOFF
        safe = np.where(singular, 1.0, scq)
        # product form of [cos(z*safe + p) - cos p]/safe; no cancellation
        # when safe is small, so accuracy holds right up to the cutoff
        main = -2.0 * np.sin(0.5 * z * safe + p) * np.sin(0.5 * z * safe) / safe

        # -int_0^z sin(zeta * s cq + p) dzeta on the singular set
        half = 0.5 * z
        zeta = half[..., None] * (_GL_NODES + 1.0)
        quad = -np.sum(
            _GL_WEIGHTS * np.sin(zeta * scq[..., None] + p[..., None]), axis=-1
        ) * half

        term = np.where(singular, quad, main)
        out = 0.5 * np.pi * np.cos(p + q) - w * np.sin(q) + term
        return out if out.shape else float(out)

    def mode_field(self, w: float, z: float, band_limit: int, torus_n: int = 128) -> FourierField:
        """Torus-mode content at fixed (w, z) via the FFT projector."""
        pp, qq = torus_nodes(torus_n)
        samples = self.evaluate(w, z, pp, qq)
        return fft_project(np.asarray(samples, dtype=np.complex128), band_limit)

    def gridded(
        self,
        grid: SpacetimeGrid,
        band_limit: int,
        torus_n: int = 128,
        prune: float = DEFAULT_PRUNE,
    ) -> GriddedFourierField:
        if grid.names != ("w", "z"):
            raise ValueError("expected a grid with axes ('w', 'z')")

        def evaluator(point, pp, qq):
            return self.evaluate(point[0], point[1], pp, qq)

        return GriddedFourierField.sample(
            grid, evaluator, band_limit, self.hbar, torus_n=torus_n, prune=prune
        )


def example_solution(hbar: float) -> ClosedFormSolution:
    """The reference solution at deformation hbar (0 gives the classical one)."""
    return ClosedFormSolution(hbar)


class WPolyField:
    """Polynomial in w with mode-field coefficients: sum_k w^k coeffs[k]."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[FourierField]):
        coeffs = list(coeffs)
        while len(coeffs) > 1 and coeffs[-1].size == 0:
            coeffs.pop()
        if not coeffs:
            coeffs = [FourierField.zero()]
        self.coeffs = coeffs

    @classmethod
    def constant(cls, f: FourierField) -> "WPolyField":
        return cls([f])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def band_limit(self) -> int:
        return max(c.band_limit for c in self.coeffs)

    def at_w(self, w: float) -> FourierField:
        acc = FourierField.zero()
        for k, c in enumerate(self.coeffs):
            acc = acc + (w**k) * c
        return acc

    def d_dw(self) -> "WPolyField":
        if self.degree == 0:
            return WPolyField([FourierField.zero()])
        return WPolyField([float(k) * c for k, c in enumerate(self.coeffs)][1:])

    def d2_dw(self) -> "WPolyField":
        return self.d_dw().d_dw()

    def __add__(self, other: "WPolyField") -> "WPolyField":
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        for k in range(n):
            a = self.coeffs[k] if k < len(self.coeffs) else FourierField.zero()
            b = other.coeffs[k] if k < len(other.coeffs) else FourierField.zero()
            out.append(a + b)
        return WPolyField(out)

    def __neg__(self) -> "WPolyField":
        return WPolyField([-c for c in self.coeffs])

    def __sub__(self, other: "WPolyField") -> "WPolyField":
        return self + (-other)

    def __rmul__(self, scalar) -> "WPolyField":
        return WPolyField([scalar * c for c in self.coeffs])

    def bracket(self, other: "WPolyField", hbar: float) -> "WPolyField":
        """Torus bracket, degree-wise in w."""
        out = [FourierField.zero() for _ in range(self.degree + other.degree + 1)]
        for a, ca in enumerate(self.coeffs):
            if ca.size == 0:
                continue
            for b, cb in enumerate(other.coeffs):
                if cb.size == 0:
                    continue
                out[a + b] = out[a + b] + _bracket(ca, cb, hbar)
        return WPolyField(out)

    def l2_norm(self) -> float:
        return math.sqrt(sum(c.l2_norm() ** 2 for c in self.coeffs))


def _as_wpoly(f) -> WPolyField:
    if isinstance(f, WPolyField):
        return f
    if isinstance(f, FourierField):
        return WPolyField.constant(f)
    raise TypeError("cauchy data must be FourierField or WPolyField")


def example_cauchy_data():
    """(Theta|_{z=0}, d_z Theta|_{z=0}) of the reference solution.

    Theta0 = (pi/2) cos(p+q) - w sin q,  Theta1 = -sin p; both are
    independent of hbar.
    """
    cos_pq = FourierField.from_dict({(1, 1): 0.5, (-1, -1): 0.5})
    sin_q = FourierField.from_dict({(0, 1): -0.5j, (0, -1): 0.5j})
    sin_p = FourierField.from_dict({(1, 0): -0.5j, (-1, 0): 0.5j})
    theta0 = WPolyField([0.5 * np.pi * cos_pq, -1.0 * sin_q])
    theta1 = WPolyField([-1.0 * sin_p])
    return theta0, theta1


@dataclass
class SeriesSolution:
    """Power series in z: Theta = sum_k z^k / k! * orders[k](w; p, q)."""

    orders: list
    hbar: float

    def order_field(self, k: int, w: float) -> FourierField:
        return self.orders[k].at_w(w)

    def field_at(self, w: float, z: float) -> FourierField:
        acc = FourierField.zero()
        for k, theta_k in enumerate(self.orders):
            acc = acc + (z**k / math.factorial(k)) * theta_k.at_w(w)
        return acc

    def tail_estimate(self, w: float, z: float) -> float:
        """Magnitude of the last retained term; a heuristic truncation gauge."""
        k = len(self.orders) - 1
        return abs(z) ** k / math.factorial(k) * self.orders[k].at_w(w).l2_norm()


def kowalewska_series(theta0, theta1, hbar: float, terms: int) -> SeriesSolution:
    """Formal z-power-series solution from Cauchy data at z = 0.

    Each order is forced by the equation written as a Kowalewska system:

        Theta_k = -d2w Theta_{k-2}
                  - sum_{j=0}^{k-2} C(k-2, j) {d_w Theta_j, Theta_{k-1-j}}

    for k >= 2, with Theta_0, Theta_1 the data.  terms counts the orders
    kept, so terms >= 2.
    """
    if terms < 2:
        raise ValueError("terms must be >= 2")
    if hbar < 0:
        raise ValueError("hbar must be >= 0")
    orders = [_as_wpoly(theta0), _as_wpoly(theta1)]
    for k in range(2, terms):
        acc = -orders[k - 2].d2_dw()
        for j in range(k - 1):
            coeff = float(math.comb(k - 2, j))
            term = orders[j].d_dw().bracket(orders[k - 1 - j], hbar)
            acc = acc - coeff * term
        orders.append(acc)
    return SeriesSolution(orders=orders, hbar=hbar)


@dataclass
class ResidualReport:
    """Interior residual magnitudes of a discretized field equation."""

    sup: float
    rms: float
    steps: dict
    interior_shape: tuple
    hbar: float
    label: str = ""
    per_point: Optional[np.ndarray] = dataclass_field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "sup": self.sup,
            "rms": self.rms,
            "steps": {k: float(v) for k, v in sorted(self.steps.items())},
            "interior_shape": list(self.interior_shape),
            "hbar": self.hbar,
        }


def _report(per_point: np.ndarray, steps: dict, hbar: float, label: str) -> ResidualReport:
    return ResidualReport(
        sup=float(np.max(per_point)),
        rms=float(np.sqrt(np.mean(per_point**2))),
        steps=steps,
        interior_shape=per_point.shape,
        hbar=hbar,
        label=label,
        per_point=per_point,
    )


def residual_moyal_hp(field: GriddedFourierField) -> ResidualReport:
    """Residual of Theta_ww + Theta_zz + {Theta_w, Theta_z}_hbar on a (w, z) grid.

    Second derivatives use the 3-point stencil, first derivatives the
    centered 2-point one; hbar = 0 falls back to the Poisson bracket.
    Per-node magnitude is the mode-space l2 norm.
    """
    grid = field.grid
    if grid.names != ("w", "z"):
        raise ValueError("expected a grid with axes ('w', 'z')")
    hw = grid.steps["w"]
    hz = grid.steps["z"]
    v = field.values
    nw, nz = v.shape
    if nw < 3 or nz < 3:
        raise ValueError("need at least 3 nodes per axis")
    per = np.zeros((nw - 2, nz - 2))
    for i in range(1, nw - 1):
        for j in range(1, nz - 1):
            d2w = (1.0 / hw**2) * (v[i + 1, j] - 2.0 * v[i, j] + v[i - 1, j])
            d2z = (1.0 / hz**2) * (v[i, j + 1] - 2.0 * v[i, j] + v[i, j - 1])
            dw = (0.5 / hw) * (v[i + 1, j] - v[i - 1, j])
            dz = (0.5 / hz) * (v[i, j + 1] - v[i, j - 1])
            res = d2w + d2z + _bracket(dw, dz, field.hbar)
            per[i - 1, j - 1] = res.l2_norm()
    return _report(per, {"w": hw, "z": hz}, field.hbar, "moyal_hp")


_FLAT_AXES = ("w", "z", "wt", "zt")


def residual_me_flat(field: GriddedFourierField) -> ResidualReport:
    """Residual of Theta_w wt + Theta_z zt + {Theta_w, Theta_z}_hbar.

    The field lives on a 4-axis grid named ('w', 'z', 'wt', 'zt').
    """
    grid = field.grid
    if grid.names != _FLAT_AXES:
        raise ValueError(f"expected axes {_FLAT_AXES}")
    h = grid.steps
    v = field.values
    if min(v.shape) < 3:
        raise ValueError("need at least 3 nodes per axis")
    inner = tuple(s - 2 for s in v.shape)
    per = np.zeros(inner)
    for idx in np.ndindex(inner):
        i, j, k, l = (a + 1 for a in idx)
        c_wwt = (0.25 / (h["w"] * h["wt"])) * (
            v[i + 1, j, k + 1, l] - v[i + 1, j, k - 1, l]
            - v[i - 1, j, k + 1, l] + v[i - 1, j, k - 1, l]
        )
        c_zzt = (0.25 / (h["z"] * h["zt"])) * (
            v[i, j + 1, k, l + 1] - v[i, j + 1, k, l - 1]
            - v[i, j - 1, k, l + 1] + v[i, j - 1, k, l - 1]
        )
        dw = (0.5 / h["w"]) * (v[i + 1, j, k, l] - v[i - 1, j, k, l])
        dz = (0.5 / h["z"]) * (v[i, j + 1, k, l] - v[i, j - 1, k, l])
        res = c_wwt + c_zzt + _bracket(dw, dz, field.hbar)
        per[idx] = res.l2_norm()
    return _report(per, dict(h), field.hbar, "me_flat")


class KahlerBackground:
    """Background data for the doubled-coordinate master equation.

    The 2x2 block g_{alpha beta~} (rows w, z; columns wt, zt) comes either
    from a closed-form metric_fn(point) or by differencing a potential
    K(w, z, wt, zt).  volume(point) supplies the scalar G weighting the
    bracket term; it defaults to 1.
    """

    def __init__(
        self,
        potential: Optional[Callable] = None,
        metric_fn: Optional[Callable] = None,
        volume: Optional[Callable] = None,
        fd_step: float = 1e-4,
    ):
        if potential is None and metric_fn is None:
            raise ValueError("need a potential or a closed-form metric")
        self.potential = potential
        self.metric_fn = metric_fn
        self.volume = volume if volume is not None else (lambda point: 1.0)
        self.fd_step = float(fd_step)

    @classmethod
    def flat(cls) -> "KahlerBackground":
        """Identity block from K = w wt + z zt, registered in closed form."""
        return cls(
            potential=lambda pt: pt[0] * pt[2] + pt[1] * pt[3],
            metric_fn=lambda pt: np.eye(2),
        )

    def metric(self, point) -> np.ndarray:
        if self.metric_fn is not None:
            return np.asarray(self.metric_fn(point), dtype=np.float64)
        m = np.empty((2, 2))
        for a in range(2):
            for b in range(2):
                m[a, b] = cross_diff(self.potential, point, a, 2 + b, self.fd_step)
        return m


_KAHLER_AXES = ("y", "yt", "z", "zt")


def residual_me_kahler(
    field: GriddedFourierField,
    background: KahlerBackground,
    det_tol: float = 1e-10,
) -> ResidualReport:
    """Residual of the doubled master equation on a Kahler background.

    The field lives on axes ('y', 'yt', 'z', 'zt'); the background metric
    is read at (w, z, wt, zt) with w = (y + yt)/2 and wt = (y - yt)/2.
    A metric block with |det| below det_tol aborts with the grid location.
    """
    grid = field.grid
    if grid.names != _KAHLER_AXES:
        raise ValueError(f"expected axes {_KAHLER_AXES}")
    h = grid.steps
    v = field.values
    if min(v.shape) < 3:
        raise ValueError("need at least 3 nodes per axis")
    hy, hyt, hz, hzt = h["y"], h["yt"], h["z"], h["zt"]
    inner = tuple(s - 2 for s in v.shape)
    per = np.zeros(inner)
    for idx in np.ndindex(inner):
        i, j, k, l = (a + 1 for a in idx)
        y, yt, z, zt = grid.point((i, j, k, l))
        w_pt = (0.5 * (y + yt), z, 0.5 * (y - yt), zt)
        m = background.metric(w_pt)
        det = float(np.linalg.det(m))
        if abs(det) < det_tol:
            raise SingularMetricError(
                f"metric block degenerate (det={det!r})", location=w_pt
            )
        ginv = np.linalg.inv(m)
        g_wtw, g_wtz = ginv[0, 0], ginv[0, 1]
        g_ztw, g_ztz = ginv[1, 0], ginv[1, 1]
        vol = float(background.volume(w_pt))

        d2y = (1.0 / hy**2) * (v[i + 1, j, k, l] - 2.0 * v[i, j, k, l] + v[i - 1, j, k, l])
        d2yt = (1.0 / hyt**2) * (v[i, j + 1, k, l] - 2.0 * v[i, j, k, l] + v[i, j - 1, k, l])
        c_zzt = (0.25 / (hz * hzt)) * (
            v[i, j, k + 1, l + 1] - v[i, j, k + 1, l - 1]
            - v[i, j, k - 1, l + 1] + v[i, j, k - 1, l - 1]
        )
        c_yzt = (0.25 / (hy * hzt)) * (
            v[i + 1, j, k, l + 1] - v[i + 1, j, k, l - 1]
            - v[i - 1, j, k, l + 1] + v[i - 1, j, k, l - 1]
        )
        c_ytzt = (0.25 / (hyt * hzt)) * (
            v[i, j + 1, k, l + 1] - v[i, j + 1, k, l - 1]
            - v[i, j - 1, k, l + 1] + v[i, j - 1, k, l - 1]
        )
        c_yz = (0.25 / (hy * hz)) * (
            v[i + 1, j, k + 1, l] - v[i + 1, j, k - 1, l]
            - v[i - 1, j, k + 1, l] + v[i - 1, j, k - 1, l]
        )
        c_ytz = (0.25 / (hyt * hz)) * (
            v[i, j + 1, k + 1, l] - v[i, j + 1, k - 1, l]
            - v[i, j - 1, k + 1, l] + v[i, j - 1, k - 1, l]
        )
        dy = (0.5 / hy) * (v[i + 1, j, k, l] - v[i - 1, j, k, l])
        dyt = (0.5 / hyt) * (v[i, j + 1, k, l] - v[i, j - 1, k, l])
        dz = (0.5 / hz) * (v[i, j, k + 1, l] - v[i, j, k - 1, l])

        linear = (1.0 / g_wtw) * (
            g_ztz * c_zzt
            + g_ztw * (c_yzt + c_ytzt)
            + g_wtz * (c_yz - c_ytz)
        )
        res = (
            d2y - d2yt
            + linear
            + (1.0 / (vol * g_wtw)) * _bracket(dy + dyt, dz, field.hbar)
        )
        per[idx] = res.l2_norm()
    return _report(per, dict(h), field.hbar, "me_kahler")
