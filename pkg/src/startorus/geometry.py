r"""Curvature of the heavenly metric induced by the classical wave solution.

Coordinates are ordered (w, z, p, q).  Writing theta for the classical
solution, arg = z cos q + p and Phi = cos q / cos(arg), the metric is

    ds^2 = dw (theta_pw dp + theta_qw dq) + dz (theta_pz dp + theta_qz dq)
           - (1/{theta_w, theta_z}) [ (theta_pw dp + theta_qw dq)^2
                                      + (theta_pz dp + theta_qz dq)^2 ],

with the torus bracket {f, g} = f_q g_p - f_p g_q.  A null tetrad brings it
to ds^2 = 2 e^1 e^2 + 2 e^3 e^4; the first structure equations determine
the frame connection, whose anti-self-dual half vanishes while the
self-dual half carries a single curvature component C1, putting the
geometry in the one-repeated-null-direction class.  A coordinate change
u = sin q, v = sin(arg) exhibits the same metric as a plane-fronted wave.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .numerics import SingularMetricError, central_diff, cross_diff

__all__ = [
    "COORDS",
    "ThetaDerivatives",
    "example_theta",
    "fd_theta_derivatives",
    "hp_metric",
    "example_metric",
    "MetricField",
    "TetradFrame",
    "example_tetrad",
    "metric_from_tetrad",
    "FRAME_METRIC",
    "ConnectionForms",
    "cartan_first",
    "CartanResult",
    "example_connection",
    "weyl_c1",
    "curvature_undotted",
    "weyl_sample",
    "WeylSample",
    "weyl_report",
    "WeylReport",
    "pp_wave_check",
    "admissible_points",
]

COORDS = ("w", "z", "p", "q")

_BRANCH_TOL = 1e-4


def _trig(point):
    w, z, p, q = point
    cq = math.cos(q)
    sq = math.sin(q)
    arg = z * cq + p
    return cq, sq, math.cos(arg), math.sin(arg)


@dataclass
class ThetaDerivatives:
    """First w/z derivatives of theta and their torus gradients."""

    d_w: Callable
    d_z: Callable
    d_pw: Callable
    d_qw: Callable
    d_pz: Callable
    d_qz: Callable

    def bracket_wz(self, point) -> float:
        """{theta_w, theta_z} = theta_qw theta_pz - theta_pw theta_qz."""
        return self.d_qw(point) * self.d_pz(point) - self.d_pw(point) * self.d_qz(point)


def example_theta() -> ThetaDerivatives:
    """Closed-form derivative pack of the classical reference solution."""
    return ThetaDerivatives(
        d_w=lambda pt: -_trig(pt)[1],
        d_z=lambda pt: -_trig(pt)[3],
        d_pw=lambda pt: 0.0,
        d_qw=lambda pt: -_trig(pt)[0],
        d_pz=lambda pt: -_trig(pt)[2],
        d_qz=lambda pt: pt[1] * _trig(pt)[1] * _trig(pt)[2],
    )


def fd_theta_derivatives(fn: Callable, step: float = 1e-5) -> ThetaDerivatives:
    """Derivative pack for any scalar theta(point) by central differences."""
    return ThetaDerivatives(
        d_w=lambda pt: float(central_diff(fn, pt, 0, step)),
        d_z=lambda pt: float(central_diff(fn, pt, 1, step)),
        d_pw=lambda pt: float(cross_diff(fn, pt, 2, 0, step)),
        d_qw=lambda pt: float(cross_diff(fn, pt, 3, 0, step)),
        d_pz=lambda pt: float(cross_diff(fn, pt, 2, 1, step)),
        d_qz=lambda pt: float(cross_diff(fn, pt, 3, 1, step)),
    )


@dataclass
class MetricField:
    """Symmetric 4x4 metric components at one point, coordinates COORDS."""

    matrix: np.ndarray
    point: tuple

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        if self.matrix.shape != (4, 4):
            raise ValueError("metric must be 4x4")

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def symmetry_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.T)))


def hp_metric(theta: ThetaDerivatives, point, bracket_tol: float = 1e-12) -> MetricField:
    """Assemble the heavenly metric from a derivative pack at one point."""
    d = theta.bracket_wz(point)
    if abs(d) < bracket_tol:
        raise SingularMetricError(
            f"degenerate metric, bracket {d!r}", location=tuple(point)
        )
    a = np.array([0.0, 0.0, theta.d_pw(point), theta.d_qw(point)])
    b = np.array([0.0, 0.0, theta.d_pz(point), theta.d_qz(point)])
    ew = np.array([1.0, 0.0, 0.0, 0.0])
    ez = np.array([0.0, 1.0, 0.0, 0.0])
    g = 0.5 * (np.outer(ew, a) + np.outer(a, ew))
    g += 0.5 * (np.outer(ez, b) + np.outer(b, ez))
    g -= (np.outer(a, a) + np.outer(b, b)) / d
    return MetricField(g, tuple(point))


def example_metric(point) -> MetricField:
    return hp_metric(example_theta(), point)


class TetradFrame:
    """Null coframe e^1..e^4 with ds^2 = 2 e^1 e^2 + 2 e^3 e^4.

    Components are row a of at(point), in the coordinate order COORDS.
    Valid where cos q and cos(z cos q + p) stay away from zero.
    """

    def phi(self, point) -> float:
        cq, _, ca, _ = _trig(point)
        return cq / ca

    def at(self, point) -> np.ndarray:
        cq, sq, ca, _ = _trig(point)
        if abs(cq) < _BRANCH_TOL or abs(ca) < _BRANCH_TOL:
            raise SingularMetricError(
                "tetrad hits a branch locus", location=tuple(point)
            )
        z = point[1]
        r = 1.0 / math.sqrt(2.0)
        phi = cq / ca
        e = np.zeros((4, 4))
        e[0] = r / phi * np.array([0.0, cq, 1.0, -z * sq])
        e[1] = r * np.array([0.0, 0.0, -1.0, z * sq])
        e[2] = np.array([0.0, 0.0, 0.0, -r])
        e[3] = r * np.array([cq, 0.0, 0.0, phi])
        return e


def example_tetrad() -> TetradFrame:
    return TetradFrame()


def metric_from_tetrad(frame: TetradFrame, point) -> MetricField:
    e = frame.at(point)
    g = (
        np.outer(e[0], e[1]) + np.outer(e[1], e[0])
        + np.outer(e[2], e[3]) + np.outer(e[3], e[2])
    )
    return MetricField(g, tuple(point))


# frame-index metric: g_12 = g_34 = 1 blocks, self-inverse
FRAME_METRIC = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
    ]
)

_PAIRS = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
_PAIR_INDEX = {pair: k for k, pair in enumerate(_PAIRS)}


class ConnectionForms:
    """Antisymmetric frame connection Gamma_{ab} as coordinate 1-forms.

    Stored for a < b with 1-based labels; get(a, b) resolves signs.
    """

    def __init__(self, comps: dict):
        self._comps = {k: np.asarray(v, dtype=np.float64) for k, v in comps.items()}
        for a, b in _PAIRS:
            self._comps.setdefault((a + 1, b + 1), np.zeros(4))

    def get(self, a: int, b: int) -> np.ndarray:
        if a == b:
            return np.zeros(4)
        if a < b:
            return self._comps[(a, b)]
        return -self._comps[(b, a)]

    def dotted_defect(self) -> float:
        """Sup of the anti-self-dual combinations, which must vanish here."""
        combos = [
            self.get(4, 1),
            0.5 * (self.get(3, 4) - self.get(1, 2)),
            self.get(3, 2),
        ]
        return float(max(np.max(np.abs(c)) for c in combos))

    def undotted(self):
        """(Gamma_42, (Gamma_12 + Gamma_34)/2, Gamma_31) as 1-forms."""
        return (
            self.get(4, 2),
            0.5 * (self.get(1, 2) + self.get(3, 4)),
            self.get(3, 1),
        )


@dataclass
class CartanResult:
    de: np.ndarray  # de[a, i, j], antisymmetric in i, j
    conn: ConnectionForms
    solve_residual: float


def cartan_first(frame: TetradFrame, point, step: float = 1e-3) -> CartanResult:
    """Solve de^a = -Gamma^a_b ^ e^b for the 24 connection components.

    d is taken by central differences of the coframe; the linear system is
    square and its lstsq residual is reported as a consistency gauge.
    """
    e = frame.at(point)
    grad = np.array([central_diff(frame.at, point, i, step) for i in range(4)])
    # grad[i, a, j] = d_i e^a_j
    de = np.transpose(grad, (1, 0, 2)) - np.transpose(grad, (1, 2, 0))

    rows = []
    rhs = []
    for a in range(4):
        for i in range(4):
            for j in range(i + 1, 4):
                row = np.zeros(24)
                for b in range(4):
                    for c in range(4):
                        eta = FRAME_METRIC[a, c]
                        if eta == 0.0 or c == b:
                            continue
                        if c < b:
                            k, sign = _PAIR_INDEX[(c, b)], 1.0
                        else:
                            k, sign = _PAIR_INDEX[(b, c)], -1.0
                        row[4 * k + i] += eta * sign * e[b, j]
                        row[4 * k + j] -= eta * sign * e[b, i]
                rows.append(row)
                rhs.append(-de[a, i, j])
    mat = np.array(rows)
    vec = np.array(rhs)
    x, *_ = np.linalg.lstsq(mat, vec, rcond=None)
    resid = float(np.max(np.abs(mat @ x - vec)))
    comps = {
        (a + 1, b + 1): x[4 * k : 4 * k + 4] for k, (a, b) in enumerate(_PAIRS)
    }
    return CartanResult(de=de, conn=ConnectionForms(comps), solve_residual=resid)


def example_connection(point) -> ConnectionForms:
    """Closed-form connection of the example coframe.

    Gamma_12 = Gamma_34 = -sqrt(2) tan q e^3 and
    Gamma_31 = -sqrt(2) Phi [tan q e^1 + Phi tan(arg) e^3]; the rest vanish.
    """
    frame = example_tetrad()
    e = frame.at(point)
    cq, sq, ca, sa = _trig(point)
    phi = cq / ca
    tq = sq / cq
    ta = sa / ca
    g12 = -math.sqrt(2.0) * tq * e[2]
    g31 = -math.sqrt(2.0) * phi * (tq * e[0] + phi * ta * e[2])
    return ConnectionForms({(1, 2): g12, (3, 4): g12.copy(), (1, 3): -g31})


def _wedge(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.outer(u, v) - np.outer(v, u)


def weyl_c1(point) -> float:
    """Closed-form value of the single surviving curvature component.

    C1 = 4 Phi [ (1 + 2 sin^2 q)/cos^2 q + Phi^2 (1 + 2 sin^2 arg)/cos^2 arg ];
    equals 8 at the origin.
    """
    cq, sq, ca, sa = _trig(point)
    phi = cq / ca
    return 4.0 * phi * (
        (1.0 + 2.0 * sq * sq) / (cq * cq)
        + phi * phi * (1.0 + 2.0 * sa * sa) / (ca * ca)
    )


def curvature_undotted(conn_fn: Callable, point, step: float = 1e-3):
    """Self-dual curvature 2-forms from a connection-valued callable.

    conn_fn(point) -> ConnectionForms.  Returns (R_A, R_B, R_C) for the
    triple (Gamma_42, (Gamma_12 + Gamma_34)/2, Gamma_31):

        R_A = dA + A ^ 2B,   R_B = dB + A ^ C,   R_C = dC + 2B ^ C.
    """
    a0, b0, c0 = conn_fn(point).undotted()

    def d_of(pick):
        grad = np.array(
            [central_diff(lambda pt: pick(conn_fn(pt)), point, i, step) for i in range(4)]
        )
        return grad - grad.T

    da = d_of(lambda cn: cn.undotted()[0])
    db = d_of(lambda cn: cn.undotted()[1])
    dc = d_of(lambda cn: cn.undotted()[2])
    r_a = da + _wedge(a0, 2.0 * b0)
    r_b = db + _wedge(a0, c0)
    r_c = dc + _wedge(2.0 * b0, c0)
    return r_a, r_b, r_c


@dataclass
class WeylSample:
    point: tuple
    c1_closed: float
    c1_estimate: float
    off_component_norm: float
    ra_norm: float
    rb_norm: float
    dotted_norm: float

    @property
    def c1_rel_err(self) -> float:
        return abs(self.c1_estimate - self.c1_closed) / abs(self.c1_closed)

    @property
    def other_rel_norm(self) -> float:
        """Largest spurious curvature component relative to the C1 scale."""
        return max(self.ra_norm, self.rb_norm, self.off_component_norm) / abs(
            self.c1_estimate
        )

    def to_dict(self) -> dict:
        return {
            "point": [float(v) for v in self.point],
            "c1_closed": self.c1_closed,
            "c1_estimate": self.c1_estimate,
            "c1_rel_err": self.c1_rel_err,
            "off_component_norm": self.off_component_norm,
            "ra_norm": self.ra_norm,
            "rb_norm": self.rb_norm,
            "other_rel_norm": self.other_rel_norm,
            "dotted_norm": self.dotted_norm,
        }


def weyl_sample(point, step: float = 1e-3, extracted: bool = True) -> WeylSample:
    """Curvature data at one point, from first principles when extracted.

    extracted=True reads the connection off the coframe by Cartan solves
    inside the numerical d; False differentiates the closed form instead.
    """
    frame = example_tetrad()
    if extracted:
        conn_fn = lambda pt: cartan_first(frame, pt, step).conn  # noqa: E731
    else:
        conn_fn = example_connection
    r_a, r_b, r_c = curvature_undotted(conn_fn, point, step)

    e = frame.at(point)
    basis = _wedge(e[2], e[0])  # e^3 ^ e^1
    iu = np.triu_indices(4, k=1)
    denom = float(np.sum(basis[iu] ** 2))
    c1_est = 2.0 * float(np.sum(r_c[iu] * basis[iu])) / denom
    off = float(np.max(np.abs(r_c - 0.5 * c1_est * basis)))
    return WeylSample(
        point=tuple(float(v) for v in point),
        c1_closed=weyl_c1(point),
        c1_estimate=c1_est,
        off_component_norm=off,
        ra_norm=float(np.max(np.abs(r_a))),
        rb_norm=float(np.max(np.abs(r_b))),
        dotted_norm=conn_fn(point).dotted_defect(),
    )


@dataclass
class WeylReport:
    samples: list

    @property
    def max_c1_rel_err(self) -> float:
        return max(s.c1_rel_err for s in self.samples)

    @property
    def max_other_norm(self) -> float:
        return max(max(s.ra_norm, s.rb_norm, s.off_component_norm) for s in self.samples)

    @property
    def max_other_rel_norm(self) -> float:
        return max(s.other_rel_norm for s in self.samples)

    @property
    def max_dotted_norm(self) -> float:
        return max(s.dotted_norm for s in self.samples)

    @property
    def single_component_type(self) -> bool:
        """True when curvature sits in one component to sampling accuracy.

        Spurious components are judged relative to the C1 scale, since the
        FD error of every curvature entry grows with the local curvature.
        """
        return (
            all(abs(s.c1_estimate) > 1e-3 for s in self.samples)
            and self.max_other_rel_norm < 1e-3
            and self.max_dotted_norm < 1e-3
        )

    def to_dict(self) -> dict:
        return {
            "samples": [s.to_dict() for s in self.samples],
            "max_c1_rel_err": self.max_c1_rel_err,
            "max_other_norm": self.max_other_norm,
            "max_other_rel_norm": self.max_other_rel_norm,
            "max_dotted_norm": self.max_dotted_norm,
            "single_component_type": self.single_component_type,
        }


def weyl_report(points, step: float = 1e-3, extracted: bool = True) -> WeylReport:
    return WeylReport([weyl_sample(pt, step=step, extracted=extracted) for pt in points])


def admissible_points(count: int, seed: int = 0, margin: float = 0.3):
    """Deterministic sample points keeping both branch cosines above margin."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        w = rng.uniform(-1.0, 1.0)
        z = rng.uniform(-1.0, 1.0)
        p = rng.uniform(-np.pi, np.pi)
        q = rng.uniform(-np.pi, np.pi)
        cq = math.cos(q)
        if cq < margin:
            continue
        if math.cos(z * cq + p) < margin:
            continue
        out.append((float(w), float(z), float(p), float(q)))
    return out


def pp_wave_check(point) -> float:
    """Max-abs gap between the metric and its plane-wave form pullback.

    In u = sin q, v = sin(z cos q + p), ordered (w, u, v, z), the metric is
    -dw du + dv dz - (du^2 + dv^2)/sqrt((1 - u^2)(1 - v^2)) on the branch
    where both cosines are positive.
    """
    cq, sq, ca, sa = _trig(point)
    if cq < _BRANCH_TOL or ca < _BRANCH_TOL:
        raise SingularMetricError(
            "plane-wave chart needs positive branch cosines", location=tuple(point)
        )
    z = point[1]
    jac = np.zeros((4, 4))  # rows (w, u, v, z), columns COORDS
    jac[0, 0] = 1.0
    jac[1, 3] = cq
    jac[2] = ca * np.array([0.0, cq, 1.0, -z * sq])
    jac[3, 1] = 1.0

    f = 1.0 / (cq * ca)
    g_pp = np.zeros((4, 4))
    g_pp[0, 1] = g_pp[1, 0] = -0.5
    g_pp[2, 3] = g_pp[3, 2] = 0.5
    g_pp[1, 1] = -f
    g_pp[2, 2] = -f

    pulled = jac.T @ g_pp @ jac
    direct = example_metric(point).matrix
    return float(np.max(np.abs(pulled - direct)))
