"""Command line front end.

Subcommands: star, basis, project, solve, verify-me, verify-chiral,
curvature, converge, bessel-check.  Values come from flags first, then an
optional config file of `key = value` lines, then built-in defaults.
Output is deterministic: sorted JSON keys, shortest round-trip floats,
CSV with a header row and LF endings.  Exit status 0 on success, 1 on
validation errors, 2 when a numerical contract is violated.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

import numpy as np

from .chiral import (
    bessel_identity_check,
    chiral_model,
    convergence_study,
    residual_chiral,
)
from .fourier import FourierField, moyal_bracket, poisson_bracket, star_product
from .geometry import admissible_points, cartan_first, example_tetrad, weyl_sample
from .grids import SpacetimeGrid
from .master_equation import (
    example_cauchy_data,
    example_solution,
    kowalewska_series,
    residual_moyal_hp,
)
from .numerics import SingularMetricError, richardson_order
from .projection import chi_project
from .sine_basis import matrix_to_json, verify_basis_properties

ORDER_BAND = (1.7, 2.3)
OUT_DIR_ENV = "STARTORUS_OUT"


class ContractViolation(Exception):
    """A numerical check failed; maps to exit status 2."""


class _Parser(argparse.ArgumentParser):
    # usage problems are validation errors, not crashes: exit 1
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # widened matcher lets span values like "-1:1" follow a flag without "="
        self._negative_number_matcher = re.compile(r"^-\d+[\d.:]*$")

    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    return repr(float(x))


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else _fmt(cell) for cell in row))
    return "\n".join(lines) + "\n"


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def _emit(text: str, out_path):
    if out_path is None:
        sys.stdout.write(text)
        return
    base = os.environ.get(OUT_DIR_ENV)
    if base and not os.path.isabs(out_path):
        out_path = os.path.join(base, out_path)
    parent = os.path.dirname(out_path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(out_path, "w", newline="") as fh:
        fh.write(text)


def _load_config(path: str) -> dict:
    table = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"malformed config line: {raw.strip()!r}")
            key, value = line.split("=", 1)
            table[key.strip().replace("-", "_")] = value.strip()
    return table


def _settle(args, spec: dict) -> dict:
    """Resolve parameters: flag > config file > default."""
    cfg = _load_config(args.config) if args.config else {}
    out = {}
    for key, (default, cast) in spec.items():
        flag = getattr(args, key, None)
        if flag is not None:
            out[key] = flag
        elif key in cfg:
            out[key] = cast(cfg[key])
        else:
            out[key] = default
    return out


def _parse_field(text: str) -> FourierField:
    data = json.loads(text)
    if isinstance(data, list):
        data = {"modes": data}
    return FourierField.from_json(json.dumps(data))


def _field_payload(field: FourierField) -> dict:
    return json.loads(field.to_json())


# -- subcommands --------------------------------------------------------


def cmd_star(args) -> int:
    p = _settle(args, {"op": ("moyal", str), "hbar": (1.0, float)})
    if args.f is None or args.g is None:
        raise ValueError("star needs --f and --g mode lists")
    f = _parse_field(args.f)
    g = _parse_field(args.g)
    op = p["op"]
    if op == "star":
        result = star_product(f, g, p["hbar"])
    elif op == "moyal":
        result = moyal_bracket(f, g, p["hbar"])
    elif op == "poisson":
        result = poisson_bracket(f, g)
    else:
        raise ValueError(f"unknown op {op!r} (use star, moyal, poisson)")
    payload = {"op": op, "result": _field_payload(result)}
    if op != "poisson":
        payload["hbar"] = p["hbar"]
    _emit(_json_text(payload), args.out)
    return 0


def cmd_basis(args) -> int:
    p = _settle(args, {"n": (3, int)})
    if p["n"] < 2:
        raise ValueError("n must be >= 2")
    report = verify_basis_properties(p["n"])
    _emit(_json_text(report.to_dict()), args.out)
    return 0


def cmd_project(args) -> int:
    p = _settle(args, {"n": (2, int)})
    if p["n"] < 2:
        raise ValueError("n must be >= 2")
    if args.modes is None:
        raise ValueError("project needs --modes")
    field = _parse_field(args.modes)
    mat = chi_project(field, p["n"])
    _emit(matrix_to_json(mat) + "\n", args.out)
    return 0


def cmd_solve(args) -> int:
    p = _settle(
        args,
        {
            "terms": (12, int),
            "hbar": (0.0, float),
            "w": (0.0, float),
            "z": (0.4, float),
        },
    )
    theta0, theta1 = example_cauchy_data()
    series = kowalewska_series(theta0, theta1, p["hbar"], p["terms"])
    field = series.field_at(p["w"], p["z"])
    payload = {
        "terms": p["terms"],
        "hbar": p["hbar"],
        "w": p["w"],
        "z": p["z"],
        "order_norms": [series.order_field(k, p["w"]).l2_norm() for k in range(p["terms"])],
        "tail_estimate": series.tail_estimate(p["w"], p["z"]),
        "field": _field_payload(field),
    }
    _emit(_json_text(payload), args.out)
    return 0


def _refinement_rows(make_report, h: float, prefix):
    coarse = make_report(h)
    fine = make_report(h / 2.0)
    order = richardson_order(coarse.sup, fine.sup)
    rows = [
        prefix + [h, coarse.sup, coarse.rms, ""],
        prefix + [h / 2.0, fine.sup, fine.rms, order],
    ]
    return rows, order


def cmd_verify_me(args) -> int:
    p = _settle(
        args,
        {
            "hbar": (1e-3, float),
            "h": (0.05, float),
            "band_limit": (24, int),
            "torus_n": (128, int),
        },
    )
    solution = example_solution(p["hbar"])
    w_axis = np.linspace(-0.3, 0.3, 3)

    def make_report(h):
        count = 0.8 / h
        nz = int(round(count))
        if abs(count - nz) > 1e-9 or nz < 2:
            raise ValueError("z span 0.8 must be an integer multiple of h")
        grid = SpacetimeGrid({"w": w_axis, "z": np.linspace(0.1, 0.9, nz + 1)})
        gridded = solution.gridded(grid, p["band_limit"], torus_n=p["torus_n"])
        return residual_moyal_hp(gridded)

    rows, order = _refinement_rows(make_report, p["h"], [p["hbar"]])
    text = _csv(["hbar", "h", "sup_residual", "rms_residual", "observed_order"], rows)
    _emit(text, args.out)
    if not ORDER_BAND[0] <= order <= ORDER_BAND[1]:
        raise ContractViolation(
            f"residual order {order:.3f} outside {ORDER_BAND[0]}..{ORDER_BAND[1]}"
        )
    return 0


def cmd_verify_chiral(args) -> int:
    p = _settle(
        args,
        {
            "n": (2, int),
            "h": (0.03125, float),
            "grid_w": ("-1:1", str),
            "grid_z": ("0:2", str),
        },
    )
    if p["n"] < 2:
        raise ValueError("n must be >= 2")
    spans = {}
    for name, text in (("w", p["grid_w"]), ("z", p["grid_z"])):
        lo, _, hi = text.partition(":")
        try:
            spans[name] = (float(lo), float(hi))
        except ValueError:
            raise ValueError(f"--grid-{name} must look like lo:hi, got {text!r}") from None
        if spans[name][0] >= spans[name][1]:
            raise ValueError(f"--grid-{name} span is empty")
    model = chiral_model(p["n"])
    fields = {}

    def make_report(h):
        grid = SpacetimeGrid.regular(spans, h)
        field = model.matrix_field(grid)
        fields[h] = (grid, field)
        return residual_chiral(field)

    rows, order = _refinement_rows(make_report, p["h"], [p["n"]])
    text = _csv(["n", "h", "sup_residual", "rms_residual", "observed_order"], rows)
    _emit(text, args.out)
    if args.dump is not None:
        grid, field = fields[p["h"]]
        report = residual_chiral(field)
        header = ["w", "z", "residual"]
        nd = p["n"]
        for i in range(nd):
            for j in range(nd):
                header += [f"m{i}{j}_re", f"m{i}{j}_im"]
        dump_rows = []
        ws = grid.axis("w")
        zs = grid.axis("z")
        for i in range(1, ws.size - 1):
            for j in range(1, zs.size - 1):
                mat = field.values[i, j]
                row = [ws[i], zs[j], report.per_point[i - 1, j - 1]]
                for a in range(nd):
                    for b in range(nd):
                        row += [mat[a, b].real, mat[a, b].imag]
                dump_rows.append(row)
        _emit(_csv(header, dump_rows), args.dump)
    if not ORDER_BAND[0] <= order <= ORDER_BAND[1]:
        raise ContractViolation(
            f"residual order {order:.3f} outside {ORDER_BAND[0]}..{ORDER_BAND[1]}"
        )
    return 0


def cmd_curvature(args) -> int:
    p = _settle(
        args,
        {"points": (8, int), "seed": (0, int), "step": (1e-3, float)},
    )
    if p["points"] < 1:
        raise ValueError("points must be >= 1")
    if p["step"] <= 0:
        raise ValueError("step must be positive")
    frame = example_tetrad()
    rows = []
    for pt in admissible_points(p["points"], seed=p["seed"]):
        sample = weyl_sample(pt, step=p["step"], extracted=True)
        solve_res = cartan_first(frame, pt, step=p["step"]).solve_residual
        rows.append(
            list(pt)
            + [sample.c1_estimate, 0.0, sample.dotted_norm, solve_res]
        )
    header = ["w", "z", "p", "q", "C1_re", "C1_im", "dotted_norm", "structure_residual"]
    _emit(_csv(header, rows), args.out)
    return 0


def cmd_converge(args) -> int:
    p = _settle(
        args,
        {
            "n_list": ("2,4,8,16,32", str),
            "band_limit": (40, int),
            "hbar_ref": (1e-8, float),
        },
    )
    try:
        ns = [int(tok) for tok in p["n_list"].split(",") if tok.strip()]
    except ValueError:
        raise ValueError(f"--n-list must be comma-separated integers, got {p['n_list']!r}") from None
    report = convergence_study(ns, band_limit=p["band_limit"], hbar_ref=p["hbar_ref"])
    rows = [
        [n, d, report.exponent]
        for n, d in zip(report.n_values, report.distances)
    ]
    rows = [[str(int(n)), _fmt(d), _fmt(e)] for n, d, e in rows]
    _emit(_csv(["n", "d", "fitted_exponent"], rows), args.out)
    return 0


def cmd_bessel_check(args) -> int:
    p = _settle(args, {"zeta_max": (4.0, float), "terms": (40, int)})
    if p["zeta_max"] <= 0 or p["terms"] < 5:
        raise ValueError("need zeta_max > 0 and terms >= 5")
    report = bessel_identity_check(zeta_max=p["zeta_max"], terms=p["terms"])
    _emit(_json_text(report.to_dict()), args.out)
    return 0


# -- wiring --------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="startorus", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, flags):
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None)
        sp.add_argument("--out", default=None)
        for flag, kwargs in flags.items():
            sp.add_argument(flag, **kwargs)
        sp.set_defaults(fn=fn)
        return sp

    add(
        "star",
        cmd_star,
        {
            "--f": {"default": None},
            "--g": {"default": None},
            "--op": {"default": None, "choices": ["star", "moyal", "poisson"]},
            "--hbar": {"default": None, "type": float},
        },
    )
    add("basis", cmd_basis, {"--n": {"default": None, "type": int}})
    add(
        "project",
        cmd_project,
        {"--n": {"default": None, "type": int}, "--modes": {"default": None}},
    )
    add(
        "solve",
        cmd_solve,
        {
            "--terms": {"default": None, "type": int},
            "--hbar": {"default": None, "type": float},
            "--w": {"default": None, "type": float},
            "--z": {"default": None, "type": float},
        },
    )
    add(
        "verify-me",
        cmd_verify_me,
        {
            "--hbar": {"default": None, "type": float},
            "--h": {"default": None, "type": float},
            "--band-limit": {"default": None, "type": int, "dest": "band_limit"},
            "--torus-n": {"default": None, "type": int, "dest": "torus_n"},
        },
    )
    add(
        "verify-chiral",
        cmd_verify_chiral,
        {
            "--n": {"default": None, "type": int},
            "--h": {"default": None, "type": float},
            "--grid-w": {"default": None, "dest": "grid_w"},
            "--grid-z": {"default": None, "dest": "grid_z"},
            "--dump": {"default": None},
        },
    )
    add(
        "curvature",
        cmd_curvature,
        {
            "--points": {"default": None, "type": int},
            "--seed": {"default": None, "type": int},
            "--step": {"default": None, "type": float},
        },
    )
    add(
        "converge",
        cmd_converge,
        {
            "--n-list": {"default": None, "dest": "n_list"},
            "--band-limit": {"default": None, "type": int, "dest": "band_limit"},
            "--hbar-ref": {"default": None, "type": float, "dest": "hbar_ref"},
        },
    )
    add(
        "bessel-check",
        cmd_bessel_check,
        {
            "--zeta-max": {"default": None, "type": float, "dest": "zeta_max"},
            "--terms": {"default": None, "type": int},
        },
    )
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ContractViolation as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return 2
    except SingularMetricError as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
