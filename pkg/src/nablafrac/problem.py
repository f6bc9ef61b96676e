"""Problem files, run reports and the CSV format used by the CLI.

A problem file is one JSON object::

    {"kind": "bvp", "a": 0, "b": 5, "nu": 0.5,
     "p": "one", "q": 0, "h": "identity",
     "bc": [1, 0, 1, 0, 0, 0]}

Coefficients ``p``, ``q`` and ``h`` are a number, one of the builtin names in
:data:`BUILTINS`, or a list with one value per point of the coefficient's
lattice (``p``: ``N_{a+1}^b``; ``q``, ``h``: ``N_{a+1}^{b-1}``, except for
``caputo_ivp`` where ``h`` runs over ``N_{a+1}^b``).  ``init`` is
``[A, B]`` for ``selfadjoint_ivp`` and ``[c_0, ..., c_{N-1}]`` for
``caputo_ivp``; ``bc`` is ``[alpha, beta, gamma, delta, A, B]`` or an object
with those keys.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .calculus import caputo_diff
from .errors import DomainError, ValidationError
from .greens import SturmLiouvilleBC, boundary_residuals, solvability, solve_bvp
from .grid import Domain, FracOrder, GridFunction, nabla_diff_n
from .selfadjoint import (
    CaputoIvpSpec,
    InitialData,
    SelfAdjointProblem,
    residual,
    solve_caputo_ivp_stepping,
    solve_selfadjoint_ivp,
)

KINDS = ("caputo_ivp", "selfadjoint_ivp", "bvp")

BUILTINS = {
    "one": lambda t: 1.0,
    "identity": lambda t: t,
    "t": lambda t: t,
}

BC_KEYS = ("alpha", "beta", "gamma", "delta", "A", "B")


def format_float(x: float) -> str:
    """17 significant digits; round-trips every double exactly."""
    return f"{x:.16e}"


def _number(raw: dict, key: str) -> float:
    if key not in raw:
        raise ValidationError(f"missing field `{key}`")
    v = raw[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ValidationError(f"field `{key}` must be a finite number, got {v!r}")
    return float(v)


def coefficient(spec: Any, name: str, start: float, end: float) -> GridFunction:
    """Turn a coefficient spec into a grid function on ``N_start^end``."""
    dom = Domain.between(start, end)
    if isinstance(spec, bool):
        raise ValidationError(f"field `{name}`: booleans are not coefficients")
    if isinstance(spec, (int, float)):
        return GridFunction.constant(dom, spec)
    if isinstance(spec, str):
        if spec not in BUILTINS:
            raise ValidationError(f"field `{name}`: unknown builtin {spec!r} (known: {', '.join(BUILTINS)})")
        return GridFunction.from_callable(dom, BUILTINS[spec])
    if isinstance(spec, (list, tuple)):
        if len(spec) != dom.size:
            raise ValidationError(
                f"field `{name}`: expected {dom.size} values on N_{start:g}^{end:g}, got {len(spec)}"
            )
        try:
            return GridFunction(dom, [float(v) for v in spec])
        except (TypeError, ValueError):
            raise ValidationError(f"field `{name}`: list entries must be numbers") from None
    raise ValidationError(f"field `{name}`: expected number, builtin name or list, got {type(spec).__name__}")


def parse_bc(spec: Any) -> SturmLiouvilleBC:
    if isinstance(spec, dict):
        missing = [k for k in BC_KEYS[:4] if k not in spec]
        if missing:
            raise ValidationError(f"field `bc`: missing {', '.join(missing)}")
        vals = [spec.get(k, 0.0) for k in BC_KEYS]
    elif isinstance(spec, (list, tuple)) and len(spec) in (4, 6):
        vals = list(spec) + [0.0] * (6 - len(spec))
    else:
        raise ValidationError("field `bc`: expected [alpha, beta, gamma, delta, A, B]")
    try:
        return SturmLiouvilleBC(*(float(v) for v in vals))
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"field `bc`: {exc}") from None


@dataclass(frozen=True, eq=False)
class ProblemFile:
    kind: str
    a: float
    b: float
    nu: float
    raw: dict = field(repr=False)

    @classmethod
    def from_dict(cls, raw: dict) -> "ProblemFile":
        if not isinstance(raw, dict):
            raise ValidationError("problem file must hold a JSON object")
        kind = raw.get("kind")
        if kind not in KINDS:
            raise ValidationError(f"field `kind` must be one of {', '.join(KINDS)}, got {kind!r}")
        a, b, nu = _number(raw, "a"), _number(raw, "b"), _number(raw, "nu")
        if nu <= 0:
            raise ValidationError(f"field `nu` must be positive, got {nu}")
        if kind != "caputo_ivp" and nu > 1:
            raise ValidationError(f"field `nu` must lie in (0, 1] for {kind}, got {nu}")
        try:
            n = Domain.between(a, b).length
        except DomainError:
            raise ValidationError(f"field `b`: b - a must be a positive integer (a={a}, b={b})") from None
        need = 1 if kind == "caputo_ivp" else 2
        if n < need:
            raise ValidationError(f"field `b`: need b - a >= {need}, got {n}")
        if kind == "bvp" and "bc" not in raw:
            raise ValidationError("missing field `bc`")
        return cls(kind, a, b, nu, raw)

    @classmethod
    def load(cls, path) -> "ProblemFile":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ValidationError(f"cannot read problem file: {exc}") from None
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"problem file is not valid JSON: {exc}") from None
        return cls.from_dict(raw)

    def selfadjoint(self) -> SelfAdjointProblem:
        a, b = self.a, self.b
        r = self.raw
        return SelfAdjointProblem(
            a, b, FracOrder(self.nu),
            coefficient(r.get("p", 1.0), "p", a + 1, b),
            coefficient(r.get("q", 0.0), "q", a + 1, b - 1),
            coefficient(r.get("h", 0.0), "h", a + 1, b - 1),
        )

    def caputo_spec(self) -> CaputoIvpSpec:
        order = FracOrder(self.nu)
        c = self.raw.get("init", [0.0] * order.ceil_n)
        if not isinstance(c, (list, tuple)) or len(c) != order.ceil_n:
            raise ValidationError(f"field `init`: expected {order.ceil_n} values c_0..c_{order.ceil_n - 1}")
        try:
            c = [float(v) for v in c]
        except (TypeError, ValueError):
            raise ValidationError("field `init`: entries must be numbers") from None
        h = coefficient(self.raw.get("h", 0.0), "h", self.a + 1, self.b)
        return CaputoIvpSpec(self.a, order, c, h)

    def initial_data(self) -> InitialData:
        init = self.raw.get("init", [0.0, 0.0])
        if isinstance(init, dict):
            init = [init.get("A", 0.0), init.get("B", 0.0)]
        if not isinstance(init, (list, tuple)) or len(init) != 2:
            raise ValidationError("field `init`: expected [A, B]")
        try:
            return InitialData(float(init[0]), float(init[1]))
        except (TypeError, ValueError):
            raise ValidationError("field `init`: entries must be numbers") from None

    def bc(self) -> SturmLiouvilleBC:
        return parse_bc(self.raw["bc"])


# ---------------------------------------------------------------------------
# CSV


def solution_csv(x: GridFunction) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "x"])
    for t, v in zip(x.domain.points(), x.values):
        w.writerow([format_float(t), format_float(v)])
    return buf.getvalue()


def read_solution_csv(text: str) -> GridFunction:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["t", "x"]:
        raise ValidationError("solution CSV must start with the header t,x")
    ts = [float(r[0]) for r in rows[1:]]
    xs = [float(r[1]) for r in rows[1:]]
    if not ts:
        raise ValidationError("solution CSV has no rows")
    return GridFunction(Domain.between(ts[0], ts[-1]), xs)


# ---------------------------------------------------------------------------
# running and checking


@dataclass
class RunReport:
    kind: str
    solution: GridFunction
    residual_max: float
    condition_residuals: dict
    solvability: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "points": self.solution.domain.size,
            "residual_max": self.residual_max,
            "condition_residuals": self.condition_residuals,
        }
        if self.solvability is not None:
            out["solvability"] = self.solvability
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def check_solution(prob: ProblemFile, x: GridFunction, caputo_boundary_at_b: bool = False) -> tuple[float, dict]:
    """Residual max-norm and initial/boundary residuals of a candidate solution."""
    if prob.kind == "caputo_ivp":
        spec = prob.caputo_spec()
        res = [abs(caputo_diff(x, spec.nu, t, spec.a) - spec.h(t)) for t in spec.h.domain.points()]
        conds = {
            f"c{k}": nabla_diff_n(x.restrict(spec.a - k, spec.a), k)(spec.a) - c
            for k, c in enumerate(spec.c)
        }
        return float(max(res)), conds
    sa = prob.selfadjoint()
    rmax = float(np.max(np.abs(residual(sa, x))))
    if prob.kind == "selfadjoint_ivp":
        init = prob.initial_data()
        return rmax, {"x(a)": x(sa.a) - init.A, "nabla x(a+1)": x(sa.a + 1) - x(sa.a) - init.B}
    left, right = boundary_residuals(sa, prob.bc(), x, caputo_boundary_at_b)
    return rmax, {"left": left, "right": right}


def run(prob: ProblemFile, caputo_boundary_at_b: bool = False, tol: float | None = None) -> tuple[str, RunReport]:
    """Solve ``prob``; return the solution CSV text and a report checked against it.

    Residuals are recomputed from the values parsed back out of the CSV.
    """
    solv = None
    if prob.kind == "caputo_ivp":
        x = solve_caputo_ivp_stepping(prob.caputo_spec(), prob.b)
    elif prob.kind == "selfadjoint_ivp":
        x = solve_selfadjoint_ivp(prob.selfadjoint(), prob.initial_data())
    else:
        sa, bc = prob.selfadjoint(), prob.bc()
        kw = {} if tol is None else {"tol": tol}
        rep = solvability(sa, bc, caputo_boundary_at_b, **kw)
        solv = {"rho": rep.rho, "det_D": rep.det_D, "scale": rep.scale, "solvable": rep.solvable}
        x = solve_bvp(sa, bc, caputo_boundary_at_b, **kw)
    text = solution_csv(x)
    emitted = read_solution_csv(text)
    rmax, conds = check_solution(prob, emitted, caputo_boundary_at_b)
    return text, RunReport(prob.kind, emitted, rmax, conds, solv)
