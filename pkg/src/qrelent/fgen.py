"""Operator monotone decreasing generator functions and their integral data.

Every generator ``f`` with ``f(1) = 0`` and no linear part admits the
representation::

    f(x) = a_f (1 - x) + int_0^inf (1/(t + x) - 1/(t + 1)) m(t) dt

with a positive density ``m``.  All built-ins carry ``a_f = 0`` and a
density of the form ``m(t) = c * t**s``; the integrals ``H_f`` and ``G_f``
governing closest-separable-state optimality are evaluated against it.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .quadrature import DEFAULT_SPEC, QuadratureError, QuadratureSpec, integrate_semi_infinite

__all__ = [
    "GeneratorFunction",
    "RepresentationReport",
    "BUILTIN_NAMES",
    "make_builtin",
    "parse_spec",
    "hf",
    "gf",
    "integrand_g",
    "classify_hf",
    "verify_representation",
    "CLASSIFY_GRID",
    "REPRESENTATION_POINTS",
]

BUILTIN_NAMES = ("neg_log", "neg_power", "scaled_power", "tsallis", "power_entropy")

# registry aliases used on the command line
_SPEC_ALIASES = {
    "log": "neg_log",
    "neg_log": "neg_log",
    "power": "neg_power",
    "neg_power": "neg_power",
    "scaled_power": "scaled_power",
    "tsallis": "tsallis",
    "power_entropy": "power_entropy",
}

CLASSIFY_GRID = np.round(np.arange(1, 50) * 0.02, 12)
REPRESENTATION_POINTS = (0.1, 0.5, 1.0, 2.0, 10.0)

_CLOSED_FORM_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class GeneratorFunction:
    """A generator ``f`` together with its Loewner representation data.

    The measure density is ``m(t) = measure_scale * t**singular_exponent``.
    ``f_at_zero`` is the limit of ``f(x)`` as ``x`` decreases to 0 (possibly
    ``inf``); ``hf_closed`` is an analytic ``H_f`` when one is known.
    """

    name: str
    params: tuple
    closed_form: Callable[[np.ndarray], np.ndarray]
    a_f: float
    b_f: float
    measure_scale: float
    singular_exponent: float
    f_at_zero: float
    hf_closed: Optional[Callable[[float], float]] = None
    domain_note: str = ""
    label: str = field(default="")

    def __call__(self, x):
        return self.closed_form(np.asarray(x, dtype=float))

    def measure_density(self, t):
        t = np.asarray(t, dtype=float)
        return self.measure_scale * t ** self.singular_exponent

    def limit_at_zero(self):
        return self.f_at_zero

    def __repr__(self):
        return f"GeneratorFunction({self.label or self.name})"


def _check_open_unit(name, value):
    if not (0.0 < value < 1.0):
        raise ValueError(f"{name} parameter must lie in (0, 1), got {value!r}")


def _power_family(name, params, exponent, scale, label, note):
    # f(x) = scale * (1 - x**e); density scale * sin(e pi)/pi * t**e; H_f(q) = scale * e * q**e
    e = float(exponent)
    c = float(scale)
    return GeneratorFunction(
        name=name,
        params=params,
        closed_form=lambda x: c * (1.0 - x ** e),
        a_f=0.0,
        b_f=c * (math.cos(e * math.pi / 2) - 1.0),
        measure_scale=c * math.sin(e * math.pi) / math.pi,
        singular_exponent=e,
        f_at_zero=c,
        hf_closed=lambda q: c * e * q ** e,
        domain_note=note,
        label=label,
    )


def _neg_log(x):
    with np.errstate(divide="ignore"):
        return -np.log(x)


def make_builtin(name: str, *params: float) -> GeneratorFunction:
    """Construct a built-in generator function.

    ``neg_log`` takes no parameter.  ``neg_power`` (``1 - x**p``),
    ``scaled_power`` (``(1 - x**p)/(p(1-p))``), ``tsallis``
    (``(1 - x**(1-q))/(1-q)``) and ``power_entropy`` (``1 - x**(1-alpha)``)
    take one parameter in ``(0, 1)``.

    The returned object is validated: ``f(1) = 0``, sampled convexity and
    monotonicity, and agreement of the integral representation with the
    closed form.  Results are cached, so repeated construction is cheap and
    returns the identical object.
    """
    return _make_builtin(_SPEC_ALIASES.get(name, name), tuple(float(p) for p in params))


@functools.lru_cache(maxsize=None)
def _make_builtin(name, params):
    if name == "neg_log":
        if params:
            raise ValueError("neg_log takes no parameters")
        f = GeneratorFunction(
            name="neg_log",
            params=(),
            closed_form=_neg_log,
            a_f=0.0,
            b_f=0.0,
            measure_scale=1.0,
            singular_exponent=0.0,
            f_at_zero=math.inf,
            hf_closed=lambda q: 1.0,
            domain_note="x > 0",
            label="log",
        )
    else:
        if len(params) != 1:
            raise ValueError(f"{name} takes exactly one parameter")
        (v,) = params
        if name == "neg_power":
            _check_open_unit("neg_power", v)
            f = _power_family(name, params, v, 1.0, f"power:{v:g}", "p in (0, 1)")
        elif name == "scaled_power":
            _check_open_unit("scaled_power", v)
            f = _power_family(name, params, v, 1.0 / (v * (1.0 - v)), f"scaled_power:{v:g}", "p in (0, 1)")
        elif name == "tsallis":
            _check_open_unit("tsallis", v)
            f = _power_family(name, params, 1.0 - v, 1.0 / (1.0 - v), f"tsallis:{v:g}", "q in (0, 1)")
        elif name == "power_entropy":
            _check_open_unit("power_entropy", v)
            f = _power_family(name, params, 1.0 - v, 1.0, f"power_entropy:{v:g}", "alpha in (0, 1)")
        else:
            raise ValueError(f"unknown generator function {name!r}")

    _validate(f)
    return f


def _validate(f):
    if abs(float(f(1.0))) > 1e-12:
        raise ValueError(f"{f!r} violates f(1) = 0")
    x = np.linspace(0.01, 10.0, 1000)
    y = f(x)
    if np.any(np.diff(y) > 0):
        raise ValueError(f"{f!r} is not decreasing on the sample grid")
    if np.any(np.diff(y, 2) < -1e-12):
        raise ValueError(f"{f!r} is not convex on the sample grid")
    report = verify_representation(f)
    if not report.passed:
        raise ValueError(
            f"{f!r}: integral representation disagrees with closed form "
            f"(max error {report.max_abs_error:.3e})"
        )


def parse_spec(spec: str) -> GeneratorFunction:
    """Resolve a registry string such as ``log`` or ``tsallis:0.3``."""
    head, _, tail = spec.strip().partition(":")
    if head not in _SPEC_ALIASES:
        raise ValueError(f"unknown function spec {spec!r}")
    if not tail:
        return make_builtin(head)
    try:
        value = float(tail)
    except ValueError:
        raise ValueError(f"bad parameter in function spec {spec!r}") from None
    return make_builtin(head, value)


def _require_no_linear_part(f):
    if f.a_f != 0:
        raise ValueError(f"{f!r} has a_f > 0; H_f and G_f require a_f = 0")


def _quad(f, kernel, spec):
    s = f.singular_exponent
    try:
        value, _ = integrate_semi_infinite(
            lambda t: kernel(t) * f.measure_density(t), lead=s, decay=s - 2.0, spec=spec
        )
    except QuadratureError as exc:
        raise QuadratureError(f"{f!r}: {exc}", exc.value, exc.achieved) from None
    return value


@functools.lru_cache(maxsize=65536)
def _hf_quad(f, p, spec):
    return _quad(f, lambda t: p / (t + p) ** 2, spec)


@functools.lru_cache(maxsize=65536)
def _gf_quad(f, p, q, spec):
    r = math.sqrt(p * q)
    return _quad(f, lambda t: r / ((t + p) * (t + q)), spec)


def hf(f: GeneratorFunction, p: float, spec: QuadratureSpec = DEFAULT_SPEC, method: str = "auto") -> float:
    """``H_f(p) = int_0^inf p (t + p)**-2 m(t) dt``.

    ``method`` is ``"quad"`` (always integrate), ``"closed"`` (analytic form
    only) or ``"auto"``: the analytic form when the generator has one, cross
    checked against quadrature to 1e-8, and quadrature otherwise.
    """
    _require_no_linear_part(f)
    p = float(p)
    if not (0.0 < p <= 1.0):
        raise ValueError(f"H_f needs p in (0, 1], got {p!r}")
    if method == "quad" or (method == "auto" and f.hf_closed is None):
        return _hf_quad(f, p, spec)
    if f.hf_closed is None:
        raise ValueError(f"{f!r} has no closed-form H_f")
    closed = float(f.hf_closed(p))
    if method == "auto":
        numeric = _hf_quad(f, p, spec)
        if abs(numeric - closed) > _CLOSED_FORM_TOL:
            raise QuadratureError(
                f"{f!r}: closed-form H_f({p}) = {closed!r} disagrees with quadrature {numeric!r}",
                value=numeric,
                achieved=abs(numeric - closed),
            )
    elif method != "closed":
        raise ValueError(f"unknown method {method!r}")
    return closed


def gf(f: GeneratorFunction, p: float, q: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``G_f(p, q) = int_0^inf sqrt(pq) / ((t + p)(t + q)) m(t) dt``.

    Arguments are sorted before integrating, so the result is exactly
    symmetric.
    """
    _require_no_linear_part(f)
    p, q = sorted((float(p), float(q)))
    if not (0.0 < p and q <= 1.0):
        raise ValueError(f"G_f needs p, q in (0, 1], got {(p, q)!r}")
    return _gf_quad(f, p, q, spec)


def integrand_g(t, p, q):
    """Kernel ``g_t(p, q) = sqrt(pq) / ((t + p)(t + q))``."""
    return np.sqrt(p * q) / ((t + p) * (t + q))


def classify_hf(f: GeneratorFunction, spec: QuadratureSpec = DEFAULT_SPEC) -> str:
    """Classify ``p -> H_f(p)`` on the grid 0.02, 0.04, ..., 0.98.

    Returns ``"constant"`` when the total variation is at most 1e-7,
    ``"increasing"``/``"decreasing"`` when every step moves by more than
    1e-9 in one direction, and ``"other"`` otherwise.
    """
    values = np.array([hf(f, p, spec, method="quad") for p in CLASSIFY_GRID])
    steps = np.diff(values)
    if np.sum(np.abs(steps)) <= 1e-7:
        return "constant"
    if np.all(steps > 1e-9):
        return "increasing"
    if np.all(steps < -1e-9):
        return "decreasing"
    return "other"


@dataclass
class RepresentationReport:
    points: tuple
    integrals: np.ndarray
    closed: np.ndarray
    max_abs_error: float
    tolerance: float = 1e-8

    @property
    def passed(self) -> bool:
        return bool(self.max_abs_error <= self.tolerance)


def verify_representation(f: GeneratorFunction, spec: QuadratureSpec = DEFAULT_SPEC) -> RepresentationReport:
    """Compare ``int (1/(t+x) - 1/(t+1)) m(t) dt`` with ``f(x)`` at fixed points."""
    if f.a_f != 0:
        raise ValueError("representation check is only implemented for a_f = 0")
    integrals = []
    for x in REPRESENTATION_POINTS:
        # 1/(t+x) - 1/(t+1) = (1-x)/((t+x)(t+1)) avoids cancellation in the tail
        integrals.append(_quad(f, lambda t, x=x: (1.0 - x) / ((t + x) * (t + 1.0)), spec))
    integrals = np.array(integrals)
    closed = np.array([float(f(x)) for x in REPRESENTATION_POINTS])
    err = float(np.max(np.abs(integrals - closed)))
    return RepresentationReport(REPRESENTATION_POINTS, integrals, closed, err)
