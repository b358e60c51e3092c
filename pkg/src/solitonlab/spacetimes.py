"""Catalog of explicit test spacetimes and the perfect-fluid algebra.

The catalog covers the flat-sliced warped products diag(-1, q(t)^2, q(t)^2,
q(t)^2): Minkowski (q = 1), the exponential slicing (q = exp(H t)), and an
arbitrary user scale factor.  The fluid side implements the stress tensor
of an isotropic fluid, the field-equation residual, the fit of a Ricci
sample to the A g + B eta (x) eta form, and the eigenvalue check of the
mixed field-equation operator.

Pointwise algebra here works on plain ndarrays; field-level operations that
walk the chart live in :mod:`solitonlab.geometry` and return TensorSample.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .expressions import Binary, Const, Expr, Unary, Var, evaluate, variables
from .geometry import (
    DEFAULT_NUMERICS,
    GeometryError,
    MetricSpec,
    NumericsConfig,
    TensorSample,
    VectorFieldSpec,
    _as_point,
    _coerce_expr,
    _g,
    _ricci,
    frame_from_matrix,
    max_abs,
    scalar_curvature,
)

__all__ = [
    "UnitNormError",
    "FluidValues",
    "FluidState",
    "FluidFormFit",
    "EigenCheckResult",
    "catalog_metric",
    "catalog_entries",
    "energy_momentum",
    "efe_residual",
    "ricci_from_fluid",
    "fluid_from_ricci",
    "scalar_curvature_identity",
    "ricci_operator",
    "einstein_eigen_check",
]

DEFAULT_COORDS = ("t", "x", "y", "z")


class UnitNormError(GeometryError):
    """A field required to be unit timelike is not (g(xi, xi) != -1)."""


@dataclass(frozen=True)
class FluidValues:
    """Fluid parameters evaluated to numbers at one instant."""

    sigma: float  # energy density
    rho: float  # isotropic pressure
    kappa: float  # gravitational constant
    lam: float  # cosmological constant


@dataclass(frozen=True)
class FluidState:
    """Fluid parameters; sigma, rho and lam may depend on the time coordinate."""

    sigma: float | Expr
    rho: float | Expr
    kappa: float
    lam: float | Expr

    def __post_init__(self) -> None:
        if self.kappa <= 0:
            raise ValueError("gravitational constant kappa must be positive")

    @classmethod
    def radiation(cls, rho: float, kappa: float, lam: float) -> "FluidState":
        """Trace-adjusted fluid with sigma = 3 rho."""
        return cls(sigma=3.0 * rho, rho=rho, kappa=kappa, lam=lam)

    def at(
        self,
        point: Sequence[float] | None = None,
        coords: Sequence[str] | None = None,
    ) -> FluidValues:
        def val(v: float | Expr) -> float:
            if isinstance(v, Expr):
                if point is None or coords is None:
                    raise ValueError("fluid has expression-valued parameters; a point is required")
                return evaluate(v, dict(zip(coords, point)))
            return float(v)

        return FluidValues(val(self.sigma), val(self.rho), float(self.kappa), val(self.lam))


@dataclass(frozen=True)
class FluidFormFit:
    """Least-structure fit of a Ricci sample to A g + B eta (x) eta."""

    a: float
    b: float
    residual: float
    isotropy_spread: float
    perfect_fluid: bool
    tolerance: float


@dataclass(frozen=True)
class EigenCheckResult:
    """Eigenvalues of the mixed field-equation operator vs the fluid multiset."""

    eigenvalues: tuple[float, ...]  # sorted ascending
    expected: tuple[float, ...]
    max_deviation: float
    efe_residual: float
    applicable: bool


# -- catalog ---------------------------------------------------------------


def catalog_metric(
    name: str,
    *,
    hubble: float = 1.0,
    scale_factor: Expr | str | None = None,
    coords: Sequence[str] = DEFAULT_COORDS,
) -> MetricSpec:
    """Build a catalog spacetime: diag(-1, q^2, q^2, q^2) with flat slices.

    ``minkowski`` has q = 1, ``de_sitter`` has q = exp(hubble * t), and
    ``grw_flat`` takes an arbitrary scale factor expression q(t) > 0.
    """
    coords = tuple(coords)
    tname = coords[0]
    if name == "minkowski":
        q2: Expr = Const(1.0)
    elif name == "de_sitter":
        q2 = Unary("exp", Binary("mul", Const(2.0 * float(hubble)), Var(tname)))
    elif name == "grw_flat":
        if scale_factor is None:
            raise ValueError("grw_flat requires a scale_factor expression")
        q = _coerce_expr(scale_factor, coords)
        extra = variables(q) - {tname}
        if extra:
            raise ValueError(f"scale factor may depend on {tname!r} only, found {sorted(extra)}")
        q2 = Binary("pow", q, Const(2.0))
    else:
        raise ValueError(f"unknown catalog metric {name!r}")
    return MetricSpec.diagonal([Const(-1.0), q2, q2, q2], coords)


def catalog_entries() -> list[dict]:
    return [
        {"name": "minkowski", "parameters": {}, "description": "flat spacetime diag(-1, 1, 1, 1)"},
        {
            "name": "de_sitter",
            "parameters": {"hubble": "expansion rate H (default 1.0)"},
            "description": "exponential flat slicing diag(-1, e^{2Ht}, e^{2Ht}, e^{2Ht})",
        },
        {
            "name": "grw_flat",
            "parameters": {"scale_factor": "expression q(t) > 0"},
            "description": "flat-sliced warped product diag(-1, q^2, q^2, q^2)",
        },
    ]


# -- pointwise fluid algebra -------------------------------------------------


def _check_unit_timelike(g: np.ndarray, xi: np.ndarray, tol: float = 1e-6) -> None:
    norm = float(xi @ g @ xi)
    if abs(norm + 1.0) > tol:
        raise UnitNormError(f"g(xi, xi) = {norm!r}, expected -1")


def energy_momentum(values: FluidValues, g: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """T_ij = rho g_ij + (sigma + rho) eta_i eta_j for a unit timelike eta."""
    g = np.asarray(g, dtype=float)
    eta = np.asarray(eta, dtype=float)
    xi = np.linalg.solve(g, eta)
    _check_unit_timelike(g, xi)
    return values.rho * g + (values.sigma + values.rho) * np.outer(eta, eta)


def ricci_from_fluid(values: FluidValues, g: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Synthetic Ricci tensor of an isotropic fluid with these parameters."""
    g = np.asarray(g, dtype=float)
    eta = np.asarray(eta, dtype=float)
    coeff = values.lam + values.kappa * (values.sigma - values.rho) / 2.0
    return coeff * g + values.kappa * (values.sigma + values.rho) * np.outer(eta, eta)


def efe_residual(
    m: MetricSpec,
    fluid: FluidState,
    xi: VectorFieldSpec,
    point,
    cfg: NumericsConfig | None = None,
) -> TensorSample:
    """S_ij + (lam - r/2) g_ij - kappa T_ij; zero iff the fluid solves the field equation."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    g = _g(m, p, cfg)
    xival = xi.value(m, p, cfg)
    _check_unit_timelike(g, xival)
    values = fluid.at(p, m.coords)
    s = _ricci(m, p, cfg)
    r = float(np.einsum("ij,ij->", np.linalg.inv(g), s))
    t = energy_momentum(values, g, g @ xival)
    res = s + (values.lam - r / 2.0) * g - values.kappa * t
    return TensorSample("tensor02", res, p, symmetric=True)


def fluid_from_ricci(
    s: np.ndarray,
    g: np.ndarray,
    xi: np.ndarray,
    kappa: float,
    lam: float,
    tolerance: float = 1e-5,
) -> tuple[FluidValues, FluidFormFit]:
    """Invert the fluid form of the Ricci tensor from one sample.

    A is the average of S(e,e) over the three spatial frame directions (their
    spread measures isotropy violation), B = S(xi,xi) + A; a large residual is
    data, not an error -- the sample simply is not of perfect-fluid form.
    """
    s = np.asarray(s, dtype=float)
    g = np.asarray(g, dtype=float)
    xi = np.asarray(xi, dtype=float)
    _check_unit_timelike(g, xi)
    frame = frame_from_matrix(g, timelike_hint=xi)
    spatial = [frame.vectors[i] for i in range(1, 4)]
    a_vals = [float(e @ s @ e) for e in spatial]
    a = float(np.mean(a_vals))
    spread = max(a_vals) - min(a_vals)
    b = float(xi @ s @ xi) + a
    eta = g @ xi
    residual = max_abs(s - a * g - b * np.outer(eta, eta))
    sigma = (b + 2.0 * (a - lam)) / (2.0 * kappa)
    rho = (b - 2.0 * (a - lam)) / (2.0 * kappa)
    fit = FluidFormFit(
        a=a,
        b=b,
        residual=residual,
        isotropy_spread=spread,
        perfect_fluid=bool(residual < tolerance and spread < tolerance),
        tolerance=tolerance,
    )
    return FluidValues(sigma, rho, float(kappa), float(lam)), fit


def scalar_curvature_identity(
    m: MetricSpec,
    fluid: FluidState,
    point,
    cfg: NumericsConfig | None = None,
) -> float:
    """r_computed - [4 lam + kappa (sigma - 3 rho)]; near zero for a matching fluid."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    values = fluid.at(p, m.coords)
    r = scalar_curvature(m, p, cfg)
    return r - (4.0 * values.lam + values.kappa * (values.sigma - 3.0 * values.rho))


def ricci_operator(s: np.ndarray, g_inv: np.ndarray, x: np.ndarray) -> np.ndarray:
    """(QX)^i = g^ik S_kj X^j, the raised Ricci applied to a vector."""
    return np.asarray(g_inv, dtype=float) @ np.asarray(s, dtype=float) @ np.asarray(x, dtype=float)


def einstein_eigen_check(
    m: MetricSpec,
    fluid: FluidState,
    xi: VectorFieldSpec,
    point,
    cfg: NumericsConfig | None = None,
    efe_tolerance: float = 1e-6,
) -> EigenCheckResult:
    """Eigenvalues of the mixed (S - r/2 g + lam g)^i_j against {-k sigma, k rho x3}.

    The multiset comparison only means something when the fluid actually
    solves the field equation at the point, so the residual gates an
    ``applicable`` flag rather than raising.
    """
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    g = _g(m, p, cfg)
    g_inv = np.linalg.inv(g)
    s = _ricci(m, p, cfg)
    r = float(np.einsum("ij,ij->", g_inv, s))
    values = fluid.at(p, m.coords)
    mixed = g_inv @ (s - 0.5 * r * g + values.lam * g)
    eig = np.linalg.eigvals(mixed)
    eig_sorted = np.sort_complex(eig)
    expected = np.sort(
        np.array([-values.kappa * values.sigma] + [values.kappa * values.rho] * 3)
    )
    deviation = float(np.max(np.abs(eig_sorted - expected)))
    res = efe_residual(m, fluid, xi, p, cfg)
    efe_norm = max_abs(res.components)
    return EigenCheckResult(
        eigenvalues=tuple(float(v.real) for v in eig_sorted),
        expected=tuple(float(v) for v in expected),
        max_deviation=deviation,
        efe_residual=efe_norm,
        applicable=bool(efe_norm <= efe_tolerance),
    )
