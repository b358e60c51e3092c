"""Pointwise pseudo-Riemannian tensor calculus on explicit metrics.

All curvature quantities are assembled from central finite differences of
the metric component functions (one Richardson extrapolation level by
default, giving effectively fourth-order stencils).  Conventions, pinned so
the constant-curvature anchors in the test suite hold:

* curvature operator  R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z
  - nabla_[X,Y] Z, stored as R[l,k,i,j] meaning R(e_i,e_j)e_k = R^l_kij e_l;
* Ricci contraction over the first slot, S(X,Y) = sum_i eps_i g(R(e_i,X)Y, e_i),
  i.e. S_ab = R^l_bla in coordinates.

See docs/conventions.md for the full sign table.  Every operation is a pure
function of (metric, point, config); nothing here mutates shared state, so
concurrent evaluation over points is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .expressions import (
    Const,
    EvalDomainError,
    Expr,
    compile_expr,
    differentiate,
    parse,
    variables,
)

__all__ = [
    "GeometryError",
    "SingularMetricError",
    "SignatureError",
    "TwoRouteMismatch",
    "NumericsConfig",
    "DEFAULT_NUMERICS",
    "MetricSpec",
    "TensorSample",
    "ChristoffelSample",
    "VectorFieldSpec",
    "FramePack",
    "metric_at",
    "inverse_metric",
    "christoffel",
    "riemann",
    "ricci",
    "scalar_curvature",
    "einstein_tensor",
    "cov_deriv_vector",
    "lie_derivative_metric",
    "gradient_scalar",
    "hessian_scalar",
    "divergence_vector",
    "laplacian_routes",
    "laplacian_scalar",
    "orthonormal_frame",
    "frame_from_matrix",
    "div_tensor11",
    "cov_deriv_tensor11",
    "riemann_antisymmetry_residual",
    "bianchi_first_residual",
    "contracted_bianchi_residual",
    "metric_compatibility_residual",
    "fd_convergence_ratio",
    "max_abs",
]


class GeometryError(RuntimeError):
    """Base class for numerical-geometry failures."""


class SingularMetricError(GeometryError):
    """Metric determinant below the degeneracy threshold at a point."""


class SignatureError(GeometryError):
    """Diagonalised metric does not have Lorentzian signature (-,+,+,+)."""


class TwoRouteMismatch(GeometryError):
    """Two independent routes to the same quantity disagree beyond tolerance."""


@dataclass(frozen=True)
class NumericsConfig:
    """Finite-difference step, Richardson switch, and degeneracy threshold.

    The degeneracy test is scale-aware: a point aborts when the smallest
    metric eigenvalue magnitude drops below ``degeneracy_threshold`` times
    the largest, so uniformly small (still invertible) metrics pass while
    genuinely degenerate ones error out instead of extrapolating garbage.
    """

    h: float = 1e-3
    richardson: bool = True
    degeneracy_threshold: float = 1e-12
    two_route_tol: float = 1e-6

    def __post_init__(self) -> None:
        if self.h <= 0:
            raise ValueError("finite-difference step h must be positive")
        if self.degeneracy_threshold <= 0:
            raise ValueError("degeneracy threshold must be positive")


DEFAULT_NUMERICS = NumericsConfig()


def max_abs(a: np.ndarray | float) -> float:
    """Sup norm over components; the residual norm used throughout."""
    return float(np.max(np.abs(a)))


@dataclass(frozen=True)
class TensorSample:
    """Components of one tensor evaluated at one coordinate point."""

    kind: str  # scalar | vector | oneform | tensor02 | tensor11 | tensor13
    components: np.ndarray
    point: tuple[float, ...]
    symmetric: bool = False
    symmetry_defect: float | None = None

    def __post_init__(self) -> None:
        comp = np.asarray(self.components, dtype=float)
        comp.setflags(write=False)
        object.__setattr__(self, "components", comp)
        rank = {"scalar": 0, "vector": 1, "oneform": 1, "tensor02": 2, "tensor11": 2, "tensor13": 4}
        if self.kind not in rank:
            raise ValueError(f"unknown tensor kind {self.kind!r}")
        if comp.ndim != rank[self.kind]:
            raise ValueError(f"{self.kind} sample must have rank {rank[self.kind]}, got shape {comp.shape}")
        if self.symmetric and comp.ndim == 2 and max_abs(comp - comp.T) != 0.0:
            raise ValueError("sample flagged symmetric but storage is not")


@dataclass(frozen=True)
class ChristoffelSample:
    """Connection coefficients G[k,i,j] = Gamma^k_ij at one point."""

    components: np.ndarray
    point: tuple[float, ...]

    def __post_init__(self) -> None:
        comp = np.asarray(self.components, dtype=float)
        comp.setflags(write=False)
        object.__setattr__(self, "components", comp)


@dataclass(frozen=True)
class FramePack:
    """Orthonormal frame vectors (rows) and their signs eps_i."""

    vectors: np.ndarray  # vectors[i] = components of e_i
    signs: tuple[int, ...]
    point: tuple[float, ...]


def _coerce_expr(value: Expr | str | float, coords: Sequence[str]) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, str):
        return parse(value, coords)
    return Const(float(value))


@dataclass(frozen=True)
class MetricSpec:
    """Symmetric grid of component expressions defining g in one chart."""

    coords: tuple[str, ...]
    components: tuple[tuple[Expr, ...], ...]
    signature: str = "lorentzian"

    def __post_init__(self) -> None:
        n = len(self.coords)
        if n < 2:
            raise ValueError("metric needs dimension >= 2")
        if len(set(self.coords)) != n:
            raise ValueError("coordinate names must be unique")
        if len(self.components) != n or any(len(row) != n for row in self.components):
            raise ValueError("component grid must be n x n")
        for i in range(n):
            for j in range(i):
                if self.components[i][j] != self.components[j][i]:
                    raise ValueError(f"component grid is not symmetric at ({i},{j})")
        for row in self.components:
            for e in row:
                unknown = variables(e) - set(self.coords)
                if unknown:
                    raise ValueError(f"metric component uses undeclared coordinates {sorted(unknown)}")

    @property
    def dim(self) -> int:
        return len(self.coords)

    @classmethod
    def from_grid(
        cls,
        grid: Sequence[Sequence[Expr | str | float]],
        coords: Sequence[str],
        signature: str = "lorentzian",
    ) -> "MetricSpec":
        comps = tuple(tuple(_coerce_expr(v, coords) for v in row) for row in grid)
        return cls(tuple(coords), comps, signature)

    @classmethod
    def diagonal(
        cls,
        entries: Sequence[Expr | str | float],
        coords: Sequence[str],
        signature: str = "lorentzian",
    ) -> "MetricSpec":
        n = len(entries)
        grid = [[Const(0.0)] * n for _ in range(n)]
        for i, e in enumerate(entries):
            grid[i][i] = _coerce_expr(e, coords)
        return cls(tuple(coords), tuple(tuple(row) for row in grid), signature)

    @cached_property
    def _matrix_fn(self) -> Callable[..., tuple]:
        # one compiled callable returning the full grid keeps stencil
        # evaluation cheap; cached_property is safe on this frozen type
        # (a benign duplicate compile under races returns identical code)
        from .expressions import _py_source  # shared codegen

        names = {c: f"c{i}" for i, c in enumerate(self.coords)}
        rows = []
        for row in self.components:
            rows.append("(" + ", ".join(_py_source(e, names) for e in row) + ",)")
        src = f"lambda {', '.join(names.values())}: ({', '.join(rows)},)"
        return eval(src, {"_m": math})  # noqa: S307 - generated from the closed grammar

    def matrix(self, point: Sequence[float]) -> np.ndarray:
        """Raw component matrix g_ij(P); no degeneracy check."""
        p = _as_point(self, point)
        try:
            vals = self._matrix_fn(*p)
        except (ZeroDivisionError, ValueError, OverflowError) as exc:
            raise EvalDomainError(f"metric components undefined at {tuple(p)}: {exc}") from None
        return np.asarray(vals, dtype=float)


def _as_point(m: MetricSpec, point: Sequence[float]) -> tuple[float, ...]:
    p = tuple(float(v) for v in point)
    if len(p) != m.dim:
        raise ValueError(f"point has {len(p)} coordinates, metric has {m.dim}")
    return p


def _g(m: MetricSpec, point: Sequence[float], cfg: NumericsConfig) -> np.ndarray:
    g = m.matrix(point)
    spectrum = np.sort(np.abs(np.linalg.eigvalsh(g)))
    if spectrum[-1] == 0.0 or spectrum[0] <= cfg.degeneracy_threshold * spectrum[-1]:
        raise SingularMetricError(
            f"metric degenerate at {tuple(point)} (eigenvalue ratio "
            f"{spectrum[0]:.3e} / {spectrum[-1]:.3e})"
        )
    return g


def _ginv(m: MetricSpec, point: Sequence[float], cfg: NumericsConfig) -> np.ndarray:
    return np.linalg.inv(_g(m, point, cfg))


# -- finite differences --------------------------------------------------


def _shift(point: Sequence[float], axis: int, delta: float) -> np.ndarray:
    q = np.array(point, dtype=float)
    q[axis] += delta
    return q


def _d1(fn: Callable[[np.ndarray], np.ndarray | float], point, axis: int, cfg: NumericsConfig):
    """Central first derivative along one axis, Richardson-extrapolated."""
    h = cfg.h
    d = (np.asarray(fn(_shift(point, axis, h))) - np.asarray(fn(_shift(point, axis, -h)))) / (2 * h)
    if cfg.richardson:
        d2 = (np.asarray(fn(_shift(point, axis, h / 2))) - np.asarray(fn(_shift(point, axis, -h / 2)))) / h
        d = (4.0 * d2 - d) / 3.0
    return d


def _grad_all(fn, point, cfg: NumericsConfig) -> np.ndarray:
    """Stack of _d1 over every axis; leading axis is the derivative index."""
    return np.stack([np.asarray(_d1(fn, point, k, cfg), dtype=float) for k in range(len(point))])


def _d2_same(fn: Callable[[np.ndarray], float], point, axis: int, cfg: NumericsConfig) -> float:
    f0 = fn(np.array(point, dtype=float))

    def stencil(h: float) -> float:
        return (fn(_shift(point, axis, h)) - 2.0 * f0 + fn(_shift(point, axis, -h))) / (h * h)

    d = stencil(cfg.h)
    if cfg.richardson:
        d = (4.0 * stencil(cfg.h / 2) - d) / 3.0
    return d


def _d2_cross(fn: Callable[[np.ndarray], float], point, ax1: int, ax2: int, cfg: NumericsConfig) -> float:
    def stencil(h: float) -> float:
        pp = fn(_shift(_shift(point, ax1, h), ax2, h))
        pm = fn(_shift(_shift(point, ax1, h), ax2, -h))
        mp = fn(_shift(_shift(point, ax1, -h), ax2, h))
        mm = fn(_shift(_shift(point, ax1, -h), ax2, -h))
        return (pp - pm - mp + mm) / (4.0 * h * h)

    d = stencil(cfg.h)
    if cfg.richardson:
        d = (4.0 * stencil(cfg.h / 2) - d) / 3.0
    return d


# -- metric-level operations ---------------------------------------------


def metric_at(m: MetricSpec, point, cfg: NumericsConfig | None = None) -> TensorSample:
    """Symmetric matrix g_ij(P); errors if the matrix is degenerate."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    return TensorSample("tensor02", _g(m, p, cfg), p, symmetric=True)


def inverse_metric(m: MetricSpec, point, cfg: NumericsConfig | None = None) -> TensorSample:
    """Contravariant inverse; g . g^-1 stays within 1e-12 of identity."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    return TensorSample("tensor02", _ginv(m, p, cfg), p, symmetric=False)


def _dmetric(m: MetricSpec, point, cfg: NumericsConfig) -> np.ndarray:
    """dg[k,i,j] = d_k g_ij by central differences."""
    return _grad_all(lambda q: _g(m, q, cfg), point, cfg)


def _christoffel_from_dg(g_inv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    lowered = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    return np.einsum("kl,lij->kij", g_inv, lowered)


def christoffel(m: MetricSpec, point, cfg: NumericsConfig | None = None) -> ChristoffelSample:
    """Levi-Civita coefficients Gamma^k_ij; symmetric in (i,j) by construction."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    gamma = _christoffel_from_dg(_ginv(m, p, cfg), _dmetric(m, p, cfg))
    return ChristoffelSample(gamma, p)


def _gamma(m: MetricSpec, point, cfg: NumericsConfig) -> np.ndarray:
    return _christoffel_from_dg(_ginv(m, point, cfg), _dmetric(m, point, cfg))


def _riemann(m: MetricSpec, point, cfg: NumericsConfig) -> np.ndarray:
    # derivative of the assembled Gamma rather than third metric derivatives;
    # dG[a,b,c,d] = d_a Gamma^b_cd
    gamma = _gamma(m, point, cfg)
    dgamma = _grad_all(lambda q: _gamma(m, q, cfg), point, cfg)
    r = (
        np.einsum("iljk->lkij", dgamma)
        - np.einsum("jlik->lkij", dgamma)
        + np.einsum("lim,mjk->lkij", gamma, gamma)
        - np.einsum("ljm,mik->lkij", gamma, gamma)
    )
    return r


def riemann(m: MetricSpec, point, cfg: NumericsConfig | None = None) -> TensorSample:
    """Curvature components R[l,k,i,j] = R^l_kij (see module docstring)."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    return TensorSample("tensor13", _riemann(m, p, cfg), p)


def _ricci_raw(m: MetricSpec, point, cfg: NumericsConfig) -> np.ndarray:
    return np.einsum("lbla->ab", _riemann(m, point, cfg))


def ricci(m: MetricSpec, point, cfg: NumericsConfig | None = None) -> TensorSample:
    """Ricci tensor, symmetrised; the raw asymmetry is kept as a diagnostic."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    raw = _ricci_raw(m, p, cfg)
    defect = max_abs(raw - raw.T)
    sym = 0.5 * (raw + raw.T)
    return TensorSample("tensor02", sym, p, symmetric=True, symmetry_defect=defect)


def _ricci(m: MetricSpec, point, cfg: NumericsConfig) -> np.ndarray:
    raw = _ricci_raw(m, point, cfg)
    return 0.5 * (raw + raw.T)


def scalar_curvature(m: MetricSpec, point, cfg: NumericsConfig | None = None) -> float:
    """r = g^ij S_ij."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    return float(np.einsum("ij,ij->", _ginv(m, p, cfg), _ricci(m, p, cfg)))


def _einstein(m: MetricSpec, point, cfg: NumericsConfig) -> np.ndarray:
    g = _g(m, point, cfg)
    s = _ricci(m, point, cfg)
    r = float(np.einsum("ij,ij->", np.linalg.inv(g), s))
    return s - 0.5 * r * g


def einstein_tensor(m: MetricSpec, point, cfg: NumericsConfig | None = None) -> TensorSample:
    """G_ij = S_ij - (r/2) g_ij."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    return TensorSample("tensor02", _einstein(m, p, cfg), p, symmetric=True)


# -- vector fields --------------------------------------------------------


@dataclass(frozen=True)
class VectorFieldSpec:
    """Contravariant components, or a scalar potential tagged as a gradient."""

    coords: tuple[str, ...]
    components: tuple[Expr, ...] | None = None
    potential: Expr | None = None

    def __post_init__(self) -> None:
        if (self.components is None) == (self.potential is None):
            raise ValueError("give either components or a gradient potential")
        if self.components is not None and len(self.components) != len(self.coords):
            raise ValueError("component count must match the coordinate count")

    @classmethod
    def from_components(cls, entries: Sequence[Expr | str | float], coords: Sequence[str]) -> "VectorFieldSpec":
        return cls(tuple(coords), components=tuple(_coerce_expr(e, coords) for e in entries))

    @classmethod
    def gradient_of(cls, potential: Expr | str, coords: Sequence[str]) -> "VectorFieldSpec":
        return cls(tuple(coords), potential=_coerce_expr(potential, coords))

    @property
    def is_gradient(self) -> bool:
        return self.potential is not None

    @cached_property
    def _component_fns(self) -> tuple[Callable[..., float], ...] | None:
        if self.components is None:
            return None
        return tuple(compile_expr(e, self.coords) for e in self.components)

    @cached_property
    def _potential_fn(self) -> Callable[..., float] | None:
        if self.potential is None:
            return None
        return compile_expr(self.potential, self.coords)

    def value(self, m: MetricSpec, point, cfg: NumericsConfig) -> np.ndarray:
        """Contravariant components at one point (raised df for gradients)."""
        p = np.asarray(point, dtype=float)
        if self._component_fns is not None:
            return np.array([fn(*p) for fn in self._component_fns])
        partials = _grad_all(lambda q: self._potential_fn(*q), p, cfg)
        return _ginv(m, p, cfg) @ partials


def _field_fn(m: MetricSpec, v: VectorFieldSpec, cfg: NumericsConfig) -> Callable[[np.ndarray], np.ndarray]:
    return lambda q: v.value(m, q, cfg)


def cov_deriv_vector(m: MetricSpec, v: VectorFieldSpec, point, cfg: NumericsConfig | None = None) -> TensorSample:
    """nab[k,j] = (nabla_j V)^k = d_j V^k + Gamma^k_jm V^m."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    return TensorSample("tensor11", _cov_deriv_vector(m, v, p, cfg), p)


def _cov_deriv_vector(m, v, point, cfg) -> np.ndarray:
    dv = _grad_all(_field_fn(m, v, cfg), point, cfg)  # dv[j,k] = d_j V^k
    gamma = _gamma(m, point, cfg)
    vv = v.value(m, point, cfg)
    return dv.T + np.einsum("kjm,m->kj", gamma, vv)


def lie_derivative_metric(m: MetricSpec, v: VectorFieldSpec, point, cfg: NumericsConfig | None = None) -> TensorSample:
    """(Lie_V g)_ij = g(nabla_i V, e_j) + g(nabla_j V, e_i)."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    return TensorSample("tensor02", _lie_metric(m, v, p, cfg), p, symmetric=True)


def _lie_metric(m, v, point, cfg) -> np.ndarray:
    a = _g(m, point, cfg) @ _cov_deriv_vector(m, v, point, cfg)  # a[i,j] = (nabla_j V)_i
    return a + a.T


def gradient_scalar(m: MetricSpec, f: Expr, point, cfg: NumericsConfig | None = None) -> TensorSample:
    """(grad f)^i = g^ij d_j f."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    fn = compile_expr(f, m.coords)
    partials = _grad_all(lambda q: fn(*q), p, cfg)
    return TensorSample("vector", _ginv(m, p, cfg) @ partials, p)


def hessian_scalar(m: MetricSpec, f: Expr, point, cfg: NumericsConfig | None = None) -> TensorSample:
    """(Hess f)_ij = d_i d_j f - Gamma^k_ij d_k f."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    fn = compile_expr(f, m.coords)
    scalar = lambda q: fn(*q)  # noqa: E731
    n = m.dim
    d2 = np.empty((n, n))
    for i in range(n):
        d2[i, i] = _d2_same(scalar, p, i, cfg)
        for j in range(i):
            d2[i, j] = d2[j, i] = _d2_cross(scalar, p, i, j, cfg)
    partials = _grad_all(scalar, p, cfg)
    hess = d2 - np.einsum("kij,k->ij", _gamma(m, p, cfg), partials)
    hess = 0.5 * (hess + hess.T)
    return TensorSample("tensor02", hess, p, symmetric=True)


def divergence_vector(m: MetricSpec, v: VectorFieldSpec, point, cfg: NumericsConfig | None = None) -> float:
    """div V = (nabla_k V)^k."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    return float(np.trace(_cov_deriv_vector(m, v, p, cfg)))


def laplacian_routes(m: MetricSpec, f: Expr, point, cfg: NumericsConfig | None = None) -> tuple[float, float]:
    """(div grad f, trace of Hess f) -- two independent Laplacian routes."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    grad_field = VectorFieldSpec.gradient_of(f, m.coords)
    div_route = divergence_vector(m, grad_field, p, cfg)
    trace_route = float(
        np.einsum("ij,ij->", _ginv(m, p, cfg), hessian_scalar(m, f, p, cfg).components)
    )
    return div_route, trace_route


def laplacian_scalar(m: MetricSpec, f: Expr, point, cfg: NumericsConfig | None = None) -> float:
    """Laplace-Beltrami of f; errors if the two routes disagree."""
    cfg = cfg or DEFAULT_NUMERICS
    div_route, trace_route = laplacian_routes(m, f, point, cfg)
    if abs(div_route - trace_route) > cfg.two_route_tol:
        raise TwoRouteMismatch(
            f"laplacian routes differ by {abs(div_route - trace_route):.3e} at {tuple(point)}"
        )
    return trace_route


# -- frames ----------------------------------------------------------------


def frame_from_matrix(
    g: np.ndarray,
    timelike_hint: np.ndarray | None = None,
    point: tuple[float, ...] = (),
) -> FramePack:
    """Gram-Schmidt an orthonormal frame out of the coordinate basis.

    The candidate list is seeded with ``timelike_hint`` when given.  The
    result is reordered to signs (-1, +1, ..., +1); any other sign pattern
    raises SignatureError.
    """
    n = g.shape[0]
    candidates: list[np.ndarray] = []
    if timelike_hint is not None:
        candidates.append(np.asarray(timelike_hint, dtype=float))
    candidates.extend(np.eye(n))
    scale = max_abs(g)
    vectors: list[np.ndarray] = []
    signs: list[int] = []
    for cand in candidates:
        if len(vectors) == n:
            break
        b = cand.astype(float)
        for e, s in zip(vectors, signs):
            b = b - s * float(b @ g @ e) * e
        norm2 = float(b @ g @ b)
        if abs(norm2) < 1e-10 * scale * max(1.0, float(b @ b)):
            continue  # candidate is (numerically) dependent or null
        vectors.append(b / math.sqrt(abs(norm2)))
        signs.append(1 if norm2 > 0 else -1)
    if len(vectors) != n:
        raise SignatureError("could not complete an orthonormal frame (degenerate directions)")
    if signs.count(-1) != 1:
        raise SignatureError(f"expected exactly one timelike direction, found signs {tuple(signs)}")
    order = sorted(range(n), key=lambda i: (signs[i], i))  # timelike first, stable
    return FramePack(np.array([vectors[i] for i in order]), tuple(signs[i] for i in order), tuple(point))


def orthonormal_frame(
    m: MetricSpec,
    point,
    timelike_hint: np.ndarray | Sequence[float] | None = None,
    cfg: NumericsConfig | None = None,
) -> FramePack:
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    hint = None if timelike_hint is None else np.asarray(timelike_hint, dtype=float)
    return frame_from_matrix(_g(m, p, cfg), hint, p)


# -- (1,1) tensor fields ----------------------------------------------------


def cov_deriv_tensor11(
    m: MetricSpec,
    f_field: Callable[[np.ndarray], np.ndarray],
    point,
    cfg: NumericsConfig | None = None,
) -> np.ndarray:
    """covF[i,k,j] = (nabla_i F)^k_j for a componentwise (1,1) field."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    df = _grad_all(f_field, p, cfg)  # df[i,k,j] = d_i F^k_j
    gamma = _gamma(m, p, cfg)
    f0 = np.asarray(f_field(np.asarray(p)), dtype=float)
    return df + np.einsum("kim,mj->ikj", gamma, f0) - np.einsum("mij,km->ikj", gamma, f0)


def div_tensor11(
    m: MetricSpec,
    f_field: Callable[[np.ndarray], np.ndarray],
    point,
    cfg: NumericsConfig | None = None,
) -> TensorSample:
    """(div F)_j = (nabla_k F)^k_j, the frame-trace of the covariant derivative."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    cov = cov_deriv_tensor11(m, f_field, p, cfg)
    return TensorSample("oneform", np.einsum("kkj->j", cov), p)


# -- health checks -----------------------------------------------------------


def riemann_antisymmetry_residual(m: MetricSpec, point, cfg: NumericsConfig | None = None) -> float:
    """max |R^l_kij + R^l_kji|."""
    r = riemann(m, point, cfg).components
    return max_abs(r + np.einsum("lkij->lkji", r))


def bianchi_first_residual(m: MetricSpec, point, cfg: NumericsConfig | None = None) -> float:
    """Cyclic sum over the lowered last three slots of the curvature."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    low = np.einsum("lm,mkij->lkij", _g(m, p, cfg), _riemann(m, p, cfg))
    cyc = low + np.einsum("lkij->lijk", low) + np.einsum("lkij->ljki", low)
    return max_abs(cyc)


def contracted_bianchi_residual(m: MetricSpec, point, cfg: NumericsConfig | None = None) -> float:
    """max |nabla^i G_ij|; vanishes for exact geometry by the Bianchi identity."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    dg_field = _grad_all(lambda q: _einstein(m, q, cfg), p, cfg)  # [k,i,j] = d_k G_ij
    gamma = _gamma(m, p, cfg)
    g0 = _einstein(m, p, cfg)
    cov = (
        dg_field
        - np.einsum("mki,mj->kij", gamma, g0)
        - np.einsum("mkj,im->kij", gamma, g0)
    )
    div = np.einsum("ki,kij->j", _ginv(m, p, cfg), cov)
    return max_abs(div)


def metric_compatibility_residual(m: MetricSpec, point, cfg: NumericsConfig | None = None) -> float:
    """max |nabla_k g_ij| with the same stencils that built Gamma."""
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    dg = _dmetric(m, p, cfg)
    gamma = _christoffel_from_dg(_ginv(m, p, cfg), dg)
    g0 = _g(m, p, cfg)
    cov = dg - np.einsum("mki,mj->kij", gamma, g0) - np.einsum("mkj,im->kij", gamma, g0)
    return max_abs(cov)


def _christoffel_exact(m: MetricSpec, point) -> np.ndarray:
    """Gamma from symbolic component derivatives; oracle for the stencils."""
    n = m.dim
    p = tuple(float(v) for v in point)
    dg = np.empty((n, n, n))
    for k, name in enumerate(m.coords):
        for i in range(n):
            for j in range(i, n):
                fn = compile_expr(differentiate(m.components[i][j], name), m.coords)
                dg[k, i, j] = dg[k, j, i] = fn(*p)
    g = m.matrix(p)
    return _christoffel_from_dg(np.linalg.inv(g), dg)


def fd_convergence_ratio(m: MetricSpec, point, cfg: NumericsConfig | None = None) -> float | None:
    """Error ratio of plain second-order stencils when h is halved.

    Measured on the connection coefficients against the symbolic-derivative
    oracle with Richardson off; ~4 for healthy second-order stencils.  None
    when the error is at roundoff level (flat metrics).
    """
    cfg = cfg or DEFAULT_NUMERICS
    p = _as_point(m, point)
    exact = _christoffel_exact(m, p)
    errs = []
    for h in (cfg.h, cfg.h / 2):
        plain = NumericsConfig(h=h, richardson=False, degeneracy_threshold=cfg.degeneracy_threshold)
        errs.append(max_abs(_gamma(m, p, plain) - exact))
    if errs[1] < 1e-11 * max(1.0, max_abs(exact)):
        return None
    return errs[0] / errs[1]
