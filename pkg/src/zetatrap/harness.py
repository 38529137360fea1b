"""Experiment drivers: configs, convergence sweeps, conditioning tables,
field evaluation, and external stencil-table ingestion.

All drivers are pure functions from a :class:`ProblemConfig` to lists of
CSV-ready rows; the CLI module handles argument parsing and file output.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass

import numpy as np

from . import nystrom, quadrature
from .geometry import ParametricCurve, curve_from_descriptor, sample
from .kernels import helmholtz_constants
from .specfun import hankel1_array
from .zetaweights import CorrectionStencil, build_log_stencil

__all__ = [
    "ProblemConfig",
    "QuadratureMethod",
    "ExternalStencilTable",
    "ConfigError",
    "StencilTableError",
    "OffGridTableError",
    "load_config",
    "default_helmholtz_config",
    "default_stokes_config",
    "known_solution",
    "fit_eoc",
    "run_convergence",
    "run_table1",
    "run_field",
    "ingest_stencil_table",
    "stencil_from_table",
]

SATURATION_FLOOR = 1e-11
DEFAULT_SOURCE_RADIUS = 0.4
DEFAULT_TARGET_RADIUS = 2.0
STOKES_REFERENCE_N = 2000
STOKES_REFERENCE_ORDER = 16


class ConfigError(ValueError):
    """Invalid problem configuration."""


class StencilTableError(ValueError):
    """Malformed external stencil table file."""


class OffGridTableError(StencilTableError):
    """Table declares off-grid nodes, which assembly does not support."""


@dataclass(frozen=True)
class QuadratureMethod:
    """One quadrature selection for a sweep.

    ``name`` is "zeta", "kress", or "external"; zeta/external carry a
    correction stencil (order 2K+2).
    """

    name: str
    label: str
    stencil: CorrectionStencil | None = None

    @property
    def order(self) -> float | None:
        return None if self.stencil is None else self.stencil.order


@dataclass(frozen=True)
class ExternalStencilTable:
    """Parsed external correction-weight table."""

    name: str
    order: int
    on_grid: bool
    rows: tuple[tuple[float, float], ...]  # (node offset, weight)


@dataclass(frozen=True)
class ProblemConfig:
    """Full experiment description (JSON-loadable)."""

    problem: str  # "helmholtz" or "stokes"
    curve: ParametricCurve
    kappa: complex | None
    methods: tuple[QuadratureMethod, ...]
    n_list: tuple[int, ...]
    sources: np.ndarray  # (ns, 2), Helmholtz known-solution mode
    strengths: np.ndarray  # (ns,), complex
    targets: np.ndarray  # (nt, 2) test locations
    shear_rate: float = 5.0  # Stokes: u_inf = (shear_rate * x2, 0)


def _default_sources() -> np.ndarray:
    ang = np.array([0.0, 2 * math.pi / 3, 4 * math.pi / 3])
    return DEFAULT_SOURCE_RADIUS * np.stack([np.cos(ang), np.sin(ang)], axis=1)


def _default_targets() -> np.ndarray:
    ang = 2 * math.pi * np.arange(8) / 8
    return DEFAULT_TARGET_RADIUS * np.stack([np.cos(ang), np.sin(ang)], axis=1)


def _method_from_spec(spec) -> QuadratureMethod:
    if isinstance(spec, str):
        spec = {"name": spec}
    name = spec.get("name")
    if name == "kress":
        return QuadratureMethod(name="kress", label="kress")
    if name == "zeta":
        if "K" in spec:
            K = int(spec["K"])
        elif "order" in spec:
            order = int(spec["order"])
            if order < 2 or order % 2:
                raise ConfigError(f"zeta order must be even and >= 2, got {order}")
            K = (order - 2) // 2
        else:
            raise ConfigError("zeta method requires 'K' or 'order'")
        return QuadratureMethod(
            name="zeta", label=f"zeta{2 * K + 2}", stencil=build_log_stencil(K)
        )
    if name == "external":
        path = spec.get("table")
        if not path:
            raise ConfigError("external method requires 'table' path")
        table = ingest_stencil_table(path)
        return QuadratureMethod(
            name="external", label=table.name, stencil=stencil_from_table(table)
        )
    raise ConfigError(f"unknown quadrature method {name!r}")


def _curve_diameter(curve: ParametricCurve) -> float:
    pos = sample(curve, np.linspace(0, curve.period, 256, endpoint=False)).pos
    d = np.hypot(
        pos[:, None, 0] - pos[None, :, 0], pos[:, None, 1] - pos[None, :, 1]
    )
    return float(d.max())


def load_config(source) -> ProblemConfig:
    """Build a config from a JSON file path, JSON string, or dict."""
    if isinstance(source, dict):
        raw = source
    else:
        text = str(source)
        if text.lstrip().startswith("{"):
            raw = json.loads(text)
        else:
            with open(text, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
    problem = raw.get("problem")
    if problem not in ("helmholtz", "stokes"):
        raise ConfigError(f"problem must be 'helmholtz' or 'stokes', got {problem!r}")
    curve = curve_from_descriptor(raw.get("curve", {"type": "star"}))
    kappa = None
    if problem == "helmholtz":
        if "kappa" in raw:
            k = raw["kappa"]
            kappa = complex(k[0], k[1]) if isinstance(k, (list, tuple)) else complex(k)
        if "wavelengths" in raw:
            diam = _curve_diameter(curve)
            implied = 2 * math.pi * float(raw["wavelengths"]) / diam
            if kappa is None:
                kappa = complex(implied)
            elif abs(kappa.real - implied) > 0.05 * implied:
                raise ConfigError(
                    f"kappa {kappa} inconsistent with wavelengths spec "
                    f"(implies Re kappa = {implied:.4g})"
                )
        if kappa is None:
            raise ConfigError("helmholtz config requires 'kappa' or 'wavelengths'")
    methods = tuple(_method_from_spec(m) for m in raw.get("methods", [{"name": "zeta", "K": 7}]))
    if not methods:
        raise ConfigError("at least one quadrature method is required")
    n_list = tuple(int(n) for n in raw.get("N", [64, 128, 256, 512]))
    if any(n < quadrature.MIN_NODES for n in n_list):
        raise ConfigError(f"all N must be >= {quadrature.MIN_NODES}")
    sources = np.asarray(raw.get("sources", _default_sources()), dtype=float)
    strengths = np.asarray(
        raw.get("strengths", np.ones(len(sources))), dtype=complex
    )
    if len(strengths) != len(sources):
        raise ConfigError("sources and strengths must have equal length")
    targets = np.asarray(raw.get("targets", _default_targets()), dtype=float)
    cfg = ProblemConfig(
        problem=problem,
        curve=curve,
        kappa=kappa,
        methods=methods,
        n_list=n_list,
        sources=sources,
        strengths=strengths,
        targets=targets,
        shear_rate=float(raw.get("shear_rate", 5.0)),
    )
    _validate_points(cfg)
    return cfg


def _validate_points(cfg: ProblemConfig):
    data = sample(cfg.curve, np.linspace(0, cfg.curve.period, 512, endpoint=False))
    rad = np.hypot(data.pos[:, 0], data.pos[:, 1])
    tmin, tmax = rad.min(), rad.max()
    tr = np.hypot(cfg.targets[:, 0], cfg.targets[:, 1])
    if np.any(tr <= tmax):
        raise ConfigError("test targets must lie strictly outside the curve")
    if cfg.problem == "helmholtz":
        sr = np.hypot(cfg.sources[:, 0], cfg.sources[:, 1])
        if np.any(sr >= tmin):
            raise ConfigError("sources must lie strictly inside the curve")


def default_helmholtz_config(kappa: complex, **overrides) -> ProblemConfig:
    raw = {
        "problem": "helmholtz",
        "curve": {"type": "star", "base": 1.0, "amplitude": 0.3, "lobes": 5},
        "kappa": [complex(kappa).real, complex(kappa).imag],
        "methods": [{"name": "zeta", "K": 7}, {"name": "kress"}],
        "N": [64, 128, 256, 512],
    }
    raw.update(overrides)
    return load_config(raw)


def default_stokes_config(**overrides) -> ProblemConfig:
    raw = {
        "problem": "stokes",
        "curve": {"type": "star", "base": 1.0, "amplitude": 0.3, "lobes": 5},
        "methods": [
            {"name": "zeta", "K": 2},
            {"name": "zeta", "K": 4},
            {"name": "zeta", "K": 7},
        ],
        "N": [64, 128, 256, 512],
    }
    raw.update(overrides)
    return load_config(raw)


def known_solution(
    kappa: complex,
    sources: np.ndarray,
    strengths: np.ndarray,
    points: np.ndarray,
) -> np.ndarray:
    """Superposition of interior point sources: sum_l c_l (i/4) H0(kappa r_l)."""
    points = np.atleast_2d(points)
    out = np.zeros(len(points), dtype=complex)
    for y, c in zip(sources, strengths):
        r = np.hypot(points[:, 0] - y[0], points[:, 1] - y[1])
        out += c * 0.25j * hankel1_array(0, kappa * r)
    return out


def fit_eoc(n_values, errors, floor: float = SATURATION_FLOOR):
    """Least-squares slope of log error vs log N over pre-saturation points.

    Returns (eoc, n_used) where ``n_used`` lists the window; the EOC is
    reported as a positive order (error ~ N^-eoc).
    """
    pts = [
        (n, e)
        for n, e in zip(n_values, errors)
        if np.isfinite(e) and e > floor
    ]
    if len(pts) < 2:
        return float("nan"), []
    ns = np.log([p[0] for p in pts])
    es = np.log([p[1] for p in pts])
    slope = np.polyfit(ns, es, 1)[0]
    return float(-slope), [p[0] for p in pts]


def _assemble(cfg: ProblemConfig, method: QuadratureMethod, N: int):
    if cfg.problem == "helmholtz":
        consts = helmholtz_constants(cfg.kappa)
        return nystrom.assemble_helmholtz(
            cfg.curve, N, consts, method.name, method.stencil
        )
    return nystrom.assemble_stokes(cfg.curve, N, method.stencil, method.name)


def _solve_and_eval(cfg: ProblemConfig, bie, targets: np.ndarray):
    """Solve the BIE for the configured data and evaluate at the targets."""
    if cfg.problem == "helmholtz":
        rhs = known_solution(cfg.kappa, cfg.sources, cfg.strengths, bie.data.pos)
        rep = nystrom.solve_gmres(bie.matrix, rhs)
        vals = nystrom.eval_helmholtz_potential(bie, rep.solution, targets)
        return rep, vals
    uinf = np.stack(
        [cfg.shear_rate * bie.data.pos[:, 1], np.zeros(bie.grid.N)], axis=1
    ).ravel()
    rep = nystrom.solve_gmres(bie.matrix, -uinf)
    flow = nystrom.eval_stokes_velocity(bie, rep.solution, targets)
    vals = flow + np.stack(
        [cfg.shear_rate * targets[:, 1], np.zeros(len(targets))], axis=1
    )
    return rep, vals


def _stokes_reference(cfg: ProblemConfig) -> np.ndarray:
    """Self-converged reference velocity at the test targets."""
    stencil = build_log_stencil((STOKES_REFERENCE_ORDER - 2) // 2)
    bie = nystrom.assemble_stokes(cfg.curve, STOKES_REFERENCE_N, stencil)
    _, vals = _solve_and_eval(cfg, bie, cfg.targets)
    return vals


def run_convergence(cfg: ProblemConfig):
    """Error sweep over N for every configured method.

    Returns (rows, eoc_rows). Row schema:
    (N, method, order, max_rel_error, assemble_s, solve_s); EOC schema:
    (method, order, eoc, fit window as 'n1;n2;...').
    """
    if cfg.problem == "helmholtz":
        ref = known_solution(cfg.kappa, cfg.sources, cfg.strengths, cfg.targets)
    else:
        ref = _stokes_reference(cfg)
    scale = float(np.abs(ref).max())
    rows = []
    eoc_rows = []
    for method in cfg.methods:
        errs = []
        for N in cfg.n_list:
            t0 = time.perf_counter()
            bie = _assemble(cfg, method, N)
            t1 = time.perf_counter()
            rep, vals = _solve_and_eval(cfg, bie, cfg.targets)
            t2 = time.perf_counter()
            err = float(np.abs(vals - ref).max()) / scale
            errs.append(err)
            rows.append(
                (
                    N,
                    method.label,
                    "" if method.order is None else method.order,
                    err,
                    t1 - t0,
                    t2 - t1,
                )
            )
        eoc, window = fit_eoc(cfg.n_list, errs)
        eoc_rows.append(
            (
                method.label,
                "" if method.order is None else method.order,
                eoc,
                ";".join(str(n) for n in window),
            )
        )
    return rows, eoc_rows


def run_table1(cfg: ProblemConfig, N: int = 512):
    """Conditioning and GMRES iteration table at fixed N.

    Row schema: (method, order, Re kappa, Im kappa, cond2, iterations,
    residual).
    """
    if cfg.problem != "helmholtz":
        raise ConfigError("the conditioning table is a Helmholtz experiment")
    rows = []
    for method in cfg.methods:
        bie = _assemble(cfg, method, N)
        cond = nystrom.cond_2norm(bie.matrix)
        rhs = known_solution(cfg.kappa, cfg.sources, cfg.strengths, bie.data.pos)
        rep = nystrom.solve_gmres(bie.matrix, rhs)
        rows.append(
            (
                method.label,
                "" if method.order is None else method.order,
                cfg.kappa.real,
                cfg.kappa.imag,
                cond,
                rep.iterations,
                rep.residual_norm,
            )
        )
    return rows


def run_field(cfg: ProblemConfig, grid_spec: dict, N: int = 512):
    """Field values on a rectangular grid; near-curve points are masked.

    Row schema, Helmholtz: (x, y, Re u, Im u, mask); Stokes:
    (x, y, u1, u2, mask). mask=1 flags points inside the near-field
    cutoff, whose values are emitted as NaN.
    """
    nx, ny_ = int(grid_spec["nx"]), int(grid_spec["ny"])
    xs = np.linspace(grid_spec["xmin"], grid_spec["xmax"], nx)
    ys = np.linspace(grid_spec["ymin"], grid_spec["ymax"], ny_)
    pts = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2)
    method = cfg.methods[0]
    bie = _assemble(cfg, method, N)
    d = np.hypot(
        pts[:, None, 0] - bie.data.pos[None, :, 0],
        pts[:, None, 1] - bie.data.pos[None, :, 1],
    )
    nearest = d.argmin(axis=1)
    far = d[np.arange(len(pts)), nearest] >= (
        nystrom.NEAR_FIELD_FACTOR * bie.grid.h * bie.data.speed[nearest]
    )
    rows = []
    if cfg.problem == "helmholtz":
        vals = np.full(len(pts), np.nan, dtype=complex)
        if far.any():
            rhs = known_solution(cfg.kappa, cfg.sources, cfg.strengths, bie.data.pos)
            rep = nystrom.solve_gmres(bie.matrix, rhs)
            vals[far] = nystrom.eval_helmholtz_potential(bie, rep.solution, pts[far])
        for p, v, ok in zip(pts, vals, far):
            rows.append((p[0], p[1], v.real, v.imag, 0 if ok else 1))
    else:
        vals = np.full((len(pts), 2), np.nan)
        if far.any():
            _, vf = _solve_and_eval(cfg, bie, pts[far])
            vals[far] = vf
        for p, v, ok in zip(pts, vals, far):
            rows.append((p[0], p[1], v[0], v[1], 0 if ok else 1))
    return rows


def ingest_stencil_table(path: str) -> ExternalStencilTable:
    """Parse an external correction-weight table.

    Format: UTF-8 text with header lines ``name:``, ``order:``,
    ``grid: on|off``, followed by whitespace-separated ``offset weight``
    pairs; ``#`` starts a comment.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    name = None
    order = None
    grid_flag = None
    rows = []
    seen_content = False
    for lineno, line in enumerate(lines, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        seen_content = True
        low = body.lower()
        if low.startswith("name:"):
            name = body[5:].strip()
        elif low.startswith("order:"):
            try:
                order = int(body[6:].strip())
            except ValueError as exc:
                raise StencilTableError(f"line {lineno}: bad order value") from exc
        elif low.startswith("grid:"):
            val = body[5:].strip().lower()
            if val not in ("on", "off"):
                raise StencilTableError(
                    f"line {lineno}: grid flag must be 'on' or 'off'"
                )
            grid_flag = val
        else:
            parts = body.split()
            if len(parts) != 2:
                raise StencilTableError(
                    f"line {lineno}: expected 'offset weight' pair"
                )
            try:
                off, w = float(parts[0]), float(parts[1])
            except ValueError as exc:
                raise StencilTableError(
                    f"line {lineno}: non-numeric entry"
                ) from exc
            if not (math.isfinite(off) and math.isfinite(w)):
                raise StencilTableError(f"line {lineno}: non-finite entry")
            rows.append((off, w))
    if not seen_content:
        raise StencilTableError("empty stencil table file")
    if name is None or order is None or grid_flag is None:
        raise StencilTableError(
            "missing required header line (name:, order:, grid:)"
        )
    if order < 2:
        raise StencilTableError(f"order must be >= 2, got {order}")
    if not rows:
        raise StencilTableError("no weight rows in stencil table")
    return ExternalStencilTable(
        name=name, order=order, on_grid=(grid_flag == "on"), rows=tuple(rows)
    )


def stencil_from_table(table: ExternalStencilTable) -> CorrectionStencil:
    """Convert an on-grid table to an assembly-ready correction stencil.

    Off-grid tables (Alpert-style auxiliary nodes) are rejected: assembly
    only supports corrections supported on the trapezoidal grid itself.
    """
    if not table.on_grid:
        raise OffGridTableError(
            f"table {table.name!r} declares 'grid: off'; off-grid correction "
            "nodes are not supported"
        )
    offsets = {}
    for off, w in table.rows:
        j = round(off)
        if abs(off - j) > 1e-12 or j < 0:
            raise StencilTableError(
                f"on-grid table has non-integer or negative offset {off}"
            )
        offsets[int(j)] = offsets.get(int(j), 0.0) + w
    K = max(offsets)
    weights = tuple(offsets.get(j, 0.0) for j in range(K + 1))
    return CorrectionStencil(
        kind="log", K=K, z=None, weights=weights, order=float(table.order)
    )
