"""Simulation of stationary SaS fields driven by box-indicator kernels.

The field is ``X_s = int f(x + A s) M(dx, dzeta)`` where ``f`` is a weighted
sum of box indicators on R^k and constant on the torus factor, so only the
translation ``tau = A s`` of an index point matters.  Every sampler below
therefore works on the distinct translations of a dyadic window and maps the
values back to index points.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import lattice as la
from .action import ActionSpec, DimensionError, classify, model_digest
from .quadratic import QuadraticNumber

DEFAULT_BUDGET = 4_000_000
BUDGET_ENV = "STABLE_FIELD_LAB_BUDGET"
SERIES_TOLERANCE = 1e-3
SERIES_CAP = 100_000
METHODS = ("cell", "series")


class BudgetError(ValueError):
    """A grid or mesh exceeds the configured point budget."""


def point_budget(budget: Optional[int] = None) -> int:
    if budget is not None:
        return int(budget)
    env = os.environ.get(BUDGET_ENV)
    return int(env) if env else DEFAULT_BUDGET


def _to_fraction(x) -> Fraction:
    if isinstance(x, bool):
        raise TypeError("boolean is not a number")
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError("kernel entries must be finite")
        return Fraction(x)
    return Fraction(x)


# -- scalar stable variates ----------------------------------------------------

def sample_standard_sas(alpha: float, rng: np.random.Generator, size=None):
    """Standard symmetric alpha-stable variates (Chambers-Mallows-Stuck).

    Characteristic function ``exp(-|theta|^alpha)``, so that
    ``x^alpha P(|X| > x) -> tail_constant(alpha)``.
    """
    if not 0 < alpha < 2:
        raise ValueError("alpha must lie in (0, 2)")
    V = rng.uniform(-np.pi / 2, np.pi / 2, size)
    W = rng.standard_exponential(size)
    if alpha == 1:
        return np.tan(V)
    return (
        np.sin(alpha * V)
        / np.cos(V) ** (1 / alpha)
        * (np.cos((1 - alpha) * V) / W) ** ((1 - alpha) / alpha)
    )


def tail_constant(alpha: float) -> float:
    """Stable tail constant ``C_alpha = (int_0^inf x^-alpha sin x dx)^-1``."""
    if not 0 < alpha < 2:
        raise ValueError("alpha must lie in (0, 2)")
    if alpha == 1:
        return 2 / math.pi
    return (1 - alpha) / (math.gamma(2 - alpha) * math.cos(math.pi * alpha / 2))


# -- models ----------------------------------------------------------------------

@dataclass(frozen=True)
class KernelBox:
    w: Fraction
    a: tuple
    b: tuple

    @property
    def volume(self) -> Fraction:
        return math.prod((hi - lo for lo, hi in zip(self.a, self.b)), start=Fraction(1))


@dataclass(frozen=True)
class FieldModel:
    """An action, a stability index and a box-indicator kernel."""

    spec: ActionSpec
    alpha: float
    kernel: tuple
    digest: str = ""

    def __post_init__(self):
        if not 0 < self.alpha < 2:
            raise ValueError("alpha must lie in (0, 2)")
        if not self.kernel:
            raise ValueError("kernel needs at least one box")
        for box in self.kernel:
            if len(box.a) != self.spec.k or len(box.b) != self.spec.k:
                raise ValueError(f"kernel boxes must live in R^{self.spec.k}")
            if any(hi <= lo for lo, hi in zip(box.a, box.b)):
                raise ValueError("kernel boxes need positive volume")
        if kernel_norm(self, self.alpha) <= 0:
            raise ValueError("kernel has zero L^alpha norm")

    @property
    def k(self) -> int:
        return self.spec.k

    @classmethod
    def from_dict(cls, doc: dict) -> FieldModel:
        spec = ActionSpec.from_dict(doc)
        if "alpha" not in doc:
            raise ValueError("model needs 'alpha'")
        raw = doc["alpha"]
        alpha = float(Fraction(raw)) if isinstance(raw, str) else float(raw)
        boxes = []
        for i, item in enumerate(doc.get("kernel", [])):
            try:
                boxes.append(KernelBox(
                    w=_to_fraction(item.get("w", 1)),
                    a=tuple(_to_fraction(x) for x in item["a"]),
                    b=tuple(_to_fraction(x) for x in item["b"]),
                ))
            except (KeyError, TypeError, AttributeError) as exc:
                raise ValueError(f"kernel entry {i} needs 'a' and 'b' lists") from exc
        return cls(spec=spec, alpha=alpha, kernel=tuple(boxes), digest=model_digest(doc))

    @classmethod
    def load(cls, path) -> FieldModel:
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def scaled(self, c) -> FieldModel:
        """Same model with every kernel weight multiplied by ``c``."""
        c = _to_fraction(c)
        boxes = tuple(KernelBox(b.w * c, b.a, b.b) for b in self.kernel)
        return FieldModel(self.spec, self.alpha, boxes, digest=f"{self.digest}*{c}")


def bundled_model_path(name: str) -> Path:
    return Path(__file__).with_name("models") / f"{name}.json"


def load_bundled(name: str) -> FieldModel:
    return FieldModel.load(bundled_model_path(name))


def _box_edges(model: FieldModel, shifts: np.ndarray) -> list[np.ndarray]:
    """Per-axis sorted breakpoints of all kernel boxes shifted by ``-shifts``."""
    edges = []
    for e in range(model.k):
        pts = [float(b.a[e]) - shifts[:, e] for b in model.kernel]
        pts += [float(b.b[e]) - shifts[:, e] for b in model.kernel]
        edges.append(np.unique(np.concatenate(pts)))
    return edges


def kernel_norm(model: FieldModel, power: float) -> float:
    """``int |f|^power dmu`` computed exactly cell by cell."""
    if model.k == 0:
        return abs(float(sum(b.w for b in model.kernel))) ** power
    edges = _box_edges(model, np.zeros((1, model.k)))
    mids = [0.5 * (e[1:] + e[:-1]) for e in edges]
    lens = [np.diff(e) for e in edges]
    grids = np.meshgrid(*mids, indexing="ij")
    f = np.zeros(grids[0].shape)
    for box in model.kernel:
        inside = np.ones(f.shape, dtype=bool)
        for e, g in enumerate(grids):
            inside &= (g >= float(box.a[e])) & (g <= float(box.b[e]))
        f += float(box.w) * inside
    vol = np.ones(f.shape)
    for e, l in enumerate(lens):
        shape = [1] * model.k
        shape[e] = -1
        vol = vol * l.reshape(shape)
    return float(np.sum(np.abs(f) ** power * vol))


# -- index grids ------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    t_ladder: tuple
    level: int
    replications: int
    seed: int

    def __post_init__(self):
        ts = [float(t) for t in self.t_ladder]
        if not ts or any(t <= 0 for t in ts) or any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("t_ladder must be positive and strictly increasing")
        if self.level < 0:
            raise ValueError("level must be nonnegative")
        if self.replications < 1:
            raise ValueError("need at least one replication")


def _translation_split(spec: ActionSpec):
    """Integer matrices P, Q and denominator L with A gamma0 = (P + sqrt(D) Q) / L."""
    T = spec.translation_matrix()
    rows = [[x.a for x in row] + [x.b for x in row] for row in T]
    ints, den = la.clear_denominators(rows) if rows else ([], 1)
    P = np.array([r[: spec.d] for r in ints], dtype=object).reshape(spec.k, spec.d)
    Q = np.array([r[spec.d:] for r in ints], dtype=object).reshape(spec.k, spec.d)
    return P, Q, den


def _free_axes(spec: ActionSpec) -> list[int]:
    """Coordinates that must be enumerated.

    A coordinate can be pinned at 0 when it moves nothing (zero translation
    column) and gamma0 does not mix it with other coordinates, since then 0
    is the cheapest choice for the window constraint.
    """
    T = spec.translation_matrix()
    keep = []
    for j in range(spec.d):
        moves = any(row[j] != 0 for row in T)
        mixed = any(spec.gamma0[i][j] != 0 for i in range(spec.d) if i != j) or any(
            spec.gamma0[j][i] != 0 for i in range(spec.d) if i != j
        )
        if moves or mixed:
            keep.append(j)
    return keep


def grid_size(spec: ActionSpec, t_max: float, level: int) -> int:
    """Number of candidate points enumerated for the window ``[-t_max, t_max]^d``."""
    bounds = _coordinate_bounds(spec, t_max, level)
    return math.prod(2 * bounds[j] + 1 for j in _free_axes(spec))


def _coordinate_bounds(spec: ActionSpec, t_max: float, level: int) -> list[int]:
    g = np.array([[float(x) for x in row] for row in spec.gamma0])
    ginv = np.linalg.inv(g)
    rowsum = np.abs(ginv).sum(axis=1)
    return [int(math.floor(2 ** level * t_max * s + 1e-9)) for s in rowsum]


@dataclass
class TranslationGrid:
    """Distinct translations reached by a nested family of dyadic windows.

    ``points`` are the index points (Gamma_level coordinates of the
    enumerated axes), ``inverse`` maps each point to its translation and
    ``tau_level`` records the first window of the ladder containing each
    translation.
    """

    spec: ActionSpec
    t_ladder: tuple
    level: int
    coords: np.ndarray
    points: np.ndarray
    point_level: np.ndarray
    tau: np.ndarray
    inverse: np.ndarray
    tau_level: np.ndarray


def build_translation_grid(spec: ActionSpec, t_ladder: Sequence, level: int,
                           budget: Optional[int] = None) -> TranslationGrid:
    ts = np.array([float(t) for t in t_ladder])
    t_max = float(ts[-1])
    limit = point_budget(budget)
    size = grid_size(spec, t_max, level)
    if size > limit:
        raise BudgetError(f"window needs {size} grid points, budget is {limit}")
    axes = _free_axes(spec)
    bounds = _coordinate_bounds(spec, t_max, level)
    ranges = [np.arange(-bounds[j], bounds[j] + 1, dtype=np.int64) for j in axes]
    d = spec.d
    if ranges:
        mesh = np.meshgrid(*ranges, indexing="ij")
        sub = np.stack([m.ravel() for m in mesh], axis=1)
    else:
        sub = np.zeros((1, 0), dtype=np.int64)
    coords = np.zeros((sub.shape[0], d), dtype=np.int64)
    coords[:, axes] = sub
    g = np.array([[float(x) for x in row] for row in spec.gamma0])
    points = coords @ g.T / 2 ** level
    norm = np.abs(points).max(axis=1) if d else np.zeros(len(points))
    tol = 1e-9 * max(1.0, t_max)
    lvl = np.searchsorted(ts, norm - tol, side="left")
    inside = lvl < len(ts)
    coords, points, lvl = coords[inside], points[inside], lvl[inside]

    if spec.k == 0:
        inverse = np.zeros(len(coords), dtype=np.int64)
        tau = np.zeros((1, 0))
        tau_level = np.array([lvl.min()])
    else:
        P, Q, den = _translation_split(spec)
        keys = np.concatenate(
            [coords @ P.T.astype(np.int64), coords @ Q.T.astype(np.int64)], axis=1
        ).astype(np.int64)
        uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        k = spec.k
        tau = (uniq[:, :k] + math.sqrt(spec.D) * uniq[:, k:]) / (den * 2 ** level)
        tau_level = np.full(len(uniq), len(ts), dtype=np.int64)
        np.minimum.at(tau_level, inverse, lvl)
    return TranslationGrid(
        spec=spec, t_ladder=tuple(ts), level=level, coords=coords, points=points,
        point_level=lvl, tau=tau, inverse=inverse, tau_level=tau_level,
    )


# -- cell mesh and samplers -------------------------------------------------------

@dataclass
class _CellMesh:
    edges: list
    lo: list        # per box: per-axis index arrays (n_tau,)
    hi: list
    volume: np.ndarray

    @property
    def shape(self):
        return self.volume.shape

    @property
    def region(self):
        return [(float(e[0]), float(e[-1])) for e in self.edges]


def _cell_mesh(model: FieldModel, tau: np.ndarray, budget: Optional[int]) -> _CellMesh:
    edges = _box_edges(model, tau)
    n_cells = math.prod(len(e) - 1 for e in edges)
    limit = point_budget(budget)
    if n_cells > limit:
        raise BudgetError(f"cell mesh needs {n_cells} cells, budget is {limit}")
    lo, hi = [], []
    for box in model.kernel:
        lo.append([np.searchsorted(edges[e], float(box.a[e]) - tau[:, e]) for e in range(model.k)])
        hi.append([np.searchsorted(edges[e], float(box.b[e]) - tau[:, e]) for e in range(model.k)])
    vol = np.ones([len(e) - 1 for e in edges])
    for e, edge in enumerate(edges):
        shape = [1] * model.k
        shape[e] = -1
        vol = vol * np.diff(edge).reshape(shape)
    return _CellMesh(edges=edges, lo=lo, hi=hi, volume=vol)


def default_series_terms(model: FieldModel, region_volume: float,
                         tolerance: float = SERIES_TOLERANCE, cap: int = SERIES_CAP) -> int:
    """Smallest truncation J whose residual scale is below ``tolerance * ||f||_alpha``.

    The residual sum over j > J has second moment about
    ``C^(2/a) vol^(2/a) J^(1-2/a) / (2/a - 1) * int f^2 / vol``.
    """
    alpha = model.alpha
    expo = 2 / alpha - 1
    norm = kernel_norm(model, alpha) ** (1 / alpha)
    f2 = kernel_norm(model, 2.0)
    log_needed = (
        (2 / alpha) * math.log(tail_constant(alpha))
        + (2 / alpha - 1) * math.log(region_volume)
        + math.log(f2)
        - math.log(expo)
        - 2 * math.log(tolerance * norm)
    ) / expo
    if log_needed > math.log(cap):
        return cap
    return max(1, math.ceil(math.exp(log_needed)))


def _cell_weights(model, mesh, method, rng, series_terms, region):
    alpha = model.alpha
    if method == "cell":
        Z = sample_standard_sas(alpha, rng, mesh.shape)
        return mesh.volume ** (1 / alpha) * Z
    # LePage series with V_j uniform on the mesh region (density 1/vol)
    vol = math.prod(hi - lo for lo, hi in region)
    J = series_terms or default_series_terms(model, vol)
    arrivals = np.cumsum(rng.standard_exponential(J))
    signs = rng.choice([-1.0, 1.0], size=J)
    V = np.stack([rng.uniform(lo, hi, J) for lo, hi in region], axis=1)
    g = (tail_constant(alpha) * vol) ** (1 / alpha) * signs * arrivals ** (-1 / alpha)
    flat = np.zeros(J, dtype=np.int64)
    for e, edge in enumerate(mesh.edges):
        idx = np.clip(np.searchsorted(edge, V[:, e], side="right") - 1, 0, len(edge) - 2)
        flat = flat * (len(edge) - 1) + idx
    weights = np.bincount(flat, weights=g, minlength=mesh.volume.size)
    return weights.reshape(mesh.shape)


def _evaluate(model: FieldModel, mesh: _CellMesh, weights: np.ndarray) -> np.ndarray:
    P = weights
    for e in range(model.k):
        P = np.cumsum(P, axis=e)
        pad = [(0, 0)] * model.k
        pad[e] = (1, 0)
        P = np.pad(P, pad)
    n_tau = len(mesh.lo[0][0])
    Y = np.zeros(n_tau)
    for box, lo, hi in zip(model.kernel, mesh.lo, mesh.hi):
        acc = np.zeros(n_tau)
        for corner in itertools.product((0, 1), repeat=model.k):
            idx = tuple(hi[e] if c else lo[e] for e, c in enumerate(corner))
            sign = -1.0 if (model.k - sum(corner)) % 2 else 1.0
            acc += sign * P[idx]
        Y += float(box.w) * acc
    return Y


class _Sampler:
    """Draws field values at the translations of a grid, one realization per call."""

    def __init__(self, model: FieldModel, grid: TranslationGrid, method: str,
                 budget: Optional[int] = None, series_terms: Optional[int] = None,
                 region: Optional[Sequence] = None):
        if method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        self.model, self.grid, self.method = model, grid, method
        self.series_terms = series_terms
        if model.k == 0:
            self.mesh = None
            self.region = []
            return
        self.mesh = _cell_mesh(model, grid.tau, budget)
        needed = self.mesh.region
        if region is None:
            region = needed
        region = [(float(lo), float(hi)) for lo, hi in region]
        if method == "series" and any(
            lo > nlo or hi < nhi for (lo, hi), (nlo, nhi) in zip(region, needed)
        ):
            raise ValueError("series region does not cover all translated supports")
        self.region = region
        if method == "series":
            # the mesh must span the sampling region so every V_j lands in a cell
            self.mesh = _extend_mesh(model, grid.tau, self.mesh, region)

    def __call__(self, rng: np.random.Generator) -> np.ndarray:
        model = self.model
        if model.k == 0:
            total = float(sum(b.w for b in model.kernel))
            return np.full(len(self.grid.tau), total * sample_standard_sas(model.alpha, rng))
        weights = _cell_weights(model, self.mesh, self.method, rng, self.series_terms, self.region)
        return _evaluate(model, self.mesh, weights)


def _extend_mesh(model, tau, mesh, region):
    if mesh.region == [tuple(r) for r in region]:
        return mesh
    edges = [np.unique(np.concatenate([e, [lo, hi]])) for e, (lo, hi) in zip(mesh.edges, region)]
    lo = [[np.searchsorted(edges[e], float(b.a[e]) - tau[:, e]) for e in range(model.k)]
          for b in model.kernel]
    hi = [[np.searchsorted(edges[e], float(b.b[e]) - tau[:, e]) for e in range(model.k)]
          for b in model.kernel]
    vol = np.ones([len(e) - 1 for e in edges])
    for e, edge in enumerate(edges):
        shape = [1] * model.k
        shape[e] = -1
        vol = vol * np.diff(edge).reshape(shape)
    return _CellMesh(edges=edges, lo=lo, hi=hi, volume=vol)


# -- public operations --------------------------------------------------------------

@dataclass
class FieldSample:
    points: np.ndarray
    values: np.ndarray
    method: str
    seed: Optional[int] = None


def simulate_field(model: FieldModel, t: float, level: int, method: str = "cell",
                   rng: Optional[np.random.Generator] = None, *, seed: Optional[int] = None,
                   budget: Optional[int] = None, series_terms: Optional[int] = None,
                   region: Optional[Sequence] = None) -> FieldSample:
    """One realization of the field on ``Gamma_level`` cap ``[-t, t]^d``."""
    if t <= 0:
        raise ValueError("t must be positive")
    if rng is None:
        rng = np.random.default_rng(seed)
    grid = build_translation_grid(model.spec, [t], level, budget)
    sampler = _Sampler(model, grid, method, budget, series_terms, region)
    Y = sampler(rng)
    values = Y[grid.inverse]
    if not np.all(np.isfinite(values)):
        raise FloatingPointError("non-finite field value")
    return FieldSample(points=grid.points, values=values, method=method, seed=seed)


@dataclass
class MaximaDataset:
    """Partial maxima ``M_t`` for each replication (rows) and scale (columns)."""

    t_ladder: tuple
    values: np.ndarray
    seed: int
    method: str
    level: int
    meta: dict = field(default_factory=dict)

    @property
    def replications(self) -> int:
        return self.values.shape[0]

    def column(self, t) -> np.ndarray:
        return self.values[:, list(self.t_ladder).index(t)]

    def to_csv(self, path) -> None:
        path = Path(path)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t", "replication", "m_t", "seed", "method", "level"])
            for r in range(self.replications):
                for j, t in enumerate(self.t_ladder):
                    writer.writerow([_fmt(t), r, repr(float(self.values[r, j])),
                                     self.seed, self.method, self.level])
        meta = dict(self.meta, t_ladder=[_fmt(t) for t in self.t_ladder], seed=self.seed,
                    method=self.method, level=self.level, replications=self.replications)
        with open(meta_path(path), "w") as fh:
            json.dump(meta, fh, sort_keys=True, indent=2)
            fh.write("\n")

    @classmethod
    def from_csv(cls, path) -> MaximaDataset:
        path = Path(path)
        rows = []
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            expected = ["t", "replication", "m_t", "seed", "method", "level"]
            if reader.fieldnames != expected:
                raise ValueError(f"unexpected CSV header {reader.fieldnames}")
            rows = list(reader)
        if not rows:
            raise ValueError("empty dataset")
        ts = sorted({float(r["t"]) for r in rows})
        n_rep = 1 + max(int(r["replication"]) for r in rows)
        values = np.full((n_rep, len(ts)), np.nan)
        for r in rows:
            values[int(r["replication"]), ts.index(float(r["t"]))] = float(r["m_t"])
        if np.isnan(values).any():
            raise ValueError("dataset has missing (t, replication) cells")
        mp = meta_path(path)
        meta = json.loads(mp.read_text()) if mp.exists() else {}
        return cls(t_ladder=tuple(ts), values=values, seed=int(rows[0]["seed"]),
                   method=rows[0]["method"], level=int(rows[0]["level"]), meta=meta)


def meta_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def _fmt(t) -> str:
    t = float(t)
    return str(int(t)) if t.is_integer() else repr(t)


def replication_rng(seed: int, replication: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replication,)))


def partial_maxima(model: FieldModel, grid: GridSpec, method: str = "cell", *,
                   budget: Optional[int] = None, series_terms: Optional[int] = None,
                   jobs: int = 1, meta: Optional[dict] = None) -> MaximaDataset:
    """``M_t = max |X_s|`` over ``Gamma_n cap [-t, t]^d`` for every t of the ladder.

    Each replication draws one field realization (from its own substream of
    the master seed) shared by all windows, so ``M_t`` is nondecreasing in t.
    """
    tg = build_translation_grid(model.spec, grid.t_ladder, grid.level, budget)
    sampler = _Sampler(model, tg, method, budget, series_terms)
    n_t = len(grid.t_ladder)
    order = np.argsort(tg.tau_level, kind="stable")
    levels_sorted = tg.tau_level[order]
    starts = np.searchsorted(levels_sorted, np.arange(n_t))
    ends = np.searchsorted(levels_sorted, np.arange(n_t), side="right")

    def one(r: int) -> np.ndarray:
        Y = np.abs(sampler(replication_rng(grid.seed, r)))[order]
        per_level = np.array([Y[s:e].max() if e > s else 0.0 for s, e in zip(starts, ends)])
        return np.maximum.accumulate(per_level)

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(one, range(grid.replications)))
    else:
        rows = [one(r) for r in range(grid.replications)]
    values = np.vstack(rows)
    if not np.all(np.isfinite(values)):
        raise FloatingPointError("non-finite maxima")
    info = {"model_digest": model.digest, "alpha": model.alpha, "grid_points": int(len(tg.points)),
            "translations": int(len(tg.tau))}
    try:
        cls = classify(model.spec, model.alpha)
    except DimensionError:
        pass
    else:
        info.update(p=cls.p, conservative=cls.conservative)
    info.update(meta or {})
    return MaximaDataset(t_ladder=tuple(float(t) for t in grid.t_ladder), values=values,
                         seed=grid.seed, method=method, level=grid.level, meta=info)


def level_diagnostic(model: FieldModel, grid: GridSpec, method: str = "cell", *,
                     budget: Optional[int] = None, series_terms: Optional[int] = None,
                     jobs: int = 1) -> dict:
    """Relative change of median M_t when the skeleton is refined from n to n+1.

    M_t is a supremum over the dense dyadic set, approximated on Gamma_n; a
    small change suggests the skeleton level is fine enough.  No rate is
    claimed.  Returns ``{t: (median_n, median_n+1, relative_change)}``.
    """
    finer = GridSpec(grid.t_ladder, grid.level + 1, grid.replications, grid.seed)
    coarse_ds = partial_maxima(model, grid, method, budget=budget, series_terms=series_terms, jobs=jobs)
    fine_ds = partial_maxima(model, finer, method, budget=budget, series_terms=series_terms, jobs=jobs)
    out = {}
    for t, a, b in zip(coarse_ds.t_ladder, np.median(coarse_ds.values, axis=0),
                       np.median(fine_ds.values, axis=0)):
        out[t] = (float(a), float(b), float((b - a) / a) if a else float("inf"))
    return out


# -- the scale function b(T) -----------------------------------------------------------

def _single_box(model: FieldModel) -> KernelBox:
    if model.k != 1 or len(model.kernel) != 1:
        raise ValueError("exact b(T) needs one box on R^1; use bT_numeric")
    return model.kernel[0]


def translation_width(spec: ActionSpec) -> QuadraticNumber:
    """``sum_j |A_j|``: half-length of ``{A t : t in [-1, 1]^d}`` for k = 1."""
    return sum((abs(x) for x in spec.translation[0]), QuadraticNumber(0, 0, spec.D))


def union_length(model: FieldModel, T) -> QuadraticNumber:
    """Exact Lebesgue measure of ``U_{t in [-T, T]^d} (box - A t)`` for one box on R^1."""
    box = _single_box(model)
    T = _to_fraction(T)
    if T < 0:
        raise ValueError("T must be nonnegative")
    return translation_width(model.spec) * (2 * T) + (box.b[0] - box.a[0])


def bT_exact_indicator(model: FieldModel, T) -> float:
    """b(T) for a single-box kernel on R^1.

    The supremum over the dense set Gamma equals the supremum over the whole
    cube, so ``b(T)^alpha = |w|^alpha * (len(box) + 2 T sum_j |A_j|)``.
    """
    box = _single_box(model)
    return abs(float(box.w)) * float(union_length(model, T)) ** (1 / model.alpha)


def bT_numeric(model: FieldModel, T: float, mesh: float = 0.01, m: int = 3, *,
               budget: Optional[int] = None, chunk: int = 4096) -> float:
    """Riemann-sum approximation of b(T) with the supremum over ``Gamma_m cap [-T, T]^d``.

    The integration mesh is anchored at the origin and its region depends
    only on T, so refining ``m`` can only increase the result.
    """
    if mesh <= 0:
        raise ValueError("mesh must be positive")
    if T <= 0:
        raise ValueError("T must be positive")
    alpha = model.alpha
    spec = model.spec
    if spec.k == 0:
        return abs(float(sum(b.w for b in model.kernel)))
    tg = build_translation_grid(spec, [T], m, budget)
    tau = tg.tau
    reach = [float(T) * sum(abs(float(x)) for x in row) for row in spec.translation]
    axes = []
    for e in range(spec.k):
        lo = min(float(b.a[e]) for b in model.kernel) - reach[e]
        hi = max(float(b.b[e]) for b in model.kernel) + reach[e]
        i0, i1 = math.floor(lo / mesh), math.ceil(hi / mesh)
        axes.append((np.arange(i0, i1) + 0.5) * mesh)
    n_x = math.prod(len(a) for a in axes)
    limit = point_budget(budget)
    if n_x * len(tau) > 50 * limit:
        raise BudgetError(f"b(T) mesh needs {n_x * len(tau)} evaluations, budget is {50 * limit}")
    X = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    total = 0.0
    step = max(1, chunk * 256 // max(1, len(tau)))
    for start in range(0, len(X), step):
        xs = X[start:start + step]
        f = np.zeros((len(xs), len(tau)))
        for box in model.kernel:
            inside = np.ones(f.shape, dtype=bool)
            for e in range(spec.k):
                shifted = xs[:, e:e + 1] + tau[None, :, e]
                inside &= (shifted >= float(box.a[e])) & (shifted <= float(box.b[e]))
            f += float(box.w) * inside
        total += float(np.sum(np.abs(f).max(axis=1) ** alpha))
    return (total * mesh ** spec.k) ** (1 / alpha)
