"""Piecewise translations on fundamental domains of tori, and their codings.

A piecewise translation carries a translation vector a, a lattice basis B
(columns; identity for the standard torus) and m disjoint half-open cells
covering a fundamental domain.  On cell i the map acts as
x -> x + a + B n_i with n_i an integer offset vector, so every branch
descends to the same torus translation.  Orbits are coded by the sequence
of visited cell ids; points inside the floating-point tolerance band of a
cell boundary truncate the coding instead of corrupting it.

Built-in examples: the two-interval circle rotation and the hexagon split
into three parallelograms.  Minimality of the underlying translation is
tested heuristically by integer relation search (PSLQ); a found relation
disproves minimality, absence of relations up to a coefficient bound is
evidence only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .kernels import code_orbit_interval, code_orbit_pgram
from .words import Alphabet, LazyWord

DEFAULT_EPS = 1e-9


class TorusError(ValueError):
    """Invalid domain, cell or argument."""


class DegenerateHexagonError(TorusError):
    """The three edge vectors do not span a convex hexagon."""


class BoundaryAmbiguityError(TorusError):
    """Point inside the tolerance band of a cell boundary, or in no cell."""


@dataclass(frozen=True)
class IntervalCell:
    """Half-open interval [lo, hi) with a constant integer offset."""

    id: int
    lo: float
    hi: float
    offset: tuple[int, ...]

    @property
    def measure(self) -> float:
        return self.hi - self.lo

    def classify(self, x, eps: float) -> str:
        x = float(x[0]) if np.ndim(x) else float(x)
        if not (self.lo <= x < self.hi):
            return "out"
        if (x - self.lo < eps and x != self.lo) or self.hi - x < eps:
            return "boundary"
        return "in"

    def geometry_json(self):
        return {"kind": "interval", "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class ParallelogramCell:
    """Half-open parallelogram origin + [0,1) s1 + [0,1) s2."""

    id: int
    origin: tuple[float, float]
    span1: tuple[float, float]
    span2: tuple[float, float]
    offset: tuple[int, ...]
    _minv: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        S = np.column_stack([self.span1, self.span2]).astype(float)
        if abs(np.linalg.det(S)) < 1e-14:
            raise TorusError("degenerate parallelogram cell")
        object.__setattr__(self, "_minv", np.linalg.inv(S))

    @property
    def measure(self) -> float:
        S = np.column_stack([self.span1, self.span2])
        return abs(float(np.linalg.det(S)))

    def local(self, x) -> np.ndarray:
        return self._minv @ (np.asarray(x, dtype=float) - np.asarray(self.origin))

    def classify(self, x, eps: float) -> str:
        lam = self.local(x)
        if not ((lam >= 0.0).all() and (lam < 1.0).all()):
            return "out"
        for c in lam:
            if (c < eps and c != 0.0) or 1.0 - c < eps:
                return "boundary"
        return "in"

    def vertices(self) -> np.ndarray:
        o = np.asarray(self.origin)
        s1 = np.asarray(self.span1)
        s2 = np.asarray(self.span2)
        return np.array([o, o + s1, o + s1 + s2, o + s2])

    def geometry_json(self):
        return {"kind": "polygon", "vertices": self.vertices().tolist()}


class CodingWord(LazyWord):
    """Lazy orbit coding; truncates on boundary ambiguity."""

    def __init__(self, T: "PiecewiseTranslation", x0, eps: float):
        super().__init__(Alphabet(T.m))
        self._T = T
        self._x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
        self._eps = eps

    def _produce(self, count: int) -> np.ndarray:
        codes, x_final, hit = self._T._code_batch(self._x, count, self._eps)
        self._x = np.atleast_1d(np.asarray(x_final, dtype=float))
        if hit:
            self.truncation_reason = "boundary ambiguity"
            self._exhausted = True
        return codes


@dataclass
class OrbitResult:
    points: np.ndarray  # (steps+1, k)
    cells: np.ndarray  # (steps,) 1-based cell ids
    truncated: bool
    reason: str | None = None


class PiecewiseTranslation:
    """A fundamental domain cut into cells, each translated by a + B n_i."""

    def __init__(self, a, cells, lattice=None, name: str = "", bbox=None):
        self.a = np.atleast_1d(np.asarray(a, dtype=float))
        self.k = self.a.size
        if not cells:
            raise TorusError("need at least one cell")
        self.cells = list(cells)
        for idx, cell in enumerate(self.cells, start=1):
            if cell.id != idx:
                raise TorusError("cell ids must be 1..m in order")
            if len(cell.offset) != self.k:
                raise TorusError("offset dimension mismatch")
        self.lattice = (
            np.eye(self.k) if lattice is None else np.asarray(lattice, dtype=float)
        )
        if self.lattice.shape != (self.k, self.k):
            raise TorusError("lattice basis must be k x k")
        self.name = name
        self.bbox = bbox
        self._shifts = np.array(
            [self.a + self.lattice @ np.asarray(c.offset, dtype=float) for c in self.cells]
        )

    @property
    def m(self) -> int:
        return len(self.cells)

    def displacement(self, cell_id: int) -> np.ndarray:
        return self._shifts[cell_id - 1].copy()

    def covolume(self) -> float:
        return abs(float(np.linalg.det(self.lattice)))

    def domain_volume(self) -> float:
        return float(sum(c.measure for c in self.cells))

    def locate(self, x, eps: float = DEFAULT_EPS):
        """The unique cell containing x; raises on the tolerance band."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        for cell in self.cells:
            status = cell.classify(x, eps)
            if status == "boundary":
                raise BoundaryAmbiguityError(
                    f"point {x.tolist()} lies in the boundary band of cell {cell.id}"
                )
            if status == "in":
                return cell
        raise BoundaryAmbiguityError(f"point {x.tolist()} lies in no cell")

    def _code_batch(self, x, count: int, eps: float):
        if isinstance(self.cells[0], IntervalCell):
            lo = np.array([c.lo for c in self.cells])
            hi = np.array([c.hi for c in self.cells])
            codes, xf, hit = code_orbit_interval(
                float(x[0]), lo, hi, self._shifts[:, 0], count, eps
            )
            return codes, np.array([xf]), hit
        if isinstance(self.cells[0], ParallelogramCell) and self.k == 2:
            origin = np.array([c.origin for c in self.cells])
            minv = np.array([c._minv for c in self.cells])
            return code_orbit_pgram(x, origin, minv, self._shifts, count, eps)
        # generic slow path
        codes = np.empty(count, dtype=np.uint8)
        cur = x.copy()
        for step in range(count):
            try:
                cell = self.locate(cur, eps)
            except BoundaryAmbiguityError:
                return codes[:step], cur, True
            codes[step] = cell.id - 1
            cur = cur + self._shifts[cell.id - 1]
        return codes, cur, False

    def orbit(self, x0, N: int, eps: float = DEFAULT_EPS) -> OrbitResult:
        """x_0 .. x_N with x_{j+1} = x_j + a + B n(cell of x_j).

        Truncates with an explicit status when an iterate falls in the
        tolerance band of a boundary or outside every cell.
        """
        if N < 0:
            raise TorusError("N must be >= 0")
        x0 = np.atleast_1d(np.asarray(x0, dtype=float))
        self.locate(x0, eps)  # x0 must sit in exactly one cell
        codes, _, hit = self._code_batch(x0, N, eps)
        steps = codes.size
        points = np.empty((steps + 1, self.k))
        points[0] = x0
        for j in range(steps):
            points[j + 1] = points[j] + self._shifts[codes[j]]
        return OrbitResult(
            points=points,
            cells=codes.astype(np.int64) + 1,
            truncated=hit,
            reason="boundary ambiguity" if hit else None,
        )

    def coding(self, x0, eps: float = DEFAULT_EPS) -> LazyWord:
        """Lazy word of visited cell ids (alphabet size m, symbol i = cell i+1)."""
        x0 = np.atleast_1d(np.asarray(x0, dtype=float))
        self.locate(x0, eps)
        return CodingWord(self, x0, eps)

    def to_json(self) -> str:
        doc = {
            "k": self.k,
            "a": self.a.tolist(),
            "lattice": self.lattice.tolist(),
            "name": self.name,
            "cells": [
                {
                    "id": int(c.id),
                    **c.geometry_json(),
                    "offset": [int(z) for z in c.offset],
                }
                for c in self.cells
            ],
        }
        return json.dumps(doc, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "PiecewiseTranslation":
        doc = json.loads(text)
        cells = []
        for spec in doc["cells"]:
            if spec["kind"] == "interval":
                cells.append(
                    IntervalCell(spec["id"], spec["lo"], spec["hi"], tuple(spec["offset"]))
                )
            elif spec["kind"] == "polygon":
                verts = np.asarray(spec["vertices"], dtype=float)
                if verts.shape[0] != 4:
                    raise TorusError("only parallelogram polygons are supported")
                cells.append(
                    ParallelogramCell(
                        spec["id"],
                        tuple(verts[0]),
                        tuple(verts[1] - verts[0]),
                        tuple(verts[3] - verts[0]),
                        tuple(spec["offset"]),
                    )
                )
            else:
                raise TorusError(f"unsupported cell kind {spec['kind']!r}")
        return cls(doc["a"], cells, lattice=doc.get("lattice"), name=doc.get("name", ""))


def orbit(T: PiecewiseTranslation, x0, N: int, eps: float = DEFAULT_EPS) -> OrbitResult:
    return T.orbit(x0, N, eps)


def coding(T: PiecewiseTranslation, x0, eps: float = DEFAULT_EPS) -> LazyWord:
    return T.coding(x0, eps)


def circle_rotation(alpha: float) -> PiecewiseTranslation:
    """Rotation by alpha on [0,1) with cells [0,1-alpha) and [1-alpha,1).

    The first cell keeps offset 0, the second wraps with offset -1, so
    both branches realize x -> x + alpha mod 1.
    """
    if not 0.0 < alpha < 1.0:
        raise TorusError("alpha must lie strictly between 0 and 1")
    cells = [
        IntervalCell(1, 0.0, 1.0 - alpha, (0,)),
        IntervalCell(2, 1.0 - alpha, 1.0, (-1,)),
    ]
    return PiecewiseTranslation([alpha], cells, name=f"circle({alpha})")


def hexagon_translation(u, v, w, a_choice=None) -> PiecewiseTranslation:
    """Hexagon with edge vectors u, v, w cut into three parallelograms.

    The hexagon has vertices 0, u, u-v, u-v+w, w-v, w; it tiles the plane
    under the lattice with basis (u-v, u-w).  The pieces and their
    translations are:

      cell 1: parallelogram(0; u, -v)   translated by w  (offset (0,-1))
      cell 2: parallelogram(0; -v, w)   translated by u  (offset (0,0))
      cell 3: parallelogram(-v; u, w)   translated by v  (offset (-1,0))

    All three translations agree with a_choice (default u) modulo the
    lattice, so the map descends to the torus translation by a.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)

    def cross(p, q):
        return p[0] * q[1] - p[1] * q[0]

    signs = [cross(u, -v), cross(-v, w), cross(w, -u)]
    if min(abs(s) for s in signs) < 1e-12 or len({s > 0 for s in signs}) != 1:
        raise DegenerateHexagonError("edge vectors do not bound a convex hexagon")
    B = np.column_stack([u - v, u - w])
    if abs(np.linalg.det(B)) < 1e-12:
        raise DegenerateHexagonError("tiling lattice is degenerate")
    a = u if a_choice is None else np.asarray(a_choice, dtype=float)
    # a_choice must equal u modulo the lattice
    z = np.linalg.solve(B, a - u)
    if np.max(np.abs(z - np.round(z))) > 1e-9:
        raise TorusError("a_choice is not congruent to the edge vectors mod the lattice")
    cells = [
        ParallelogramCell(1, (0.0, 0.0), tuple(u), tuple(-v), (0, -1)),
        ParallelogramCell(2, (0.0, 0.0), tuple(-v), tuple(w), (0, 0)),
        ParallelogramCell(3, tuple(-v), tuple(u), tuple(w), (-1, 0)),
    ]
    zint = np.round(z).astype(int)
    # re-express offsets relative to the chosen representative a
    cells = [
        ParallelogramCell(
            c.id, c.origin, c.span1, c.span2,
            tuple(np.asarray(c.offset, dtype=int) - zint),
        )
        for c in cells
    ]
    verts = np.array([[0, 0], u, u - v, u - v + w, w - v, w], dtype=float)
    bbox = (verts.min(axis=0), verts.max(axis=0))
    T = PiecewiseTranslation(a, cells, lattice=B, name="hexagon", bbox=bbox)
    return T


FIGURE_U = (1 / 3, 1 / 2)
FIGURE_V = (-1 / 3, 0.0)
FIGURE_W = (1 / 3, -1.0)


def hexagon_example(seed: int = 0, perturbation: float = 0.04) -> PiecewiseTranslation:
    """Seeded generic hexagon, rescaled to a unit-covolume lattice.

    The unperturbed shape (FIGURE_U/V/W) has a rational translation vector
    in lattice coordinates, hence a non-minimal torus translation; the
    seeded perturbation of the edge vectors makes the translation generic
    while keeping runs reproducible.
    """
    rng = np.random.default_rng(seed)
    u = np.asarray(FIGURE_U) + rng.uniform(-perturbation, perturbation, 2)
    v = np.asarray(FIGURE_V) + rng.uniform(-perturbation, perturbation, 2)
    w = np.asarray(FIGURE_W) + rng.uniform(-perturbation, perturbation, 2)
    covol = abs(np.linalg.det(np.column_stack([u - v, u - w])))
    scale = 1.0 / np.sqrt(covol)
    T = hexagon_translation(u * scale, v * scale, w * scale)
    T.name = f"hexagon(seed={seed})"
    return T


def hexagon_interior_point(T: PiecewiseTranslation, s1: float = 0.37, s2: float = 0.29):
    """A deterministic interior point of cell 1 (safe coding start)."""
    c = T.cells[0]
    return np.asarray(c.origin) + s1 * np.asarray(c.span1) + s2 * np.asarray(c.span2)


def torus_coordinates(T: PiecewiseTranslation) -> np.ndarray:
    """Translation vector in lattice coordinates, reduced mod 1."""
    return np.mod(np.linalg.solve(T.lattice, T.a), 1.0)


@dataclass(frozen=True)
class MinimalityVerdict:
    """Outcome of an integer relation search on (a_1 .. a_k, 1).

    ``relation`` is (q_1 .. q_k, q0) with q_1 a_1 + ... + q_k a_k + q0
    within ``precision`` of zero and not all of q_1 .. q_k zero; finding
    one disproves minimality of the translation by a.  Status
    no_relation_up_to_bound is evidence of minimality, never proof.
    """

    status: str
    relation: tuple[int, ...] | None
    bound: int
    precision: float

    @property
    def relation_found(self) -> bool:
        return self.status == "relation_found"


def minimality_check(a, bound: int = 10**4, precision: float = 1e-9) -> MinimalityVerdict:
    """PSLQ search for rational dependences of 1, a_1, ..., a_k."""
    if bound < 1:
        raise TorusError("bound must be >= 1")
    if precision <= 0:
        raise TorusError("precision must be positive")
    a = np.atleast_1d(np.asarray(a, dtype=float))
    k = a.size
    # exact zero coordinates give an immediate relation
    for i, ai in enumerate(a):
        if ai == 0.0:
            rel = [0] * (k + 1)
            rel[i] = 1
            return MinimalityVerdict("relation_found", tuple(rel), bound, precision)
    with mpmath.workdps(30):
        rel = mpmath.pslq(
            [mpmath.mpf(float(ai)) for ai in a] + [mpmath.mpf(1)],
            tol=mpmath.mpf(precision),
            maxcoeff=bound,
        )
    if rel is None:
        return MinimalityVerdict("no_relation_up_to_bound", None, bound, precision)
    rel = [int(c) for c in rel]
    if all(c == 0 for c in rel[:k]) or max(abs(c) for c in rel) > bound:
        return MinimalityVerdict("no_relation_up_to_bound", None, bound, precision)
    if abs(sum(q * ai for q, ai in zip(rel[:k], a)) + rel[k]) >= precision:
        return MinimalityVerdict("no_relation_up_to_bound", None, bound, precision)
    lead = next(c for c in rel[:k] if c != 0)
    if lead < 0:
        rel = [-c for c in rel]
    return MinimalityVerdict("relation_found", tuple(rel), bound, precision)


@dataclass
class MeasureIdentityReport:
    """Checks 0 = a + sum A_i r_i and sum A_i = 1 on normalized measures."""

    residual_exact: float | None
    sum_exact: float | None
    residual_mc: float
    sum_mc: float
    residual_mc_se: float
    sum_mc_se: float
    samples: int
    seed: int


def verify_measure_identities(
    T: PiecewiseTranslation, samples: int = 10**6, seed: int = 0
) -> MeasureIdentityReport:
    """Exact (cell geometry) and Monte-Carlo versions of the two identities.

    Measures are normalized by the domain volume; r_i = B n_i is the
    constant displacement offset of cell i.  Monte-Carlo samples the
    bounding box, so the reported standard errors are binomial/empirical.
    """
    vol = T.domain_volume()
    r = np.array([T.lattice @ np.asarray(c.offset, dtype=float) for c in T.cells])

    A_exact = np.array([c.measure for c in T.cells]) / vol
    residual_exact = float(np.max(np.abs(T.a + A_exact @ r)))
    sum_exact = float(abs(A_exact.sum() - 1.0))

    rng = np.random.default_rng(seed)
    if T.bbox is not None:
        lo, hi = T.bbox
    elif isinstance(T.cells[0], IntervalCell):
        lo = np.array([min(c.lo for c in T.cells)])
        hi = np.array([max(c.hi for c in T.cells)])
    else:
        pts = np.vstack([c.vertices() for c in T.cells])
        lo, hi = pts.min(axis=0), pts.max(axis=0)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    box_vol = float(np.prod(hi - lo))
    pts = rng.uniform(lo, hi, size=(samples, T.k))

    member = np.zeros(samples, dtype=np.int64)  # 0 = outside, else cell id
    for cell in T.cells:
        if isinstance(cell, IntervalCell):
            inside = (pts[:, 0] >= cell.lo) & (pts[:, 0] < cell.hi)
        else:
            local = (pts - np.asarray(cell.origin)) @ cell._minv.T
            inside = ((local >= 0.0) & (local < 1.0)).all(axis=1)
        member[(member == 0) & inside] = cell.id

    scale = box_vol / vol
    p_in = np.count_nonzero(member) / samples
    sum_mc = p_in * scale
    sum_mc_se = scale * np.sqrt(p_in * (1.0 - p_in) / samples)

    # per-sample vector Y = r_{cell(x)} (zero outside); estimator a + scale * mean(Y)
    Y = np.zeros((samples, T.k))
    for cell in T.cells:
        Y[member == cell.id] = r[cell.id - 1]
    est = T.a + scale * Y.mean(axis=0)
    se = scale * Y.std(axis=0, ddof=1) / np.sqrt(samples)
    return MeasureIdentityReport(
        residual_exact=residual_exact,
        sum_exact=sum_exact,
        residual_mc=float(np.max(np.abs(est))),
        sum_mc=float(abs(sum_mc - 1.0)),
        residual_mc_se=float(np.max(se)),
        sum_mc_se=float(sum_mc_se),
        samples=samples,
        seed=seed,
    )


def check_fundamental_domain(
    T: PiecewiseTranslation, samples: int = 10**4, seed: int = 0, reach: int = 2
) -> float:
    """Fraction of random torus points with exactly one cell representative.

    Samples y in the lattice parallelepiped B [0,1)^k and counts lattice
    translates y + B z (|z_j| <= reach) that land in exactly one cell.
    """
    rng = np.random.default_rng(seed)
    ranges = np.arange(-reach, reach + 1)
    grids = np.meshgrid(*([ranges] * T.k), indexing="ij")
    zs = np.stack([g.ravel() for g in grids], axis=1)
    shifts = zs @ T.lattice.T
    pts = rng.uniform(0.0, 1.0, (samples, T.k)) @ T.lattice.T
    hits = np.zeros(samples, dtype=np.int64)
    for s in shifts:
        q = pts + s
        for cell in T.cells:
            if isinstance(cell, IntervalCell):
                inside = (q[:, 0] >= cell.lo) & (q[:, 0] < cell.hi)
            else:
                local = (q - np.asarray(cell.origin)) @ cell._minv.T
                inside = ((local >= 0.0) & (local < 1.0)).all(axis=1)
            hits += inside
    return float(np.mean(hits == 1))


def sturmian_cylinder_measure(alpha: float, factor) -> float:
    """Exact measure of the coding cylinder of a factor, by arc intersection.

    The cylinder of u is the set of x whose rotation coding starts with u;
    it is the intersection of the arcs D_{u_j} - j*alpha on the circle.
    """
    arcs = [(0.0, 1.0)]  # half-open [lo, hi) pieces, lo < hi within [0, 2)

    def intersect(arcs, lo, hi):
        out = []
        for a0, a1 in arcs:
            for base in (0.0, 1.0):
                b0, b1 = lo + base, hi + base
                c0, c1 = max(a0, b0), min(a1, b1)
                if c1 - c0 > 0:
                    out.append((c0, c1))
        return out

    syms = factor.symbols if hasattr(factor, "symbols") else np.asarray(factor, dtype=np.uint8)
    for j, sym in enumerate(syms):
        lo, hi = (0.0, 1.0 - alpha) if sym == 0 else (1.0 - alpha, 1.0)
        length = hi - lo
        lo = (lo - j * alpha) % 1.0
        hi = lo + length
        if hi <= 1.0:
            pieces = [(lo, hi)]
        else:
            pieces = [(lo, 1.0), (0.0, hi - 1.0)]
        new = []
        for plo, phi in pieces:
            new.extend(intersect(arcs, plo, phi))
        arcs = [(a0 % 1.0, a0 % 1.0 + (a1 - a0)) for a0, a1 in new]
    return float(sum(a1 - a0 for a0, a1 in arcs))
