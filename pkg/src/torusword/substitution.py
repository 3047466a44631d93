"""Substitutions, their fixed points, spectral data and fractal clouds.

A substitution is a morphism of the free monoid over a finite alphabet.
The abelianization matrix M counts letter occurrences in images; for a
primitive M with dominant eigenvalue > 1 the prefix abelianizations of the
fixed point form a broken line in Z^k whose projection onto the hyperplane
orthogonal to the dominant right eigenvector stays bounded (the Rauzy
fractal point cloud, partitioned by the letter following each vertex).
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass

import numpy as np

from .words import Alphabet, FiniteWord, LazyWord, WordError, constant_word


class SubstitutionError(ValueError):
    """Invalid substitution or argument."""


class NonPrimitiveError(SubstitutionError):
    """No power of the abelianization matrix is entrywise positive."""


class NonExpandingError(SubstitutionError):
    """Dominant eigenvalue is not larger than 1."""


class ConvergenceError(SubstitutionError):
    """Power iteration did not reach the requested residual."""


class Substitution:
    """A free-monoid morphism given by one non-empty image per letter."""

    def __init__(self, alphabet: Alphabet, images):
        self.alphabet = alphabet
        imgs = []
        for sym, img in enumerate(images):
            if isinstance(img, FiniteWord):
                arr = img.symbols
            elif isinstance(img, str):
                arr = FiniteWord.from_labels(alphabet, img).symbols
            else:
                arr = np.asarray(img, dtype=np.uint8)
            if arr.size == 0:
                raise SubstitutionError(f"image of letter {alphabet.label(sym)} is empty")
            if int(arr.max()) >= alphabet.size:
                raise SubstitutionError("image uses a symbol outside the alphabet")
            imgs.append(np.ascontiguousarray(arr))
        if len(imgs) != alphabet.size:
            raise SubstitutionError("need one image per letter")
        self._images = tuple(imgs)
        self._lengths = np.array([im.size for im in imgs], dtype=np.int64)

    @property
    def k(self) -> int:
        return self.alphabet.size

    def image(self, sym: int) -> FiniteWord:
        return FiniteWord(self.alphabet, self._images[sym])

    def image_lengths(self) -> np.ndarray:
        return self._lengths.copy()

    def apply_array(self, arr: np.ndarray) -> np.ndarray:
        """Apply the morphism to a raw symbol array."""
        lengths = self._lengths[arr]
        total = int(lengths.sum())
        out = np.empty(total, dtype=np.uint8)
        starts = np.concatenate(([0], np.cumsum(lengths)[:-1]))
        for sym in range(self.k):
            idx = np.flatnonzero(arr == sym)
            if idx.size == 0:
                continue
            img = self._images[sym]
            pos = starts[idx]
            for j in range(img.size):
                out[pos + j] = img[j]
        return out

    def __call__(self, w: FiniteWord) -> FiniteWord:
        if w.alphabet.size != self.k:
            raise SubstitutionError("alphabet mismatch")
        return FiniteWord(self.alphabet, self.apply_array(w.symbols))

    def compose(self, other: "Substitution") -> "Substitution":
        """self after other: (self.compose(other))(a) = self(other(a))."""
        if other.k != self.k:
            raise SubstitutionError("alphabet mismatch")
        return Substitution(
            self.alphabet,
            [self.apply_array(other._images[s]) for s in range(self.k)],
        )

    def __repr__(self) -> str:
        parts = ", ".join(
            f"{self.alphabet.label(s)}->{self.image(s)}" for s in range(self.k)
        )
        return f"Substitution({parts})"


def apply(s: Substitution, w: FiniteWord) -> FiniteWord:
    return s(w)


def k_bonacci(k: int) -> Substitution:
    """The k-letter substitution a_i -> a_1 a_{i+1}, a_k -> a_1.

    k=1 degenerates to the identity on one letter (fixed point 111...).
    """
    if k < 1:
        raise SubstitutionError("k must be >= 1")
    alphabet = Alphabet(k)
    images = [[0, i + 1] for i in range(k - 1)] + [[0]]
    return Substitution(alphabet, images)


class FixedPointWord(LazyWord):
    """Lazy fixed point of a substitution prolongable at its seed."""

    def __init__(self, s: Substitution, seed: int):
        super().__init__(s.alphabet)
        self._s = s
        self._buf = np.array([seed], dtype=np.uint8)

    def _produce(self, count: int) -> np.ndarray:
        target = self._buf.size + count
        cur = self._buf
        while cur.size < target:
            cur = self._s.apply_array(cur)
        # prefix() appends what we return, so hand back only the new part
        new = cur[self._buf.size :]
        self._buf = cur[: self._buf.size]
        return new


def fixed_point(s: Substitution, seed: int = 0) -> LazyWord:
    """The unique fixed point of s starting with the given letter.

    Requires the image of the seed to start with the seed and have length
    at least 2, except that a letter mapped to itself yields the constant
    word (the k=1 degenerate case).
    """
    if seed >= s.k:
        raise SubstitutionError("seed letter out of range")
    img = s.image(seed).symbols
    if img.size == 1 and int(img[0]) == seed:
        return constant_word(s.alphabet, seed)
    if int(img[0]) != seed or img.size < 2:
        raise SubstitutionError(
            f"letter {s.alphabet.label(seed)} is not prolongable under this substitution"
        )
    return FixedPointWord(s, seed)


def abelianization(s: Substitution) -> np.ndarray:
    """k x k integer matrix; entry (i, j) counts letter i in the image of j."""
    k = s.k
    M = np.zeros((k, k), dtype=np.int64)
    for j in range(k):
        img = s.image(j).symbols
        for i in range(k):
            M[i, j] = int(np.count_nonzero(img == i))
    return M


def is_primitive(M: np.ndarray) -> bool:
    """Some power (up to exponent k*k) of M is entrywise positive."""
    M = np.asarray(M)
    k = M.shape[0]
    P = M > 0
    B = P.copy()
    for _ in range(k * k):
        if P.all():
            return True
        P = (P @ B) > 0
    return bool(P.all())


@dataclass(frozen=True)
class PerronData:
    """Dominant eigenvalue with positive unit-sum left/right eigenvectors."""

    value: float
    right: np.ndarray
    left: np.ndarray
    residual: float
    iterations: int


def _power_iterate(M: np.ndarray, tol: float, max_iter: int):
    k = M.shape[0]
    v = np.full(k, 1.0 / k)
    lam = 0.0
    for it in range(1, max_iter + 1):
        w = M @ v
        s = w.sum()
        if s <= 0:
            raise NonPrimitiveError("matrix drives vectors out of the positive cone")
        v_new = w / s
        lam = s  # with unit-sum v, sum(Mv) -> dominant eigenvalue
        res = float(np.max(np.abs(M @ v_new - lam * v_new)))
        v = v_new
        if res < tol:
            return lam, v, res, it
    raise ConvergenceError(f"power iteration stalled at residual > {tol}")


def perron(M: np.ndarray, tol: float = 1e-12, max_iter: int = 200000) -> PerronData:
    """Perron data of a primitive non-negative integer matrix.

    Power iteration on M and its transpose; raises NonPrimitiveError when
    no power of M is positive and NonExpandingError when the dominant
    eigenvalue is not > 1.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise SubstitutionError("matrix must be square")
    if (M < 0).any():
        raise SubstitutionError("matrix must be non-negative")
    if not is_primitive(M):
        raise NonPrimitiveError("matrix is not primitive")
    lam, v, res_r, it_r = _power_iterate(M, tol, max_iter)
    lam_l, left, res_l, it_l = _power_iterate(M.T, tol, max_iter)
    residual = max(
        float(np.max(np.abs(M @ v - lam * v))),
        float(np.max(np.abs(M.T @ left - lam * left))),
    )
    data = PerronData(
        value=float(lam),
        right=v,
        left=left,
        residual=residual,
        iterations=max(it_r, it_l),
    )
    if data.value <= 1.0 + tol:
        raise NonExpandingError(
            f"dominant eigenvalue {data.value:.6f} is not larger than 1"
        )
    return data


@dataclass(frozen=True)
class BrokenLine:
    """Lattice path of prefix abelianizations: vertex[j+1]-vertex[j] = e_{w[j]}."""

    vertices: np.ndarray  # (N+1, k) integers, vertices[0] = 0
    step_types: np.ndarray  # (N,) symbols


def broken_line(w: LazyWord, N: int) -> BrokenLine:
    """First N+1 vertices of the broken line of w."""
    if N < 0:
        raise WordError("N must be >= 0")
    k = w.alphabet.size
    steps = w.prefix(N)
    if steps.size < N:
        raise WordError("word truncated before N symbols")
    vertices = np.zeros((N + 1, k), dtype=np.int64)
    for sym in range(k):
        vertices[1:, sym] = np.cumsum(steps == sym)
    return BrokenLine(vertices=vertices, step_types=steps)


def contracting_basis(v: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of the hyperplane orthogonal to v.

    Gram-Schmidt on the standard basis minus its component along v, taken
    in index order; the first k-1 independent results are kept.  Rows are
    the basis vectors.
    """
    v = np.asarray(v, dtype=float)
    k = v.size
    vhat = v / np.linalg.norm(v)
    rows: list[np.ndarray] = []
    for i in range(k):
        b = np.zeros(k)
        b[i] = 1.0
        b = b - (b @ vhat) * vhat
        for r in rows:
            b = b - (b @ r) * r
        norm = np.linalg.norm(b)
        if norm > 1e-10:
            rows.append(b / norm)
        if len(rows) == k - 1:
            break
    if len(rows) != k - 1:
        raise SubstitutionError("failed to build a hyperplane basis")
    return np.array(rows)


@dataclass
class FractalCloud:
    """Projected broken-line vertices, labeled by the letter that follows.

    ``points[j]`` are the coordinates of vertex j in the orthonormal basis
    (rows of ``basis``) of the hyperplane orthogonal to the dominant right
    eigenvector; the projection is parallel to that eigendirection.
    """

    points: np.ndarray  # (N, k-1)
    piece_labels: np.ndarray  # (N,) symbols
    basis: np.ndarray  # (k-1, k)
    alphabet: Alphabet
    n_points: int
    radius: float

    def piece(self, sym: int) -> np.ndarray:
        return self.points[self.piece_labels == sym]

    def to_csv(self, stream) -> None:
        d = self.points.shape[1]
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow([f"x{i + 1}" for i in range(d)] + ["label"])
        for p, lab in zip(self.points, self.piece_labels):
            writer.writerow([repr(float(c)) for c in p] + [self.alphabet.label(int(lab))])

    def to_binary(self, stream) -> None:
        """Little-endian binary dump: magic "RZYC", k, N, points, labels."""
        k = self.basis.shape[1]
        stream.write(b"RZYC")
        stream.write(struct.pack("<IQ", k, self.n_points))
        stream.write(np.ascontiguousarray(self.points, dtype="<f8").tobytes())
        stream.write(np.ascontiguousarray(self.piece_labels, dtype=np.uint8).tobytes())


def fractal_cloud(s: Substitution, N: int, tol: float = 1e-12) -> FractalCloud:
    """Point-cloud approximation of the Rauzy fractal of a substitution.

    Projects the first N broken-line vertices of the fixed point onto the
    hyperplane orthogonal to the right Perron eigenvector, parallel to the
    eigendirection.  Raises the perron() errors for non-primitive or
    non-expanding input.
    """
    if N < 1:
        raise SubstitutionError("N must be >= 1")
    pd = perron(abelianization(s), tol=tol)
    B = contracting_basis(pd.right)
    line = broken_line(fixed_point(s, 0), N)
    points = line.vertices[:N].astype(float) @ B.T
    radius = float(np.max(np.linalg.norm(points, axis=1))) if N else 0.0
    return FractalCloud(
        points=points,
        piece_labels=line.step_types[:N].copy(),
        basis=B,
        alphabet=s.alphabet,
        n_points=N,
        radius=radius,
    )
