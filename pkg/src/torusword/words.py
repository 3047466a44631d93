"""Finite and lazy infinite words over finite alphabets.

Provides factor enumeration, occurrence counting and the complexity
function p(n) = number of distinct length-n blocks.  Infinite words are
evaluated on finite prefixes; ``complexity`` grows the prefix adaptively
(doubling) until the factor count stops changing, and records for every n
whether the count stabilized or the hard cap was reached.  A
non-stabilized entry is a certified lower bound on the true p(n), never an
upper bound.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .kernels import count_factors as _count_factors_kernel

DEFAULT_PREFIX_CAP = 2**24


class WordError(ValueError):
    """Invalid word, alphabet or argument."""


@dataclass(frozen=True)
class Alphabet:
    """A finite symbol set; symbols are the integers 0 .. size-1.

    ``labels`` are display names, one per symbol; the default labels are
    "1", "2", ... matching the usual letter indexing a_1 .. a_k.
    """

    size: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.size < 1:
            raise WordError("alphabet size must be >= 1")
        if self.size > 256:
            raise WordError("alphabets larger than 256 symbols are unsupported")
        if self.labels is not None:
            if len(self.labels) != self.size:
                raise WordError("need one label per symbol")
            if len(set(self.labels)) != self.size:
                raise WordError("labels must be distinct")

    def label(self, sym: int) -> str:
        if self.labels is not None:
            return self.labels[sym]
        return str(sym + 1)

    def symbol_of_label(self, label: str) -> int:
        for s in range(self.size):
            if self.label(s) == label:
                return s
        raise WordError(f"unknown label {label!r}")

    @property
    def compact(self) -> bool:
        """True when every label is a single character (joinable display)."""
        return all(len(self.label(s)) == 1 for s in range(self.size))


class FiniteWord:
    """An immutable finite word over a fixed alphabet."""

    __slots__ = ("alphabet", "_data", "_key")

    def __init__(self, alphabet: Alphabet, symbols):
        data = np.asarray(symbols, dtype=np.uint8)
        if data.ndim != 1:
            raise WordError("symbols must be one-dimensional")
        if data.size and int(data.max()) >= alphabet.size:
            raise WordError("symbol out of range for alphabet")
        data = np.ascontiguousarray(data)
        data.flags.writeable = False
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "_data", data)
        object.__setattr__(self, "_key", data.tobytes())

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("FiniteWord is immutable")

    @classmethod
    def from_labels(cls, alphabet: Alphabet, text: str) -> "FiniteWord":
        if alphabet.compact:
            syms = [alphabet.symbol_of_label(ch) for ch in text]
        else:
            syms = [alphabet.symbol_of_label(t) for t in text.split(".") if t]
        return cls(alphabet, syms)

    @property
    def symbols(self) -> np.ndarray:
        return self._data

    def __len__(self) -> int:
        return self._data.size

    def __iter__(self) -> Iterator[int]:
        return iter(int(s) for s in self._data)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return FiniteWord(self.alphabet, self._data[i])
        return int(self._data[i])

    def __add__(self, other: "FiniteWord") -> "FiniteWord":
        if other.alphabet.size != self.alphabet.size:
            raise WordError("alphabet mismatch")
        return FiniteWord(self.alphabet, np.concatenate([self._data, other._data]))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteWord)
            and self.alphabet.size == other.alphabet.size
            and self._key == other._key
        )

    def __hash__(self) -> int:
        return hash((self.alphabet.size, self._key))

    def __str__(self) -> str:
        sep = "" if self.alphabet.compact else "."
        return sep.join(self.alphabet.label(int(s)) for s in self._data)

    def __repr__(self) -> str:
        return f"FiniteWord({self!s})"


class LazyWord:
    """A one-sided infinite word produced on demand.

    Subclasses implement ``_produce(count)`` returning the next block of
    symbols (possibly shorter when the source truncates, e.g. an orbit
    coding hitting a cell boundary).  Prefixes are cached, so repeated
    traversals are deterministic and cheap.
    """

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self._buf = np.empty(0, dtype=np.uint8)
        self._exhausted = False
        self.truncation_reason: str | None = None

    def _produce(self, count: int) -> np.ndarray:
        raise NotImplementedError

    def prefix(self, length: int) -> np.ndarray:
        """The first ``length`` symbols (fewer if the source truncated)."""
        if length < 0:
            raise WordError("prefix length must be >= 0")
        while self._buf.size < length and not self._exhausted:
            chunk = np.asarray(self._produce(length - self._buf.size), dtype=np.uint8)
            if chunk.size == 0 and self._buf.size < length:
                self._exhausted = True
                break
            self._buf = np.concatenate([self._buf, chunk])
        out = self._buf[:length]
        out.flags.writeable = False
        return out

    @property
    def exhausted(self) -> bool:
        return self._exhausted

    def available(self) -> int:
        return self._buf.size


class GeneratedWord(LazyWord):
    """LazyWord over a restartable iterator factory (must be deterministic)."""

    def __init__(self, alphabet: Alphabet, factory):
        super().__init__(alphabet)
        self._iter = iter(factory())

    def _produce(self, count: int) -> np.ndarray:
        out = np.empty(count, dtype=np.uint8)
        n = 0
        for sym in self._iter:
            out[n] = sym
            n += 1
            if n == count:
                break
        return out[:n]


def constant_word(alphabet: Alphabet, sym: int = 0) -> LazyWord:
    """The infinite word sym sym sym ..."""

    class _Const(LazyWord):
        def _produce(self, count):
            return np.full(count, sym, dtype=np.uint8)

    if sym >= alphabet.size:
        raise WordError("symbol out of range")
    return _Const(alphabet)


def word_from_finite(alphabet: Alphabet, symbols) -> LazyWord:
    """Wrap a finite symbol sequence as a (truncating) LazyWord."""
    data = np.asarray(symbols, dtype=np.uint8)

    class _Finite(LazyWord):
        def _produce(self, count):
            start = self._buf.size
            chunk = data[start : start + count]
            if chunk.size < count:
                self.truncation_reason = "finite source"
            return chunk

    return _Finite(alphabet)


def factor_counts(w: LazyWord, n: int, L: int) -> dict[FiniteWord, int]:
    """Occurrence counts of every length-n block in the length-L prefix.

    Counts positions 0 .. L-n, so the counts sum to L-n+1 when the full
    prefix is available.
    """
    if n < 1:
        raise WordError("factor length must be >= 1")
    if L < n:
        raise WordError("prefix length must be at least the factor length")
    data = w.prefix(L)
    raw = _count_factors_kernel(data, n, w.alphabet.size)
    return {
        FiniteWord(w.alphabet, np.frombuffer(k, dtype=np.uint8)): c
        for k, c in raw.items()
    }


def factors(w: LazyWord, n: int, L: int) -> set[FiniteWord]:
    """The set of distinct length-n blocks of the length-L prefix."""
    return set(factor_counts(w, n, L))


@dataclass(frozen=True)
class StabilizationPolicy:
    """Prefix growth schedule for complexity computations.

    Start at ``max(base, per_n * n)``, double until the factor count is
    unchanged across one doubling, stop at ``cap`` symbols.
    """

    base: int = 1024
    per_n: int = 64
    cap: int = DEFAULT_PREFIX_CAP

    def initial(self, n: int) -> int:
        return min(max(self.base, self.per_n * n, n), self.cap)


DEFAULT_POLICY = StabilizationPolicy()


@dataclass(frozen=True)
class ComplexityEntry:
    n: int
    p: int
    prefix_len: int
    stabilized: bool


@dataclass
class ComplexityReport:
    """Table n -> p(n) with the prefix length used and stabilization flag."""

    entries: dict[int, ComplexityEntry] = field(default_factory=dict)

    def p(self, n: int) -> int:
        return self.entries[n].p

    def rows(self) -> list[ComplexityEntry]:
        return [self.entries[n] for n in sorted(self.entries)]

    def all_stabilized(self) -> bool:
        return all(e.stabilized for e in self.entries.values())

    def to_csv(self, stream) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["n", "p_n", "prefix_len", "stabilized"])
        for e in self.rows():
            writer.writerow([e.n, e.p, e.prefix_len, str(e.stabilized).lower()])


def complexity_entry(
    w: LazyWord, n: int, policy: StabilizationPolicy = DEFAULT_POLICY
) -> ComplexityEntry:
    """p(n) for one block length, with adaptive prefix growth."""
    L = policy.initial(n)
    prev_count: int | None = None
    prev_used = 0
    while True:
        data = w.prefix(L)
        used = data.size
        count = len(_count_factors_kernel(data, n, w.alphabet.size)) if used >= n else 0
        if prev_count is not None and count == prev_count and used > prev_used:
            return ComplexityEntry(n, count, used, True)
        if used < L or L >= policy.cap:
            # source ran out or hard cap: report a lower bound
            return ComplexityEntry(n, count, used, False)
        prev_count, prev_used = count, used
        L = min(2 * L, policy.cap)


def complexity(
    w: LazyWord, n_max: int, policy: StabilizationPolicy = DEFAULT_POLICY
) -> ComplexityReport:
    """Complexity table p(1) .. p(n_max) of a lazy word."""
    if n_max < 1:
        raise WordError("n_max must be >= 1")
    report = ComplexityReport()
    for n in range(1, n_max + 1):
        report.entries[n] = complexity_entry(w, n, policy)
    return report


def factor_set_to_csv(fs: Iterable[FiniteWord], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["factor"])
    for f in sorted(fs, key=str):
        writer.writerow([str(f)])
