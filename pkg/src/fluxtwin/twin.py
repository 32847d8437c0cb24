"""Twin group words, induced permutations and their strand trajectories.

The twin group ``T_n`` is generated by ``t_1, ..., t_{n-1}`` subject to
``t_i**2 = 1`` and ``t_i t_j = t_j t_i`` for ``|i - j| >= 2``; adjacent
generators satisfy no relation. It is a right-angled Coxeter group, so a
word is reduced exactly when it has no two equal letters separated only by
letters commuting with them, and any two reduced words of the same element
differ by commutations alone. :func:`reduce_word` uses both facts to return
the shortlex-minimal representative, which is a normal form.

Words act left to right: ``t_i`` swaps whatever strands currently occupy
slots ``i`` and ``i + 1``, and a word is stacked in time in reading order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _backend
from .coords import EPSILON, MAX_REFINE, MassSystem, Trajectory, angle_increments, check_triple
from .errors import InvalidGeometryError, InvalidLoopError, InvalidWordError, SamplingTooCoarseError

#: Non-integrality (in turns) tolerated before a closed winding is rejected.
WINDING_TOL = 1e-6


@dataclass(frozen=True)
class TwinWord:
    n: int
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n < 2:
            raise InvalidWordError(f"twin words need n >= 2 strands, got {self.n}")
        letters = tuple(int(a) for a in self.letters)
        for a in letters:
            if not 1 <= a <= self.n - 1:
                raise InvalidWordError(f"letter {a} out of range 1..{self.n - 1}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "TwinWord":
        """Parse a comma-separated literal such as ``"1,2,1,2,1,2"``."""
        text = text.strip().strip("[]")
        try:
            letters = [int(tok) for tok in text.split(",") if tok.strip()]
        except ValueError as exc:
            raise InvalidWordError(f"cannot parse word literal {text!r}") from exc
        if n is None:
            n = max(letters, default=1) + 1
        return cls(n, tuple(letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "TwinWord") -> "TwinWord":
        if other.n != self.n:
            raise InvalidWordError("cannot multiply words on different strand counts")
        return TwinWord(self.n, self.letters + other.letters)

    def __pow__(self, k: int) -> "TwinWord":
        base = self if k >= 0 else self.inverse()
        return TwinWord(self.n, base.letters * abs(k))

    def inverse(self) -> "TwinWord":
        # every generator is an involution
        return TwinWord(self.n, self.letters[::-1])

    def __str__(self) -> str:
        return "[" + ",".join(str(a) for a in self.letters) + "]"


@dataclass(frozen=True)
class Permutation:
    """``images[p - 1]`` is the final slot of the strand starting in slot ``p``."""

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(v) for v in self.images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a permutation of 1..{len(images)}: {images}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, p: int) -> int:
        return self.images[p - 1]

    def is_identity(self) -> bool:
        return all(v == p for p, v in enumerate(self.images, start=1))

    def then(self, other: "Permutation") -> "Permutation":
        """Apply this permutation first, then ``other``."""
        return Permutation(tuple(other(v) for v in self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for start in range(1, self.n + 1):
            if start in seen:
                continue
            cyc, p = [], start
            while p not in seen:
                seen.add(p)
                cyc.append(p)
                p = self(p)
            out.append(tuple(cyc))
        return out

    def __str__(self) -> str:
        return "".join("(" + " ".join(map(str, c)) + ")" for c in self.cycles())


def _as_word(w, n: int | None = None) -> TwinWord:
    if isinstance(w, TwinWord):
        return w
    letters = tuple(w)
    if n is None:
        n = max(letters, default=1) + 1
    return TwinWord(n, letters)


def reduce_word(w: TwinWord) -> TwinWord:
    """Shortlex normal form of a word in ``T_n``.

    Examples
    --------
    >>> reduce_word(TwinWord(4, (1, 3, 1))).letters
    (3,)
    >>> reduce_word(TwinWord(3, (1, 2, 1))).letters
    (1, 2, 1)
    """
    w = _as_word(w)
    return TwinWord(w.n, tuple(_backend.core.reduce_letters(list(w.letters))))


def words_equal(u: TwinWord, v: TwinWord) -> bool:
    """Decide equality in ``T_n`` by comparing normal forms."""
    return u.n == v.n and reduce_word(u).letters == reduce_word(v).letters


def induced_permutation(w: TwinWord) -> Permutation:
    w = _as_word(w)
    occupant = list(range(1, w.n + 1))  # occupant[s] = strand in slot s + 1
    for a in w.letters:
        occupant[a - 1], occupant[a] = occupant[a], occupant[a - 1]
    images = [0] * w.n
    for slot, strand in enumerate(occupant, start=1):
        images[strand - 1] = slot
    return Permutation(tuple(images))


def is_pure(w: TwinWord) -> bool:
    return induced_permutation(w).is_identity()


@dataclass
class StrandTrajectory(Trajectory):
    """Strand worldlines of a twin word, one linear swap slab per letter."""

    @property
    def word(self) -> TwinWord:
        return self.meta["word"]


def word_to_trajectory(
    w: TwinWord, spacing: float = 1.0, height: float = 1.0, origin: float = 0.0
) -> StrandTrajectory:
    """Realise a word as a piecewise-linear motion of ``n`` particles.

    Parameters
    ----------
    w : TwinWord
    spacing : float
        Distance between neighbouring rest slots.
    height : float
        Duration of one swap slab.
    origin : float
        Position of slot 1.

    Strand ``p`` starts in slot ``p``. During the slab of letter ``t_i`` the
    strands in slots ``i`` and ``i + 1`` exchange places linearly while all
    others stay put, so only pairs ever meet and no triple coincides.
    """
    w = _as_word(w)
    if not (spacing > 0 and math.isfinite(spacing)):
        raise InvalidGeometryError(f"spacing must be positive, got {spacing}")
    if not (height > 0 and math.isfinite(height)):
        raise InvalidGeometryError(f"height must be positive, got {height}")
    slots = origin + spacing * np.arange(w.n)
    pos = slots.copy()
    occupant = list(range(w.n))
    frames = [pos.copy()]
    for a in w.letters:
        left, right = occupant[a - 1], occupant[a]
        pos[left], pos[right] = slots[a], slots[a - 1]
        occupant[a - 1], occupant[a] = right, left
        frames.append(pos.copy())
    if len(frames) == 1:
        frames.append(pos.copy())
    times = height * np.arange(len(frames), dtype=float)
    return StrandTrajectory(times, np.array(frames), {"word": w})


def _closed_triples(traj: Trajectory, triples, atol: float):
    first, last = traj.points[0], traj.points[-1]
    scale = max(1.0, float(np.max(np.abs(traj.points))))
    return [
        t for t in triples
        if np.allclose(first[np.array(t) - 1], last[np.array(t) - 1], rtol=0.0, atol=atol * scale)
    ]


def winding_numbers(
    traj: Trajectory,
    ms: MassSystem,
    triples: Iterable | None = None,
    eps: float = EPSILON,
    max_refine: int = MAX_REFINE,
) -> dict[tuple[int, int, int], int]:
    """Integer winding of every triple around its coincidence locus.

    Each requested triple must return to its starting positions; the
    remaining particles are unconstrained.

    Raises
    ------
    InvalidLoopError
        If a requested triple does not close.
    CoincidenceError
    SamplingTooCoarseError
        If an unwrapped total is further than ``WINDING_TOL`` turns from an
        integer.
    """
    triples = ms.triples() if triples is None else [check_triple(t, ms.n) for t in triples]
    closed = _closed_triples(traj, triples, 1e-12)
    if len(closed) != len(triples):
        bad = sorted(set(triples) - set(closed))
        raise InvalidLoopError(f"triples {bad} do not return to their starting configuration")
    out = {}
    for t, d in angle_increments(ms, traj, triples, eps, max_refine).items():
        turns = d / (2.0 * math.pi)
        k = round(turns)
        if abs(turns - k) > WINDING_TOL:
            raise SamplingTooCoarseError(f"winding of {t} is {turns!r} turns, not an integer")
        out[t] = int(k)
    return out


def word_windings(
    w: TwinWord, ms: MassSystem | None = None, spacing: float = 1.0, **kw
) -> dict[tuple[int, int, int], int]:
    """Windings of a pure word via its strand trajectory."""
    w = _as_word(w)
    if ms is None:
        ms = MassSystem((1.0,) * w.n)
    return winding_numbers(word_to_trajectory(w, spacing), ms, **kw)


def sorting_word(p: Permutation) -> TwinWord:
    """A word whose induced permutation undoes ``p`` (bubble sort)."""
    occupant = [0] * p.n
    for strand, slot in enumerate(p.images, start=1):
        occupant[slot - 1] = strand
    letters = []
    for end in range(p.n - 1, 0, -1):
        for s in range(end):
            if occupant[s] > occupant[s + 1]:
                occupant[s], occupant[s + 1] = occupant[s + 1], occupant[s]
                letters.append(s + 1)
    return TwinWord(p.n, tuple(letters))


def random_pure_word(rng: np.random.Generator, n: int, max_len: int) -> TwinWord:
    """A random pure word of length at most ``max_len``.

    A random prefix is closed up with a sorting word, and with equal odds a
    conjugated power of ``(t_i t_{i+1})**3`` is appended so that nontrivial
    windings are common.
    """
    budget = max_len
    blocks: list[int] = []
    if n >= 3 and rng.random() < 0.5 and budget >= 6:
        i = int(rng.integers(1, n - 1))
        k = 1 if budget < 12 else int(rng.choice([1, 2]))
        core = [i, i + 1] * (3 * k)
        if rng.random() < 0.5:
            core = core[::-1]
        budget -= len(core)
        g_len = int(rng.integers(0, budget // 2 + 1)) if budget >= 2 else 0
        g = [int(v) for v in rng.integers(1, n, size=g_len)]
        blocks = g + core + g[::-1]
        budget -= 2 * g_len
    max_sort = n * (n - 1) // 2
    prefix_len = max(0, budget - max_sort)
    plen = int(rng.integers(0, prefix_len + 1))
    prefix = TwinWord(n, tuple(int(v) for v in rng.integers(1, n, size=plen)))
    closing = sorting_word(induced_permutation(prefix))
    letters = blocks + list(prefix.letters) + list(closing.letters)
    w = TwinWord(n, tuple(letters))
    assert is_pure(w) and len(w) <= max_len
    return w


__all__ = [
    "TwinWord",
    "Permutation",
    "StrandTrajectory",
    "reduce_word",
    "words_equal",
    "induced_permutation",
    "is_pure",
    "word_to_trajectory",
    "winding_numbers",
    "word_windings",
    "sorting_word",
    "random_pure_word",
]
