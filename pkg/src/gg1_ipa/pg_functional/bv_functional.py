# -*- coding: utf-8 -*-
"""
Bounded-variation, càdlàg test functions of the workload.

A functional is stored as

    f(w) = offset + C(w) + sum_{a <= w} mass(a)

where C is continuous with C(0) = 0, built from closed-form pieces on
contiguous segments [s_i, s_{i+1}), and the atoms carry every jump. Each
segment contributes only its increment P_i(w) - P_i(s_i), so C is continuous
whatever pieces are declared. Atoms at w <= 0 are folded into the offset, and
the builders move the value of the first segment at 0 there too.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial
from loguru import logger

from gg1_ipa.utils.constants import IPA_MONOTONE_PROBE
from gg1_ipa.utils.ipa_errors import FunctionalError

NONDECREASING = "nondecreasing"
DIFFERENCE = "difference-of-monotone"

ArrayLike = Union[float, Sequence[float], np.ndarray]


class Piece(ABC):
    """Closed-form building block of a segment"""

    @abstractmethod
    def value(self, x: np.ndarray) -> np.ndarray:
        """Evaluates the piece"""

    @abstractmethod
    def antiderivative(self, x: np.ndarray) -> np.ndarray:
        """Any antiderivative of the piece"""

    @abstractmethod
    def derivative(self) -> "Piece":
        """Derivative as a new piece"""

    @abstractmethod
    def scaled(self, coef: float) -> "Piece":
        """Piece multiplied by a constant"""


@dataclass(frozen=True)
class PolyPiece(Piece):
    """Polynomial in (w - origin); coefficients in increasing degree"""

    coef: Tuple[float, ...]
    origin: float = 0.0

    @property
    def poly(self) -> Polynomial:
        return Polynomial(self.coef)

    def value(self, x):
        return self.poly(np.asarray(x, dtype=float) - self.origin)

    def antiderivative(self, x):
        return self.poly.integ()(np.asarray(x, dtype=float) - self.origin)

    def derivative(self):
        deriv = self.poly.deriv()
        return PolyPiece(tuple(float(c) for c in deriv.coef), self.origin)

    def scaled(self, coef):
        return PolyPiece(tuple(coef * c for c in self.coef), self.origin)


@dataclass(frozen=True)
class ExpPiece(Piece):
    """scale * exp(rate * (w - origin)), rate != 0"""

    scale: float
    rate: float
    origin: float = 0.0

    def value(self, x):
        return self.scale * np.exp(self.rate * (np.asarray(x, dtype=float) - self.origin))

    def antiderivative(self, x):
        return self.value(x) / self.rate

    def derivative(self):
        return ExpPiece(self.scale * self.rate, self.rate, self.origin)

    def scaled(self, coef):
        return ExpPiece(coef * self.scale, self.rate, self.origin)


def exp_piece(scale: float, rate: float, origin: float = 0.0) -> Piece:
    """exponential-of-linear piece; a zero rate degenerates to a constant"""
    if rate == 0.0:
        return PolyPiece((float(scale),), origin)
    return ExpPiece(float(scale), float(rate), float(origin))


class BVFunctional:
    """
    Non-decreasing or difference-of-monotone càdlàg function of the workload.

    Instances are immutable once built and may be shared between
    replications running in other processes.
    """

    def __init__(
        self,
        starts: Sequence[float] = (0.0,),
        pieces: Sequence[Sequence[Piece]] = ((),),
        atoms: Iterable[Tuple[float, float]] = (),
        offset: float = 0.0,
        kind: str = NONDECREASING,
        parts: Optional[Tuple["BVFunctional", "BVFunctional"]] = None,
        atom_eps: float = 0.0,
        spec: Optional[Dict] = None,
        validate: bool = True,
    ):
        if kind not in (NONDECREASING, DIFFERENCE):
            raise FunctionalError(f"unknown functional kind: {kind}")
        starts = [float(s) for s in starts]
        if len(starts) != len(pieces) or not starts:
            raise FunctionalError("each segment needs exactly one list of pieces")
        if starts[0] != 0.0:
            raise FunctionalError("the first segment must start at 0")
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise FunctionalError("segment starts must be strictly increasing")
        if atom_eps < 0:
            raise FunctionalError("atom tolerance must be >= 0")

        self.kind = kind
        self.parts = parts
        self.atom_eps = float(atom_eps)
        self.spec = spec
        self._starts = np.asarray(starts, dtype=float)
        self._ends = np.append(self._starts[1:], np.inf)
        self._pieces: Tuple[Tuple[Piece, ...], ...] = tuple(tuple(p) for p in pieces)

        # Fold atoms at or below zero into the offset so that f(0) = offset
        merged: Dict[float, float] = {}
        for loc, mass in atoms:
            loc, mass = float(loc), float(mass)
            if loc <= 0.0:
                offset += mass
                continue
            merged[loc] = merged.get(loc, 0.0) + mass
        locs = sorted(k for k, v in merged.items() if v != 0.0)
        self._atom_locs = np.asarray(locs, dtype=float)
        self._atom_mass = np.asarray([merged[k] for k in locs], dtype=float)
        self._atom_cum = np.concatenate(([0.0], np.cumsum(self._atom_mass)))
        self.offset = float(offset)

        self._bases, self._prims = self._accumulate()
        if validate and kind == NONDECREASING:
            self._check_monotone()

    # ------------------------------------------------------------------
    # construction helpers
    # ------------------------------------------------------------------
    def _segment_sum(self, idx: int, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for piece in self._pieces[idx]:
            out = out + piece.value(x)
        return out

    def _segment_anti(self, idx: int, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for piece in self._pieces[idx]:
            out = out + piece.antiderivative(x)
        return out

    def _accumulate(self) -> Tuple[np.ndarray, np.ndarray]:
        """Continuous value and primitive of C at every segment start"""
        count = len(self._starts)
        bases = np.zeros(count)
        prims = np.zeros(count)
        for i in range(count - 1):
            s, e = self._starts[i], self._ends[i]
            p_s = float(self._segment_sum(i, s))
            bases[i + 1] = bases[i] + float(self._segment_sum(i, e)) - p_s
            prims[i + 1] = (
                prims[i]
                + (bases[i] - p_s) * (e - s)
                + float(self._segment_anti(i, e))
                - float(self._segment_anti(i, s))
            )
        return bases, prims

    def _check_monotone(self):
        if np.any(self._atom_mass < 0):
            raise FunctionalError("a non-decreasing functional needs atom masses >= 0")
        for i, (s, e) in enumerate(zip(self._starts, self._ends)):
            stop = e if np.isfinite(e) else s + 100.0
            grid = np.linspace(s, stop, IPA_MONOTONE_PROBE)
            vals = self._segment_sum(i, grid)
            scale = max(1.0, float(np.max(np.abs(vals))))
            if np.any(np.diff(vals) < -1e-12 * scale):
                raise FunctionalError(
                    f"functional declared {NONDECREASING} decreases on [{s}, {stop}]"
                )

    # ------------------------------------------------------------------
    # properties
    # ------------------------------------------------------------------
    @property
    def atoms(self) -> List[Tuple[float, float]]:
        """Sorted (location, mass) pairs"""
        return list(zip(self._atom_locs.tolist(), self._atom_mass.tolist()))

    @property
    def has_atoms(self) -> bool:
        return self._atom_locs.size > 0

    @property
    def breakpoints(self) -> List[float]:
        return self._starts.tolist()

    def monotone_parts(self) -> List[Tuple[float, "BVFunctional"]]:
        """Signed non-decreasing parts the estimators run on"""
        if self.kind == DIFFERENCE and self.parts is not None:
            return [(1.0, self.parts[0]), (-1.0, self.parts[1])]
        return [(1.0, self)]

    # ------------------------------------------------------------------
    # evaluation
    # ------------------------------------------------------------------
    def _continuous(self, w: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self._starts, w, side="right") - 1
        out = np.empty_like(w)
        for i in np.unique(idx):
            sel = idx == i
            x = w[sel]
            out[sel] = (
                self._bases[i]
                + self._segment_sum(i, x)
                - float(self._segment_sum(i, self._starts[i]))
            )
        return out

    def _continuous_primitive(self, w: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self._starts, w, side="right") - 1
        out = np.empty_like(w)
        for i in np.unique(idx):
            sel = idx == i
            x = w[sel]
            s = self._starts[i]
            p_s = float(self._segment_sum(i, s))
            out[sel] = (
                self._prims[i]
                + (self._bases[i] - p_s) * (x - s)
                + self._segment_anti(i, x)
                - float(self._segment_anti(i, s))
            )
        return out

    @staticmethod
    def _as_workload(w: ArrayLike) -> Tuple[np.ndarray, bool]:
        arr = np.asarray(w, dtype=float)
        if np.any(arr < 0):
            raise FunctionalError("workload must be >= 0")
        return np.atleast_1d(arr), arr.ndim == 0

    @staticmethod
    def _out(arr: np.ndarray, scalar: bool):
        return float(arr[0]) if scalar else arr

    def shape(self, w: ArrayLike):
        """f(w) - f(0); the normalized function the estimators work with"""
        arr, scalar = self._as_workload(w)
        jumps = self._atom_cum[np.searchsorted(self._atom_locs, arr, side="right")]
        return self._out(self._continuous(arr) + jumps, scalar)

    def eval(self, w: ArrayLike):
        """Right-continuous value f(w)"""
        arr, scalar = self._as_workload(w)
        jumps = self._atom_cum[np.searchsorted(self._atom_locs, arr, side="right")]
        return self._out(self.offset + self._continuous(arr) + jumps, scalar)

    __call__ = eval

    def atom_mass(self, w: ArrayLike):
        """mu_f({w}); atoms within atom_eps of w count as hits"""
        arr, scalar = self._as_workload(w)
        lo = np.searchsorted(self._atom_locs, arr - self.atom_eps, side="left")
        hi = np.searchsorted(self._atom_locs, arr + self.atom_eps, side="right")
        return self._out(self._atom_cum[hi] - self._atom_cum[lo], scalar)

    def interval_mass(self, a: float, b: float) -> float:
        """mu_f((a, b]) = f(b) - f(a)"""
        if a > b:
            raise FunctionalError(f"interval_mass needs a <= b, got a={a}, b={b}")
        if a == b:
            return 0.0
        return self.eval(b) - self.eval(a)

    def shape_primitive(self, w: ArrayLike):
        """Integral of the normalized function over [0, w]"""
        arr, scalar = self._as_workload(w)
        atoms = np.zeros_like(arr)
        for loc, mass in zip(self._atom_locs, self._atom_mass):
            atoms += mass * np.maximum(arr - loc, 0.0)
        return self._out(self._continuous_primitive(arr) + atoms, scalar)

    def primitive(self, w: ArrayLike):
        """F(w) = integral of f over [0, w]; atoms carry no Lebesgue mass"""
        arr, scalar = self._as_workload(w)
        out = np.atleast_1d(self.shape_primitive(arr)) + self.offset * arr
        return self._out(out, scalar)

    # ------------------------------------------------------------------
    # calculus and algebra
    # ------------------------------------------------------------------
    def formal_derivative(self) -> "BVFunctional":
        """
        f' with its own atoms at the kinks of f.

        Only atom-free non-decreasing functionals are differentiable in the
        sense needed by the second-order estimator.
        """
        if self.kind != NONDECREASING:
            raise FunctionalError("formal_derivative needs a non-decreasing functional")
        if self.has_atoms:
            raise FunctionalError("formal_derivative needs an atom-free functional")
        pieces = [tuple(p.derivative() for p in seg) for seg in self._pieces]

        def slope(i: int, x: float) -> float:
            return float(sum(float(p.value(x)) for p in pieces[i]))

        atoms = []
        for i in range(1, len(self._starts)):
            s = float(self._starts[i])
            jump = slope(i, s) - slope(i - 1, s)
            if jump != 0.0:
                atoms.append((s, jump))
        args = (self._starts.tolist(), pieces, atoms)
        options = {"offset": slope(0, 0.0), "atom_eps": self.atom_eps}
        try:
            deriv = BVFunctional(*args, kind=NONDECREASING, **options)
        except FunctionalError:
            deriv = BVFunctional(*args, kind=DIFFERENCE, **options)
        logger.trace(f"formal derivative: {len(atoms)} atoms, kind {deriv.kind}")
        return deriv

    def _on_breakpoints(self, starts: np.ndarray) -> List[Tuple[Piece, ...]]:
        """Pieces of self re-expressed on a finer set of segment starts"""
        idx = np.searchsorted(self._starts, starts, side="right") - 1
        return [self._pieces[i] for i in idx]

    def _combine(
        self,
        other: "BVFunctional",
        kind: str,
        parts: Optional[Tuple["BVFunctional", "BVFunctional"]] = None,
    ) -> "BVFunctional":
        """self + other on the union of both segment grids"""
        starts = np.union1d(self._starts, other._starts)
        mine = self._on_breakpoints(starts)
        theirs = other._on_breakpoints(starts)
        return BVFunctional(
            starts.tolist(),
            [a + b for a, b in zip(mine, theirs)],
            self.atoms + other.atoms,
            offset=self.offset + other.offset,
            kind=kind,
            parts=parts,
            atom_eps=max(self.atom_eps, other.atom_eps),
            validate=False,
        )

    def with_options(self, atom_eps: float, spec: Optional[Dict] = None) -> "BVFunctional":
        """Copy carrying another atom tolerance and spec"""
        return BVFunctional(
            self._starts.tolist(),
            self._pieces,
            self.atoms,
            offset=self.offset,
            kind=self.kind,
            parts=self.parts,
            atom_eps=atom_eps,
            spec=spec,
            validate=False,
        )

    def __add__(self, other: "BVFunctional") -> "BVFunctional":
        if not isinstance(other, BVFunctional):
            return NotImplemented
        kind = NONDECREASING if self.kind == other.kind == NONDECREASING else DIFFERENCE
        return self._combine(other, kind)

    def scale(self, coef: float) -> "BVFunctional":
        """coef * f"""
        coef = float(coef)
        pieces = [tuple(p.scaled(coef) for p in seg) for seg in self._pieces]
        kind = self.kind if coef >= 0 else DIFFERENCE
        return BVFunctional(
            self._starts.tolist(),
            pieces,
            [(loc, coef * mass) for loc, mass in self.atoms],
            offset=coef * self.offset,
            kind=kind,
            atom_eps=self.atom_eps,
            validate=False,
        )

    def __mul__(self, coef: float) -> "BVFunctional":
        if isinstance(coef, BVFunctional):
            return NotImplemented
        return self.scale(coef)

    __rmul__ = __mul__

    def __sub__(self, other: "BVFunctional") -> "BVFunctional":
        if not isinstance(other, BVFunctional):
            return NotImplemented
        parts = (self, other) if self.kind == other.kind == NONDECREASING else None
        return self._combine(other.scale(-1.0), DIFFERENCE, parts)

    def __repr__(self) -> str:
        return (
            f"BVFunctional(kind={self.kind}, segments={len(self._starts)}, "
            f"atoms={self.atoms}, offset={self.offset})"
        )
