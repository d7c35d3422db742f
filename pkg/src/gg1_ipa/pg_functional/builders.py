# -*- coding: utf-8 -*-
"""
Constructors of BVFunctional from closed forms and from experiment-file specs
"""
from typing import Dict, List, Sequence, Tuple

from loguru import logger

from gg1_ipa.pg_functional.bv_functional import (
    BVFunctional,
    DIFFERENCE,
    NONDECREASING,
    Piece,
    PolyPiece,
    exp_piece,
)
from gg1_ipa.utils.ipa_errors import FunctionalError


def constant(value: float) -> BVFunctional:
    """f(w) = value"""
    return BVFunctional(offset=value, spec={"type": "constant", "value": value})


def identity() -> BVFunctional:
    """f(w) = w"""
    return BVFunctional(
        (0.0,), ((PolyPiece((0.0, 1.0)),),), spec={"type": "identity"}
    )


def indicator(threshold: float) -> BVFunctional:
    """f(w) = 1{w >= threshold}"""
    return BVFunctional(
        atoms=[(threshold, 1.0)],
        spec={"type": "indicator", "threshold": threshold},
    )


def ramp(knee: float) -> BVFunctional:
    """f(w) = max(w - knee, 0)"""
    spec = {"type": "ramp", "knee": knee}
    if knee <= 0:
        return BVFunctional(
            (0.0,), ((PolyPiece((0.0, 1.0)),),), offset=-knee, spec=spec
        )
    return BVFunctional(
        (0.0, knee), ((), (PolyPiece((0.0, 1.0), knee),)), spec=spec
    )


def polynomial(coefficients: Sequence[float]) -> BVFunctional:
    """f(w) = sum_i c_i w^i; must be non-decreasing on [0, inf)"""
    coef = tuple(float(c) for c in coefficients)
    if not coef:
        raise FunctionalError("polynomial needs at least one coefficient")
    return BVFunctional(
        (0.0,),
        ((PolyPiece(coef),),),
        offset=coef[0],
        spec={"type": "polynomial", "coefficients": list(coef)},
    )


def _segment_pieces(seg: Dict, start: float, end: float) -> List[Tuple[float, Tuple[Piece, ...]]]:
    """(start, pieces) pairs for one declared segment"""
    kind = seg.get("type")
    if kind == "constant":
        return [(start, ())]
    if kind == "linear":
        return [(start, (PolyPiece((0.0, float(seg["slope"])), start),))]
    if kind == "polynomial":
        coef = tuple(float(c) for c in seg["coefficients"])
        return [(start, (PolyPiece(coef, start),))]
    if kind == "exponential":
        return [(start, (exp_piece(seg["scale"], seg["rate"], start),))]
    if kind == "tabulated":
        xs = [float(x) for x in seg["x"]]
        ys = [float(y) for y in seg["y"]]
        if len(xs) != len(ys) or len(xs) < 2:
            raise FunctionalError("tabulated segment needs matching x, y of length >= 2")
        if xs[0] != start:
            raise FunctionalError(f"tabulated knots must start at the segment start {start}")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise FunctionalError("tabulated knots must be strictly increasing")
        if xs[-1] > end:
            raise FunctionalError("tabulated knots run past the next segment")
        out = []
        for x0, x1, y0, y1 in zip(xs, xs[1:], ys, ys[1:]):
            out.append((x0, (PolyPiece((0.0, (y1 - y0) / (x1 - x0)), x0),)))
        # flat after the last knot
        if xs[-1] < end:
            out.append((xs[-1], ()))
        return out
    raise FunctionalError(f"unknown segment type: {kind}")


def piecewise(
    segments: Sequence[Dict],
    atoms: Sequence = (),
    offset: float = 0.0,
    kind: str = NONDECREASING,
) -> BVFunctional:
    """
    Continuous part given segment by segment, plus jumps.

    Every segment dict has a ``start`` and a ``type`` among constant, linear
    (``slope``), polynomial (``coefficients`` in powers of w - start),
    exponential (``scale * exp(rate * (w - start))``) and tabulated (knots
    ``x``, ``y`` joined linearly). Atoms are ``{"location", "mass"}`` dicts
    or pairs.
    """
    if not segments:
        segments = [{"start": 0.0, "type": "constant"}]
    starts = [float(s.get("start", 0.0)) for s in segments]
    if starts[0] != 0.0:
        raise FunctionalError("the first segment must start at 0")
    ends = starts[1:] + [float("inf")]

    flat_starts: List[float] = []
    flat_pieces: List[Tuple[Piece, ...]] = []
    for seg, s, e in zip(segments, starts, ends):
        for sub_start, pieces in _segment_pieces(seg, s, e):
            flat_starts.append(sub_start)
            flat_pieces.append(pieces)

    pairs = []
    for atom in atoms:
        if isinstance(atom, dict):
            pairs.append((float(atom["location"]), float(atom["mass"])))
        else:
            loc, mass = atom
            pairs.append((float(loc), float(mass)))

    # C(0) = 0, the first segment's value at 0 belongs to the offset
    at_zero = float(sum(float(p.value(0.0)) for p in flat_pieces[0]))
    if segments[0].get("type") == "tabulated":
        at_zero = float(segments[0]["y"][0])

    return BVFunctional(
        flat_starts,
        flat_pieces,
        pairs,
        offset=offset + at_zero,
        kind=kind,
        spec={
            "type": "piecewise",
            "segments": list(segments),
            "atoms": [{"location": a, "mass": m} for a, m in pairs],
            "offset": offset,
        },
    )


def from_spec(spec: Dict, atom_eps: float = 0.0) -> BVFunctional:
    """Builds the functional declared in an experiment file"""
    kind = spec.get("type")
    logger.trace(f"building functional of type {kind}")
    if kind == "indicator":
        func = indicator(float(spec["threshold"]))
    elif kind == "identity":
        func = identity()
    elif kind == "ramp":
        func = ramp(float(spec["knee"]))
    elif kind == "constant":
        func = constant(float(spec["value"]))
    elif kind == "polynomial":
        func = polynomial(spec["coefficients"])
    elif kind == "piecewise":
        func = piecewise(
            spec.get("segments", []),
            spec.get("atoms", []),
            offset=float(spec.get("offset", 0.0)),
        )
    elif kind == "difference":
        plus = from_spec(spec["plus"], atom_eps)
        minus = from_spec(spec["minus"], atom_eps)
        if plus.kind != NONDECREASING or minus.kind != NONDECREASING:
            raise FunctionalError("both parts of a difference must be non-decreasing")
        func = plus - minus
    else:
        raise FunctionalError(f"unknown functional type: {kind}")
    return func.with_options(float(atom_eps), dict(spec))
