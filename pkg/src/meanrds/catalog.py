"""Worked example systems over the group Z.

Five fixtures spanning both sides of the dichotomy:

* ``rot2``: two fibers swapped by the generator, each fiber a circle
  rotation by an irrational angle. Isometric, so every mean separation
  equals the starting distance; the base action on two points is minimal.
* ``rot1-trivial``: one fiber, golden-ratio rotation. The skew product is
  the rotation itself.
* ``cat-trivial``: one fiber, the hyperbolic automorphism [[2,1],[1,1]] of
  the 2-torus. Nearby pairs separate and equidistribute.
* ``cat2``: two swapped fibers with different hyperbolic matrices.
* ``mixed``: two fibers fixed by the base action, one a rotation on the
  2-torus and one hyperbolic; the hyperbolic fiber drives the sup
  separation while the rotation fiber alone would be mean-equicontinuous.

Angles are irrational in exact arithmetic; as floats they are rationals of
astronomical period, far beyond every window used here.
"""

from __future__ import annotations

import math

from .groups import parse_group
from .rds import BaseSpace, FiberMap, FiberSpace, RandomDynamicalSystem

CAT_MATRIX = ((2, 1), (1, 1))
CAT_MATRIX_B = ((3, 2), (1, 1))

ROT2_ANGLES = (math.sqrt(2.0) - 1.0, math.sqrt(3.0) - 1.0)
GOLDEN_ANGLE = (math.sqrt(5.0) - 1.0) / 2.0
MIXED_ANGLES = (math.sqrt(2.0) - 1.0, (math.sqrt(5.0) - 1.0) / 2.0)


def _rot2() -> RandomDynamicalSystem:
    base = BaseSpace(("w0", "w1"), (0.5, 0.5), ((1, 0),))
    return RandomDynamicalSystem(
        name="rot2",
        group=parse_group("Z"),
        base=base,
        dim=1,
        fibers=(FiberSpace.full(1), FiberSpace.full(1)),
        maps=((FiberMap.rotation((ROT2_ANGLES[0],)), FiberMap.rotation((ROT2_ANGLES[1],))),),
        declared={
            "expected": "wme-evidence",
            "minimal_base": True,
            "notes": "isometric fibers; separation profiles are constant",
        },
    )


def _rot1_trivial() -> RandomDynamicalSystem:
    base = BaseSpace(("w0",), (1.0,), ((0,),))
    return RandomDynamicalSystem(
        name="rot1-trivial",
        group=parse_group("Z"),
        base=base,
        dim=1,
        fibers=(FiberSpace.full(1),),
        maps=((FiberMap.rotation((GOLDEN_ANGLE,)),),),
        declared={
            "expected": "wme-evidence",
            "minimal_base": False,
            "notes": "one-point base; the skew product is a circle rotation",
        },
    )


def _cat_trivial() -> RandomDynamicalSystem:
    base = BaseSpace(("w0",), (1.0,), ((0,),))
    return RandomDynamicalSystem(
        name="cat-trivial",
        group=parse_group("Z"),
        base=base,
        dim=2,
        fibers=(FiberSpace.full(2),),
        maps=((FiberMap(CAT_MATRIX, (0.0, 0.0)),),),
        declared={
            "expected": "sensitive-evidence",
            "minimal_base": False,
            "notes": "hyperbolic torus automorphism; difference orbits equidistribute",
        },
    )


def _cat2() -> RandomDynamicalSystem:
    base = BaseSpace(("w0", "w1"), (0.5, 0.5), ((1, 0),))
    return RandomDynamicalSystem(
        name="cat2",
        group=parse_group("Z"),
        base=base,
        dim=2,
        fibers=(FiberSpace.full(2), FiberSpace.full(2)),
        maps=((FiberMap(CAT_MATRIX, (0.0, 0.0)), FiberMap(CAT_MATRIX_B, (0.0, 0.0))),),
        declared={
            "expected": "sensitive-evidence",
            "minimal_base": True,
            "notes": "alternating hyperbolic matrices",
        },
    )


def _mixed() -> RandomDynamicalSystem:
    base = BaseSpace(("w0", "w1"), (0.5, 0.5), ((0, 1),))
    return RandomDynamicalSystem(
        name="mixed",
        group=parse_group("Z"),
        base=base,
        dim=2,
        fibers=(FiberSpace.full(2), FiberSpace.full(2)),
        maps=(
            (FiberMap.rotation(MIXED_ANGLES), FiberMap(CAT_MATRIX, (0.0, 0.0))),
        ),
        declared={
            "expected": "sensitive-evidence",
            "minimal_base": False,
            "notes": "base action fixes both fibers; the hyperbolic fiber drives the sup",
        },
    )


_BUILDERS = {
    "rot2": _rot2,
    "rot1-trivial": _rot1_trivial,
    "cat-trivial": _cat_trivial,
    "cat2": _cat2,
    "mixed": _mixed,
}


def names() -> tuple[str, ...]:
    return tuple(_BUILDERS)


def load(name: str) -> RandomDynamicalSystem:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(
            f"unknown system {name!r}; available: {', '.join(_BUILDERS)}"
        ) from None
    return builder()


def build_system(spec: dict) -> RandomDynamicalSystem:
    """Build a system from a plain dict (the JSON config shape).

    Expected keys: ``group`` (text form), ``dim``, ``base`` with ``labels``,
    ``weights``, and ``perms`` (one permutation per generator), ``maps`` as a
    list per generator of per-base-point ``{"matrix": ..., "shift": ...}``,
    and optionally ``fibers`` (``"full"`` or ``{"slices": [[[axis, value],
    ...], ...]}`` per base point), ``name``, ``declared``.
    """
    group = parse_group(spec["group"])
    base_spec = spec["base"]
    base = BaseSpace(
        tuple(base_spec["labels"]),
        tuple(float(w) for w in base_spec["weights"]),
        tuple(tuple(int(i) for i in p) for p in base_spec["perms"]),
    )
    dim = int(spec["dim"])
    fibers_spec = spec.get("fibers")
    fibers = []
    for k in range(base.size):
        fs = "full" if fibers_spec is None else fibers_spec[k]
        if fs == "full":
            fibers.append(FiberSpace.full(dim))
        else:
            slices = tuple(
                tuple((int(ax), float(val)) for ax, val in sl) for sl in fs["slices"]
            )
            fibers.append(FiberSpace(dim, slices))
    maps = tuple(
        tuple(
            FiberMap(
                tuple(tuple(int(v) for v in row) for row in m["matrix"]),
                tuple(float(s) for s in m.get("shift", [0.0] * dim)),
            )
            for m in gen_row
        )
        for gen_row in spec["maps"]
    )
    return RandomDynamicalSystem(
        name=str(spec.get("name", "custom")),
        group=group,
        base=base,
        dim=dim,
        fibers=tuple(fibers),
        maps=maps,
        declared=dict(spec.get("declared", {})),
    )


def summary() -> list[dict]:
    rows = []
    for name in names():
        sys_ = load(name)
        rows.append(
            {
                "name": name,
                "group": sys_.group.spec,
                "dim": sys_.dim,
                "base_size": sys_.base.size,
                "expected": sys_.declared.get("expected", ""),
                "notes": sys_.declared.get("notes", ""),
            }
        )
    return rows
