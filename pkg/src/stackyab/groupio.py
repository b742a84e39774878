"""JSON-shaped interchange for groups, cocycles, and crossed modules."""

from __future__ import annotations

import numpy as np

from . import groups
from .cohomology import Cocycle2
from .crossed import CrossedModule, StableBracket
from .errors import CapExceeded, MAX_ORDER
from .groups import FiniteAbelian, FiniteGroup, GroupHom

__all__ = [
    "group_from_spec",
    "group_to_spec",
    "cocycle_from_spec",
    "cocycle_to_spec",
    "xmod_from_spec",
    "xmod_to_spec",
]

# catalog name -> (constructor, number of integer parameters, passes max_order)
_CATALOG = {
    "trivial": (groups.trivial, 0, False),
    "cyclic": (groups.cyclic, 1, False),
    "dihedral": (groups.dihedral, 1, False),
    "symmetric": (groups.symmetric, 1, True),
    "alternating": (groups.alternating, 1, True),
    "quaternion8": (groups.quaternion8, 0, False),
    "heisenberg": (groups.heisenberg, 1, True),
    "sl2": (groups.sl2, 1, True),
}


def _catalog_group(spec: dict, max_order: int) -> FiniteGroup:
    tokens = str(spec["catalog"]).strip().lower().split()
    if not tokens:
        raise ValueError("empty catalog name")
    head, inline = tokens[0], tokens[1:]
    params = list(spec.get("params", []))
    if head == "product":
        if inline or not params:
            raise ValueError("product takes nested group specs as params")
        factors = [group_from_spec(s, max_order=max_order) for s in params]
        total = int(np.prod([f.order for f in factors]))
        if total > max_order:
            raise CapExceeded(f"product order {total} exceeds cap {max_order}")
        return groups.direct_product(*factors)
    if head not in _CATALOG:
        raise ValueError(f"unknown catalog name {head!r}")
    build, arity, takes_cap = _CATALOG[head]
    args = [int(x) for x in inline] + [int(x) for x in params]
    if len(args) != arity:
        raise ValueError(f"catalog {head!r} takes {arity} parameter(s), got {len(args)}")
    if head == "sl2" and args[0] > 5:
        raise ValueError("sl2 catalog entries require p <= 5")
    g = build(*args, max_order=max_order) if takes_cap else build(*args)
    if g.order > max_order:
        raise CapExceeded(f"group order {g.order} exceeds cap {max_order}")
    return g


def group_from_spec(spec: dict, max_order: int = MAX_ORDER) -> FiniteGroup:
    """Build a group from {"cayley": ...}, {"permutations": ..., "points": m}, or {"catalog": ...}."""
    if not isinstance(spec, dict):
        raise ValueError("group spec must be a JSON object")
    keys = {"cayley", "permutations", "catalog"} & spec.keys()
    if len(keys) != 1:
        raise ValueError("group spec needs exactly one of cayley, permutations, catalog")
    if "cayley" in spec:
        table = np.asarray(spec["cayley"], dtype=np.int64)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise ValueError("cayley table must be square")
        if table.shape[0] > max_order:
            raise CapExceeded(f"group order {table.shape[0]} exceeds cap {max_order}")
        return groups.from_table(table)
    if "permutations" in spec:
        if "points" not in spec:
            raise ValueError("permutation specs need a points count")
        return groups.from_permutations(list(spec["permutations"]), int(spec["points"]),
                                        max_order=max_order)
    return _catalog_group(spec, max_order)


def group_to_spec(group: FiniteGroup) -> dict:
    """Canonical spec: the full Cayley table."""
    return {"cayley": group.table.tolist()}


def cocycle_from_spec(doc: dict, max_order: int = MAX_ORDER) -> Cocycle2:
    """Build a 2-cocycle from {"group": ..., "coefficients": [d1,...], "values": ...}."""
    for key in ("group", "coefficients", "values"):
        if key not in doc:
            raise ValueError(f"cocycle spec is missing {key!r}")
    group = group_from_spec(doc["group"], max_order=max_order)
    coeff = FiniteAbelian(doc["coefficients"])
    if list(doc["coefficients"]) != coeff.invariant_factors:
        raise ValueError("coefficients must be listed as invariant factors")
    values = np.asarray(doc["values"], dtype=np.int64)
    if values.shape != (coeff.rank, group.order, group.order):
        raise ValueError("values must have one table per invariant factor")
    f = Cocycle2(group, coeff, values)
    f.validate()
    return f


def cocycle_to_spec(f: Cocycle2) -> dict:
    return {
        "group": group_to_spec(f.group),
        "coefficients": f.coefficients.invariant_factors,
        "values": f.values.tolist(),
    }


def xmod_from_spec(doc: dict, max_order: int = MAX_ORDER
                   ) -> tuple[CrossedModule, StableBracket | None]:
    """Build a crossed module (and bracket, when present) from its interchange document."""
    for key in ("H", "G", "delta", "action"):
        if key not in doc:
            raise ValueError(f"crossed-module spec is missing {key!r}")
    h = group_from_spec(doc["H"], max_order=max_order)
    g = group_from_spec(doc["G"], max_order=max_order)
    delta = GroupHom(h, g, np.asarray(doc["delta"], dtype=np.int64))
    xm = CrossedModule(h, g, delta, np.asarray(doc["action"], dtype=np.int64))
    if "bracket" not in doc:
        return xm, None
    return xm, StableBracket(xm, np.asarray(doc["bracket"], dtype=np.int64))


def xmod_to_spec(xm: CrossedModule, bracket: StableBracket | None = None) -> dict:
    doc = {
        "H": group_to_spec(xm.H),
        "G": group_to_spec(xm.G),
        "delta": xm.delta.images.tolist(),
        "action": xm.action.tolist(),
    }
    if bracket is not None:
        doc["bracket"] = bracket.bracket.tolist()
    return doc
