"""Finite Kripke frames and models.

Worlds carry structured identities: ``BaseWorld`` for quantifier-tree worlds
(level, classical assignment, creation serial) and ``GadgetWorld`` for the
worlds of the ladder gadgets, optionally tagged with the base world hosting
the copy.  The string forms of these identities are the stable ids used in
JSON dumps, e.g. ``base:L2:{1,3}:#7`` and ``gadget:m3:a0@base:L1:{}:#2``.

Model checking evaluates each distinct subformula once over all worlds as a
bitmask, which doubles as the (world, subformula) memoization and keeps the
whole check at O(|formula| * |worlds| * |relation|).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Mapping, Optional, Union

from .syntax import (
    MAnd,
    MBox,
    MBoxPlus,
    MDia,
    MFalse,
    MImp,
    MNot,
    MOr,
    MTrue,
    MVar,
    ModalFormula,
    expand_sugar,
    modal_vars,
)

__all__ = [
    "BaseWorld",
    "GadgetWorld",
    "WorldId",
    "world_id_str",
    "world_id_from_str",
    "KripkeFrame",
    "KripkeModel",
    "model_check",
    "model_check_all",
    "close",
    "frame_class_check",
    "frame_validates",
    "ValuationBudgetError",
    "wgrz_axiom",
    "model_to_json",
    "model_from_json",
    "frame_to_json",
    "frame_from_json",
    "frame_to_dot",
]


@dataclass(frozen=True)
class BaseWorld:
    """Quantifier-tree world: a classical assignment at a quantifier level."""

    level: int
    assignment: frozenset[int]
    serial: int


@dataclass(frozen=True)
class GadgetWorld:
    """World of a ladder gadget F_m: part is 'a<i>', 'b' or 'c'; ``host`` tags
    which base world the copy hangs below (None for standalone frames)."""

    gadget: int
    part: str
    host: Optional[BaseWorld] = None


WorldId = Union[BaseWorld, GadgetWorld]


def world_id_str(w: WorldId) -> str:
    if isinstance(w, BaseWorld):
        inner = ",".join(str(i) for i in sorted(w.assignment))
        return f"base:L{w.level}:{{{inner}}}:#{w.serial}"
    if isinstance(w, GadgetWorld):
        tag = f"gadget:m{w.gadget}:{w.part}"
        if w.host is not None:
            tag += f"@{world_id_str(w.host)}"
        return tag
    raise TypeError(f"not a world id: {w!r}")


_BASE_RE = re.compile(r"^base:L(\d+):\{([\d,]*)\}:#(\d+)$")
_GADGET_RE = re.compile(r"^gadget:m(\d+):(b|c|a\d+)(?:@(.+))?$")


def world_id_from_str(text: str) -> WorldId:
    m = _BASE_RE.match(text)
    if m:
        inner = m.group(2)
        assignment = frozenset(int(t) for t in inner.split(",")) if inner else frozenset()
        return BaseWorld(int(m.group(1)), assignment, int(m.group(3)))
    m = _GADGET_RE.match(text)
    if m:
        host = world_id_from_str(m.group(3)) if m.group(3) else None
        if host is not None and not isinstance(host, BaseWorld):
            raise ValueError(f"gadget host must be a base world: {text!r}")
        return GadgetWorld(int(m.group(1)), m.group(2), host)
    raise ValueError(f"unrecognized world id: {text!r}")


@dataclass(frozen=True)
class KripkeFrame:
    worlds: frozenset[WorldId]
    relation: frozenset[tuple[WorldId, WorldId]]

    def __post_init__(self):
        for u, v in self.relation:
            if u not in self.worlds or v not in self.worlds:
                raise ValueError(f"relation pair ({u!r}, {v!r}) leaves the world set")


@dataclass(frozen=True, eq=True)
class KripkeModel:
    frame: KripkeFrame
    valuation: Mapping[int, frozenset[WorldId]]
    root: WorldId

    def __post_init__(self):
        if self.root not in self.frame.worlds:
            raise ValueError("root must be one of the frame's worlds")
        for index, worlds in self.valuation.items():
            if not worlds <= self.frame.worlds:
                raise ValueError(f"valuation of p{index} leaves the world set")


class ValuationBudgetError(Exception):
    """Raised when frame_validates would need to search too many valuations."""


# ---------------------------------------------------------------------------
# Bitmask evaluation
# ---------------------------------------------------------------------------


def _frame_bits(frame: KripkeFrame):
    worlds = sorted(frame.worlds, key=world_id_str)
    index = {w: i for i, w in enumerate(worlds)}
    succ = [0] * len(worlds)
    for u, v in frame.relation:
        succ[index[u]] |= 1 << index[v]
    return worlds, index, succ


def _eval_masks(f: ModalFormula, var_masks: Mapping[int, int], succ: list[int], n: int) -> int:
    """Mask of worlds satisfying ``f`` (already sugar-free)."""
    full = (1 << n) - 1
    memo: dict = {}

    def ev(g) -> int:
        hit = memo.get(g)
        if hit is not None:
            return hit
        if isinstance(g, MVar):
            result = var_masks.get(g.index, 0)
        elif isinstance(g, MFalse):
            result = 0
        elif isinstance(g, MTrue):
            result = full
        elif isinstance(g, MNot):
            result = full & ~ev(g.body)
        elif isinstance(g, MAnd):
            result = full
            for item in g.items:
                result &= ev(item)
        elif isinstance(g, MOr):
            result = ev(g.left) | ev(g.right)
        elif isinstance(g, MImp):
            result = (full & ~ev(g.left)) | ev(g.right)
        elif isinstance(g, MBox):
            body = ev(g.body)
            result = 0
            for i in range(n):
                if succ[i] & ~body == 0:
                    result |= 1 << i
        elif isinstance(g, MDia):
            body = ev(g.body)
            result = 0
            for i in range(n):
                if succ[i] & body:
                    result |= 1 << i
        else:
            raise TypeError(f"unexpanded or non-modal node: {g!r}")
        memo[g] = result
        return result

    return ev(f)


def _model_masks(model: KripkeModel, f: ModalFormula):
    worlds, index, succ = _frame_bits(model.frame)
    var_masks = {}
    for var, members in model.valuation.items():
        mask = 0
        for w in members:
            mask |= 1 << index[w]
        var_masks[var] = mask
    mask = _eval_masks(expand_sugar(f), var_masks, succ, len(worlds))
    return worlds, index, mask


def model_check(model: KripkeModel, world: WorldId, f: ModalFormula) -> bool:
    """Standard Kripke satisfaction of ``f`` at ``world`` (sugar expanded)."""
    if world not in model.frame.worlds:
        raise ValueError(f"unknown world: {world!r}")
    _, index, mask = _model_masks(model, f)
    return bool(mask >> index[world] & 1)


def model_check_all(model: KripkeModel, f: ModalFormula) -> frozenset[WorldId]:
    """All worlds of the model satisfying ``f``."""
    worlds, _, mask = _model_masks(model, f)
    return frozenset(w for i, w in enumerate(worlds) if mask >> i & 1)


# ---------------------------------------------------------------------------
# Closures and frame classes
# ---------------------------------------------------------------------------

_CLOSE_MODES = ("transitive", "reflexive_transitive", "reflexive_symmetric")


def close(frame: KripkeFrame, mode: str) -> KripkeFrame:
    """Smallest superset of the relation with the named property."""
    if mode not in _CLOSE_MODES:
        raise ValueError(f"mode must be one of {_CLOSE_MODES}, got {mode!r}")
    worlds, _, succ = _frame_bits(frame)
    n = len(worlds)
    if mode == "reflexive_symmetric":
        for i in range(n):
            succ[i] |= 1 << i
        for i in range(n):
            row = succ[i]
            j = 0
            while row:
                if row & 1:
                    succ[j] |= 1 << i
                row >>= 1
                j += 1
    else:
        if mode == "reflexive_transitive":
            for i in range(n):
                succ[i] |= 1 << i
        # Warshall over bit rows
        for k in range(n):
            bit = 1 << k
            for i in range(n):
                if succ[i] & bit:
                    succ[i] |= succ[k]
    relation = set()
    for i in range(n):
        row = succ[i]
        j = 0
        while row:
            if row & 1:
                relation.add((worlds[i], worlds[j]))
            row >>= 1
            j += 1
    return KripkeFrame(frame.worlds, frozenset(relation))


def _properties(frame: KripkeFrame):
    worlds, _, succ = _frame_bits(frame)
    n = len(worlds)
    reflexive = all(succ[i] >> i & 1 for i in range(n))
    irreflexive = all(not (succ[i] >> i & 1) for i in range(n))
    symmetric = True
    antisymmetric = True
    for i in range(n):
        for j in range(n):
            forward = succ[i] >> j & 1
            backward = succ[j] >> i & 1
            if forward and not backward:
                symmetric = False
            if i != j and forward and backward:
                antisymmetric = False
    transitive = True
    for i in range(n):
        row = succ[i]
        j = 0
        probe = row
        while probe:
            if probe & 1 and succ[j] & ~row:
                transitive = False
            probe >>= 1
            j += 1
    return reflexive, irreflexive, symmetric, antisymmetric, transitive


def frame_class_check(frame: KripkeFrame, cls: str) -> bool:
    """Finite-frame class membership: GL is transitive+irreflexive, Grz is a
    finite partial order, KTB is reflexive+symmetric."""
    reflexive, irreflexive, symmetric, antisymmetric, transitive = _properties(frame)
    if cls == "GL":
        return transitive and irreflexive
    if cls == "Grz":
        return reflexive and transitive and antisymmetric
    if cls == "KTB":
        return reflexive and symmetric
    raise ValueError(f"frame class must be GL, Grz or KTB, got {cls!r}")


DEFAULT_VALUATION_BUDGET = 20


def frame_validates(frame: KripkeFrame, f: ModalFormula, budget: int = DEFAULT_VALUATION_BUDGET) -> bool:
    """Frame validity: ``f`` holds at every world under every valuation.

    Variable-free formulas need a single bitmask evaluation.  Otherwise all
    2^(|worlds| * v) valuations are searched; the search refuses (raises
    ValuationBudgetError) when |worlds| * v exceeds ``budget`` bits, so it
    never silently guesses.
    """
    g = expand_sugar(f)
    variables = sorted(modal_vars(g))
    worlds, _, succ = _frame_bits(frame)
    n = len(worlds)
    full = (1 << n) - 1
    if not variables:
        return _eval_masks(g, {}, succ, n) == full
    bits = n * len(variables)
    if bits > budget:
        raise ValuationBudgetError(
            f"{len(variables)} variables over {n} worlds need {bits} search bits, budget is {budget}"
        )
    for combo in range(1 << bits):
        var_masks = {}
        for vi, var in enumerate(variables):
            var_masks[var] = (combo >> (vi * n)) & full
        if _eval_masks(g, var_masks, succ, n) != full:
            return False
    return True


def wgrz_axiom() -> ModalFormula:
    """The weak Grzegorczyk axiom box+([](p -> [] p) -> p) -> p."""
    p = MVar(1)
    inner = MImp(MBox(MImp(p, MBox(p))), p)
    return MImp(MBoxPlus(inner), p)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _model_payload(model: KripkeModel) -> dict:
    ids = sorted(world_id_str(w) for w in model.frame.worlds)
    relation = sorted([world_id_str(u), world_id_str(v)] for u, v in model.frame.relation)
    valuation = {
        f"p{index}": sorted(world_id_str(w) for w in model.valuation[index])
        for index in sorted(model.valuation)
    }
    return {
        "worlds": ids,
        "relation": relation,
        "valuation": valuation,
        "root": world_id_str(model.root),
    }


def model_to_json(model: KripkeModel) -> str:
    return json.dumps(_model_payload(model), indent=2) + "\n"


def model_from_json(text: str) -> KripkeModel:
    doc = json.loads(text)
    worlds = frozenset(world_id_from_str(s) for s in doc["worlds"])
    relation = frozenset(
        (world_id_from_str(u), world_id_from_str(v)) for u, v in doc["relation"]
    )
    valuation = {}
    for key, members in doc.get("valuation", {}).items():
        if not re.fullmatch(r"p\d+", key):
            raise ValueError(f"valuation keys look like p<index>, got {key!r}")
        valuation[int(key[1:])] = frozenset(world_id_from_str(s) for s in members)
    frame = KripkeFrame(worlds, relation)
    return KripkeModel(frame, valuation, world_id_from_str(doc["root"]))


def frame_to_json(frame: KripkeFrame) -> str:
    ids = sorted(world_id_str(w) for w in frame.worlds)
    relation = sorted([world_id_str(u), world_id_str(v)] for u, v in frame.relation)
    return json.dumps({"worlds": ids, "relation": relation}, indent=2) + "\n"


def frame_from_json(text: str) -> KripkeFrame:
    doc = json.loads(text)
    worlds = frozenset(world_id_from_str(s) for s in doc["worlds"])
    relation = frozenset(
        (world_id_from_str(u), world_id_from_str(v)) for u, v in doc["relation"]
    )
    return KripkeFrame(worlds, relation)


def frame_to_dot(frame: KripkeFrame) -> str:
    lines = ["digraph frame {"]
    for wid in sorted(world_id_str(w) for w in frame.worlds):
        lines.append(f'  "{wid}";')
    for u, v in sorted((world_id_str(a), world_id_str(b)) for a, b in frame.relation):
        lines.append(f'  "{u}" -> "{v}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
