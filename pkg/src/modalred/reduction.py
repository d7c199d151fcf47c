"""The reduction machinery: from closed prenex QBF to modal formulas.

``encode_star`` turns ``Q1 p1 ... Qn pn . matrix`` into a conjunction of six
modal conjuncts over the variables p_1..p_n and the level markers
q_0..q_{n+1} (written as p_{n+1}..p_{2n+2}).  Reading q_i as "at least i
quantifiers have been opened", the conjuncts say:

  (1) the root is at level exactly 0 and all p_i start out false;
  (2) levels are downward closed: q_i -> q_{i-1}, for i = 1..n+1;
  (3) from a level i-1 world, an existential quantifier can be opened:
      some successor sits at level exactly i;
  (4) a universal quantifier opens both ways: successors at level exactly i
      with p_i true and with p_i false;
  (5) once a variable's value is chosen it persists: at any q_i world, each
      p_j with j <= i keeps its value in all successors at level i+1 that are
      still below the top marker (the ~q_{n+1} guard is what later keeps the
      constraint away from gadget copies);
  (6) at level exactly n the matrix holds.

``alpha(k)`` is the variable-free ladder formula that is refutable at a world
exactly when a fresh copy of the k-rung gadget hangs below it; substituting
alpha(1)..alpha(2n+2) for p_1..p_{2n+2} (``encode_alpha``) removes all
variables while preserving satisfiability.  ``quantifier_tree`` and
``extend_model`` build the witness models for the two directions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import kripke
from .kripke import BaseWorld, GadgetWorld, KripkeFrame, KripkeModel, close, model_check_all
from .qbf import evaluate, is_true_qbf, prenex_split
from .syntax import (
    MAnd,
    MBox,
    MBoxLe,
    MBoxPow,
    MDia,
    MFalse,
    MImp,
    MTrue,
    MVar,
    ModalFormula,
    MOr,
    QAnd,
    QbfFormula,
    QExists,
    QFalse,
    QForall,
    QImp,
    QOr,
    QVar,
    conj,
    neg,
    substitute,
)

__all__ = [
    "EncodingContext",
    "prepare_context",
    "encode_star",
    "alpha",
    "encode_alpha",
    "quantifier_tree",
    "frame_fm",
    "frame_fm_plus",
    "extend_model",
    "star_equivalence_violations",
]


@dataclass(frozen=True)
class EncodingContext:
    """Bookkeeping for one encoding: quantifier prefix and variable renaming.

    The level markers q_0..q_{n+1} are written as ordinary variables via
    q_i = p_{n+1+i}, so the encoded formula uses indices 1..2n+2 only.
    """

    n: int
    quantifiers: tuple[tuple[str, int], ...]
    matrix: QbfFormula

    @property
    def renaming(self) -> dict[int, int]:
        return {i: self.n + 1 + i for i in range(self.n + 2)}

    def q_index(self, i: int) -> int:
        if not 0 <= i <= self.n + 1:
            raise ValueError(f"q index out of range: {i}")
        return self.n + 1 + i

    @property
    def var_count(self) -> int:
        """Total variable count of the encoding, 2n+2."""
        return 2 * self.n + 2


def prepare_context(f: QbfFormula) -> EncodingContext:
    """Validate the canonical input shape: quantifier i binds p_i."""
    prefix, matrix = prenex_split(f)
    if _has_quantifier(matrix):
        raise ValueError("encoding input must be prenex")
    if not prefix:
        raise ValueError("encoding input needs at least one quantifier")
    for position, (_, index) in enumerate(prefix, start=1):
        if index != position:
            raise ValueError(
                f"quantifier {position} must bind p{position}, binds p{index}"
            )
    n = len(prefix)
    bad = _matrix_vars(matrix) - set(range(1, n + 1))
    if bad:
        names = ", ".join(f"p{i}" for i in sorted(bad))
        raise ValueError(f"matrix variables must lie in p1..p{n}; found {names}")
    return EncodingContext(n=n, quantifiers=tuple(prefix), matrix=matrix)


def _has_quantifier(f: QbfFormula) -> bool:
    if isinstance(f, (QForall, QExists)):
        return True
    if isinstance(f, (QAnd, QOr, QImp)):
        return _has_quantifier(f.left) or _has_quantifier(f.right)
    return False


def _matrix_vars(f: QbfFormula) -> set[int]:
    if isinstance(f, QVar):
        return {f.index}
    if isinstance(f, QFalse):
        return set()
    if isinstance(f, (QAnd, QOr, QImp)):
        return _matrix_vars(f.left) | _matrix_vars(f.right)
    raise TypeError(f"matrix must be quantifier-free: {f!r}")


def _matrix_to_modal(f: QbfFormula) -> ModalFormula:
    if isinstance(f, QVar):
        return MVar(f.index)
    if isinstance(f, QFalse):
        return MFalse()
    if isinstance(f, QAnd):
        return MAnd((_matrix_to_modal(f.left), _matrix_to_modal(f.right)))
    if isinstance(f, QOr):
        return MOr(_matrix_to_modal(f.left), _matrix_to_modal(f.right))
    if isinstance(f, QImp):
        return MImp(_matrix_to_modal(f.left), _matrix_to_modal(f.right))
    raise TypeError(f"matrix must be quantifier-free: {f!r}")


def encode_star(f: QbfFormula) -> tuple[ModalFormula, EncodingContext]:
    """The six-conjunct modal encoding of a closed prenex QBF.

    Depth sugar is kept as box<= / box^ nodes so dumps show the intended
    shape; expand_sugar flattens it for checking and size counting.
    """
    ctx = prepare_context(f)
    n = ctx.n

    def q(i: int) -> ModalFormula:
        return MVar(ctx.q_index(i))

    def p(i: int) -> ModalFormula:
        return MVar(i)

    def at_level(i: int) -> ModalFormula:
        return MAnd((q(i), neg(q(i + 1))))

    c1 = MAnd((q(0), neg(q(1))) + tuple(neg(p(i)) for i in range(1, n + 1)))
    c2 = MBoxLe(n, conj([MImp(q(i), q(i - 1)) for i in range(1, n + 2)]))
    c3 = MBoxLe(
        n - 1,
        conj(
            [
                MImp(at_level(i - 1), MDia(at_level(i)))
                for (kind, i) in ctx.quantifiers
                if kind == "E"
            ]
        ),
    )
    c4 = MBoxLe(
        n - 1,
        conj(
            [
                MImp(
                    at_level(i - 1),
                    MAnd(
                        (
                            MDia(MAnd((q(i), neg(q(i + 1)), p(i)))),
                            MDia(MAnd((q(i), neg(q(i + 1)), neg(p(i))))),
                        )
                    ),
                )
                for (kind, i) in ctx.quantifiers
                if kind == "A"
            ]
        ),
    )
    def guard(i: int) -> ModalFormula:
        # a successor at level i+1 that is still a base-layer world
        return MAnd((q(i + 1), neg(q(n + 1))))

    c5 = MBoxLe(
        n - 1,
        conj(
            [
                MImp(
                    q(i),
                    MAnd(
                        (
                            conj(
                                [
                                    MImp(p(j), MBox(MImp(guard(i), p(j))))
                                    for j in range(1, i + 1)
                                ]
                            ),
                            conj(
                                [
                                    MImp(neg(p(j)), MBox(MImp(guard(i), neg(p(j)))))
                                    for j in range(1, i + 1)
                                ]
                            ),
                        )
                    ),
                )
                for i in range(1, n)
            ]
        ),
    )
    c6 = MBoxPow(n, MImp(at_level(n), _matrix_to_modal(ctx.matrix)))
    return MAnd((c1, c2, c3, c4, c5, c6)), ctx


def alpha(k: int) -> ModalFormula:
    """The variable-free ladder formula
    [](<>^k []false & ~<>^{k+1} []false -> [](<>true -> <>[]false))."""
    if not isinstance(k, int) or k < 1:
        raise ValueError(f"alpha index must be a positive integer, got {k!r}")
    blind = MBox(MFalse())

    def dias(count: int, body: ModalFormula) -> ModalFormula:
        for _ in range(count):
            body = MDia(body)
        return body

    rung = MAnd((dias(k, blind), neg(dias(k + 1, blind))))
    escape = MBox(MImp(MDia(MTrue()), MDia(blind)))
    return MBox(MImp(rung, escape))


def encode_alpha(f: QbfFormula) -> ModalFormula:
    """Variable-free encoding: substitute alpha(i) for p_i in encode_star."""
    star, ctx = encode_star(f)
    mapping = {i: alpha(i) for i in range(1, ctx.var_count + 1)}
    return substitute(star, mapping)


# ---------------------------------------------------------------------------
# Witness models
# ---------------------------------------------------------------------------


def quantifier_tree(f: QbfFormula) -> KripkeModel:
    """Witness tree for a true formula: branch on A, choose on E.

    Worlds are classical assignments; each level resolves one quantifier.
    The valuation covers both the assignment variables (p_k true where the
    assignment holds it) and the renamed level markers (q_i true at levels
    >= i), so the result model-checks encode_star at its root.
    """
    ctx = prepare_context(f)
    if not is_true_qbf(f):
        raise ValueError("quantifier tree exists only for true formulas")
    n = ctx.n
    # residual[k] is the suffix Q_{k+1} p_{k+1} ... Q_n p_n matrix
    residual: list[QbfFormula] = [ctx.matrix] * (n + 1)
    for k in range(n - 1, -1, -1):
        kind, index = ctx.quantifiers[k]
        body = residual[k + 1]
        residual[k] = QForall(index, body) if kind == "A" else QExists(index, body)

    worlds: list[BaseWorld] = []
    edges: list[tuple[BaseWorld, BaseWorld]] = []
    counter = itertools.count()

    def build(level: int, assignment: frozenset[int]) -> BaseWorld:
        w = BaseWorld(level, assignment, next(counter))
        worlds.append(w)
        if level == n:
            return w
        kind, index = ctx.quantifiers[level]
        without = assignment - {index}
        with_var = assignment | {index}
        if kind == "A":
            children = [without, with_var]
        else:
            # prefer the child without the variable when both work
            children = [
                a
                for a in (without, with_var)
                if evaluate(a, residual[level + 1])
            ][:1]
        for child_assignment in children:
            child = build(level + 1, child_assignment)
            edges.append((w, child))
        return w

    root = build(0, frozenset())
    frame = KripkeFrame(frozenset(worlds), frozenset(edges))
    valuation: dict[int, frozenset[BaseWorld]] = {}
    for k in range(1, n + 1):
        valuation[k] = frozenset(w for w in worlds if k in w.assignment)
    for i in range(n + 2):
        valuation[ctx.q_index(i)] = frozenset(w for w in worlds if w.level >= i)
    return KripkeModel(frame, valuation, root)


def _gadget_edges(m: int, host: BaseWorld | None):
    """Worlds and raw (pre-closure) edges of one F_m copy."""
    a = [GadgetWorld(m, f"a{i}", host) for i in range(m + 1)]
    b = GadgetWorld(m, "b", host)
    worlds = [b, *a]
    edges = [(a[0], b), (b, b)]
    edges += [(a[i], a[i + 1]) for i in range(m)]
    return worlds, edges, a[0]


def frame_fm(m: int) -> KripkeFrame:
    """The gadget frame F_m: an irreflexive ladder a_0 -> ... -> a_m with a
    reflexive side world b below a_0, transitively closed."""
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"gadget index must be a positive integer, got {m!r}")
    worlds, edges, _ = _gadget_edges(m, None)
    return close(KripkeFrame(frozenset(worlds), frozenset(edges)), "transitive")


def frame_fm_plus(m: int) -> KripkeFrame:
    """F_m plus the reflexive entry world c_m with c_m -> a_0."""
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"gadget index must be a positive integer, got {m!r}")
    worlds, edges, a0 = _gadget_edges(m, None)
    c = GadgetWorld(m, "c", None)
    worlds = [*worlds, c]
    edges = [*edges, (c, c), (c, a0)]
    return close(KripkeFrame(frozenset(worlds), frozenset(edges)), "transitive")


def extend_model(base: KripkeModel, ctx: EncodingContext) -> KripkeModel:
    """Attach an F_m copy below every base world where p_m is false, for every
    m = 1..2n+2, and transitively close the whole relation.

    The base valuation must be upward persistent (true variables stay true
    along edges); that is what confines each alpha_m refutation to exactly
    the base worlds refuting p_m.
    """
    for u, v in base.frame.relation:
        for index, members in base.valuation.items():
            if u in members and v not in members:
                raise ValueError(
                    f"valuation is not upward persistent: p{index} holds at"
                    f" {kripke.world_id_str(u)} but not at its successor"
                    f" {kripke.world_id_str(v)}"
                )
    base_worlds = sorted(base.frame.worlds, key=kripke.world_id_str)
    if not all(isinstance(w, BaseWorld) for w in base_worlds):
        raise ValueError("extend_model expects a quantifier-tree model")
    worlds: list = list(base_worlds)
    edges: list = list(base.frame.relation)
    for m in range(1, ctx.var_count + 1):
        holders = base.valuation.get(m, frozenset())
        for w in base_worlds:
            if w in holders:
                continue
            copy_worlds, copy_edges, a0 = _gadget_edges(m, w)
            worlds.extend(copy_worlds)
            edges.extend(copy_edges)
            edges.append((w, a0))
    frame = close(KripkeFrame(frozenset(worlds), frozenset(edges)), "transitive")
    return KripkeModel(frame, dict(base.valuation), base.root)


def star_equivalence_violations(
    base: KripkeModel, extended: KripkeModel, ctx: EncodingContext
) -> list[tuple[kripke.WorldId, int]]:
    """Check the key equivalence of the extension at every world.

    alpha_m must be refuted at a world of the extended model exactly when
    that world is a base world refuting p_m.  Returns all (world, m) pairs
    violating this, for m = 1..2n+2; empty means the equivalence holds.
    """
    violations = []
    base_worlds = base.frame.worlds
    for m in range(1, ctx.var_count + 1):
        satisfied = model_check_all(extended, alpha(m))
        holders = base.valuation.get(m, frozenset())
        for w in sorted(extended.frame.worlds, key=kripke.world_id_str):
            expected_refuted = w in base_worlds and w not in holders
            if (w not in satisfied) != expected_refuted:
                violations.append((w, m))
    return violations
