"""Abstract syntax, parsing, printing, substitution and size metrics.

Two term languages live here: quantified Boolean formulas (Q* classes) and
modal formulas (M* classes).  All nodes are hash-consed: constructing a node
twice with equal arguments yields the same object, so structural equality is
object identity and formulas can be used as dictionary keys at O(1) cost.
Nodes are immutable after construction and safe to share across threads.

The modal language carries four kinds of sugar mirroring common shorthands:
``box+`` (reflexive box), ``box<=n`` (all depths 0..n), ``box^n`` and ``dia^n``
(iterated modalities).  ``expand_sugar`` rewrites them into the core
connectives; the parser expands sugar tokens eagerly, while programmatically
built formulas may keep sugar nodes so that dumps stay close to their
blackboard shape.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping

__all__ = [
    "Formula",
    "QbfFormula",
    "QVar",
    "QFalse",
    "QAnd",
    "QOr",
    "QImp",
    "QForall",
    "QExists",
    "ModalFormula",
    "MVar",
    "MFalse",
    "MTrue",
    "MNot",
    "MAnd",
    "MOr",
    "MImp",
    "MBox",
    "MDia",
    "MBoxPlus",
    "MBoxLe",
    "MBoxPow",
    "MDiaPow",
    "Substitution",
    "FormulaSyntaxError",
    "parse_qbf",
    "parse_modal",
    "render",
    "substitute",
    "expand_sugar",
    "formula_size",
    "qbf_size",
    "is_constant",
    "modal_vars",
    "modal_depth",
    "conj",
    "neg",
    "qneg",
]


# ---------------------------------------------------------------------------
# Node classes (hash-consed)
# ---------------------------------------------------------------------------

_POOL: dict = {}


def _make(cls, key, names, values):
    node = _POOL.get(key)
    if node is None:
        node = object.__new__(cls)
        for name, value in zip(names, values):
            setattr(node, name, value)
        # setdefault keeps one canonical node under concurrent construction
        node = _POOL.setdefault(key, node)
    return node


class Formula:
    __slots__ = ()

    def __repr__(self):
        return f"{type(self).__name__}({render(self)!r})"


class QbfFormula(Formula):
    """Quantified Boolean formula node."""

    __slots__ = ()


class ModalFormula(Formula):
    """Modal formula node (possibly containing sugar)."""

    __slots__ = ()


class QVar(QbfFormula):
    __slots__ = ("index",)

    def __new__(cls, index: int):
        if not isinstance(index, int) or index < 1:
            raise ValueError(f"variable index must be a positive integer, got {index!r}")
        return _make(cls, (cls, index), ("index",), (index,))


class QFalse(QbfFormula):
    __slots__ = ()

    def __new__(cls):
        return _make(cls, (cls,), (), ())


class QAnd(QbfFormula):
    __slots__ = ("left", "right")

    def __new__(cls, left: QbfFormula, right: QbfFormula):
        return _make(cls, (cls, left, right), ("left", "right"), (left, right))


class QOr(QbfFormula):
    __slots__ = ("left", "right")

    def __new__(cls, left: QbfFormula, right: QbfFormula):
        return _make(cls, (cls, left, right), ("left", "right"), (left, right))


class QImp(QbfFormula):
    __slots__ = ("left", "right")

    def __new__(cls, left: QbfFormula, right: QbfFormula):
        return _make(cls, (cls, left, right), ("left", "right"), (left, right))


class QForall(QbfFormula):
    __slots__ = ("index", "body")

    def __new__(cls, index: int, body: QbfFormula):
        if not isinstance(index, int) or index < 1:
            raise ValueError(f"variable index must be a positive integer, got {index!r}")
        return _make(cls, (cls, index, body), ("index", "body"), (index, body))


class QExists(QbfFormula):
    __slots__ = ("index", "body")

    def __new__(cls, index: int, body: QbfFormula):
        if not isinstance(index, int) or index < 1:
            raise ValueError(f"variable index must be a positive integer, got {index!r}")
        return _make(cls, (cls, index, body), ("index", "body"), (index, body))


class MVar(ModalFormula):
    __slots__ = ("index",)

    def __new__(cls, index: int):
        if not isinstance(index, int) or index < 1:
            raise ValueError(f"variable index must be a positive integer, got {index!r}")
        return _make(cls, (cls, index), ("index",), (index,))


class MFalse(ModalFormula):
    __slots__ = ()

    def __new__(cls):
        return _make(cls, (cls,), (), ())


class MTrue(ModalFormula):
    __slots__ = ()

    def __new__(cls):
        return _make(cls, (cls,), (), ())


class MNot(ModalFormula):
    __slots__ = ("body",)

    def __new__(cls, body: ModalFormula):
        return _make(cls, (cls, body), ("body",), (body,))


class MAnd(ModalFormula):
    """N-ary conjunction; the item tuple is non-empty."""

    __slots__ = ("items",)

    def __new__(cls, items: Iterable[ModalFormula]):
        items = tuple(items)
        if not items:
            raise ValueError("n-ary conjunction needs at least one conjunct")
        return _make(cls, (cls, items), ("items",), (items,))


class MOr(ModalFormula):
    __slots__ = ("left", "right")

    def __new__(cls, left: ModalFormula, right: ModalFormula):
        return _make(cls, (cls, left, right), ("left", "right"), (left, right))


class MImp(ModalFormula):
    __slots__ = ("left", "right")

    def __new__(cls, left: ModalFormula, right: ModalFormula):
        return _make(cls, (cls, left, right), ("left", "right"), (left, right))


class MBox(ModalFormula):
    __slots__ = ("body",)

    def __new__(cls, body: ModalFormula):
        return _make(cls, (cls, body), ("body",), (body,))


class MDia(ModalFormula):
    __slots__ = ("body",)

    def __new__(cls, body: ModalFormula):
        return _make(cls, (cls, body), ("body",), (body,))


class MBoxPlus(ModalFormula):
    """Sugar: box+ f stands for f & [] f."""

    __slots__ = ("body",)

    def __new__(cls, body: ModalFormula):
        return _make(cls, (cls, body), ("body",), (body,))


class MBoxLe(ModalFormula):
    """Sugar: box<=n f stands for the conjunction of box^i f for i = 0..n."""

    __slots__ = ("bound", "body")

    def __new__(cls, bound: int, body: ModalFormula):
        if not isinstance(bound, int) or bound < 0:
            raise ValueError(f"box<= bound must be a non-negative integer, got {bound!r}")
        return _make(cls, (cls, bound, body), ("bound", "body"), (bound, body))


class MBoxPow(ModalFormula):
    """Sugar: box^n f, n nested boxes."""

    __slots__ = ("power", "body")

    def __new__(cls, power: int, body: ModalFormula):
        if not isinstance(power, int) or power < 0:
            raise ValueError(f"box^ power must be a non-negative integer, got {power!r}")
        return _make(cls, (cls, power, body), ("power", "body"), (power, body))


class MDiaPow(ModalFormula):
    """Sugar: dia^n f, n nested diamonds."""

    __slots__ = ("power", "body")

    def __new__(cls, power: int, body: ModalFormula):
        if not isinstance(power, int) or power < 0:
            raise ValueError(f"dia^ power must be a non-negative integer, got {power!r}")
        return _make(cls, (cls, power, body), ("power", "body"), (power, body))


#: A substitution maps variable indices to modal formulas; indices outside
#: the mapping are left untouched.
Substitution = Mapping[int, ModalFormula]


def conj(items: Iterable[ModalFormula]) -> ModalFormula:
    """Big-wedge helper: [] gives true, a singleton gives the formula itself."""
    items = tuple(items)
    if not items:
        return MTrue()
    if len(items) == 1:
        return items[0]
    return MAnd(items)


def neg(f: ModalFormula) -> ModalFormula:
    return MNot(f)


def qneg(f: QbfFormula) -> QbfFormula:
    """QBF negation sugar: the language has no ~ node, so ~f is f -> false."""
    return QImp(f, QFalse())


# ---------------------------------------------------------------------------
# Tokenizer / parsers
# ---------------------------------------------------------------------------


class FormulaSyntaxError(ValueError):
    """Parse failure; ``offset`` is the byte offset into the input text."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


# Sugar expands eagerly during parsing, so an absurd bound in the input would
# materialize an absurd formula; reject it at the parser instead.
MAX_PARSED_SUGAR_BOUND = 10_000


_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<boxle>box<=\d+)
    | (?P<boxpow>box\^\d+)
    | (?P<diapow>dia\^\d+)
    | (?P<boxplus>box\+)
    | (?P<box>\[\])
    | (?P<dia><>)
    | (?P<arrow>->)
    | (?P<var>p\d+)
    | (?P<forall>A(?![A-Za-z0-9_]))
    | (?P<exists>E(?![A-Za-z0-9_]))
    | (?P<false>false(?![A-Za-z0-9_]))
    | (?P<true>true(?![A-Za-z0-9_]))
    | (?P<amp>&)
    | (?P<bar>\|)
    | (?P<tilde>~)
    | (?P<lpar>\()
    | (?P<rpar>\))
    | (?P<dot>\.)
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unknown token {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser shared by the QBF and modal front ends."""

    def __init__(self, text: str, modal: bool):
        self.text = text
        self.modal = modal
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str):
        kind, text, offset = self.peek()
        if kind == "eof":
            raise FormulaSyntaxError(f"{message}, found end of input", offset)
        raise FormulaSyntaxError(f"{message}, found {text!r}", offset)

    def parse(self) -> Formula:
        f = self.formula()
        if self.peek()[0] != "eof":
            self.error("expected end of input")
        return f

    def formula(self) -> Formula:
        kind, _, _ = self.peek()
        if not self.modal and kind in ("forall", "exists"):
            self.take()
            vkind, vtext, _ = self.peek()
            if vkind != "var":
                self.error("expected a variable after quantifier")
            self.take()
            if self.peek()[0] != "dot":
                self.error("expected '.' after quantified variable")
            self.take()
            body = self.formula()
            index = int(vtext[1:])
            return QForall(index, body) if kind == "forall" else QExists(index, body)
        return self.implies()

    def implies(self) -> Formula:
        left = self.disjunction()
        if self.peek()[0] == "arrow":
            self.take()
            right = self.implies()
            return MImp(left, right) if self.modal else QImp(left, right)
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek()[0] == "bar":
            self.take()
            g = self.conjunction()
            f = MOr(f, g) if self.modal else QOr(f, g)
        return f

    def conjunction(self) -> Formula:
        first = self.unary()
        if self.peek()[0] != "amp":
            return first
        if self.modal:
            items = [first]
            while self.peek()[0] == "amp":
                self.take()
                items.append(self.unary())
            return MAnd(items)
        f = first
        while self.peek()[0] == "amp":
            self.take()
            f = QAnd(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, text, _ = self.peek()
        if kind == "tilde":
            self.take()
            body = self.unary()
            return MNot(body) if self.modal else qneg(body)
        if self.modal:
            if kind == "box":
                self.take()
                return MBox(self.unary())
            if kind == "dia":
                self.take()
                return MDia(self.unary())
            if kind == "boxplus":
                self.take()
                return expand_sugar(MBoxPlus(self.unary()))
            if kind in ("boxle", "boxpow", "diapow"):
                _, _, offset = self.take()
                bound = int(text[5:] if kind == "boxle" else text[4:])
                if bound > MAX_PARSED_SUGAR_BOUND:
                    raise FormulaSyntaxError(
                        f"sugar bound {bound} exceeds the parser limit"
                        f" of {MAX_PARSED_SUGAR_BOUND}",
                        offset,
                    )
                node = {"boxle": MBoxLe, "boxpow": MBoxPow, "diapow": MDiaPow}[kind]
                return expand_sugar(node(bound, self.unary()))
        return self.atom()

    def atom(self) -> Formula:
        kind, text, offset = self.peek()
        if kind == "var":
            self.take()
            index = int(text[1:])
            if index < 1:
                raise FormulaSyntaxError("variable indices start at 1", offset)
            return MVar(index) if self.modal else QVar(index)
        if kind == "false":
            self.take()
            return MFalse() if self.modal else QFalse()
        if kind == "true" and self.modal:
            self.take()
            return MTrue()
        if kind == "lpar":
            self.take()
            f = self.formula()
            if self.peek()[0] != "rpar":
                self.error("unbalanced parentheses: expected ')'")
            self.take()
            return f
        if kind == "rpar":
            self.error("unbalanced parentheses: unmatched ')'")
        self.error("expected a formula")


def parse_qbf(text: str) -> QbfFormula:
    """Parse a quantified Boolean formula. ``~f`` is sugar for ``f -> false``."""
    return _Parser(text, modal=False).parse()


def parse_modal(text: str) -> ModalFormula:
    """Parse a modal formula; sugar tokens are expanded into core connectives."""
    return _Parser(text, modal=True).parse()


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

# Precedence levels: quantifier body 0 (maximal scope), -> 1, | 2, & 3,
# prefix operators 4, atoms 5.  N-ary conjunctions always print their own
# parentheses so flat lists survive the round trip.
_PREC_IMP = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_UNARY = 4
_PREC_ATOM = 5


def render(f: Formula) -> str:
    """Pretty-print a formula; ``parse(render(f))`` restores the same tree,
    except that sugar nodes reparse to their expansion."""
    return _render(f, 0)


def _wrap(text: str, prec: int, needed: int) -> str:
    return f"({text})" if prec < needed else text


def _render(f: Formula, needed: int) -> str:
    if isinstance(f, (QVar, MVar)):
        return f"p{f.index}"
    if isinstance(f, (QFalse, MFalse)):
        return "false"
    if isinstance(f, MTrue):
        return "true"
    if isinstance(f, (QForall, QExists)):
        letter = "A" if isinstance(f, QForall) else "E"
        return _wrap(f"{letter} p{f.index} . {_render(f.body, 0)}", 0, needed)
    if isinstance(f, (QImp, MImp)):
        text = f"{_render(f.left, _PREC_IMP + 1)} -> {_render(f.right, _PREC_IMP)}"
        return _wrap(text, _PREC_IMP, needed)
    if isinstance(f, (QOr, MOr)):
        text = f"{_render(f.left, _PREC_OR)} | {_render(f.right, _PREC_OR + 1)}"
        return _wrap(text, _PREC_OR, needed)
    if isinstance(f, QAnd):
        text = f"{_render(f.left, _PREC_AND)} & {_render(f.right, _PREC_AND + 1)}"
        return _wrap(text, _PREC_AND, needed)
    if isinstance(f, MAnd):
        return "(" + " & ".join(_render(g, _PREC_AND + 1) for g in f.items) + ")"
    if isinstance(f, MNot):
        return _wrap(f"~{_render(f.body, _PREC_UNARY)}", _PREC_UNARY, needed)
    if isinstance(f, MBox):
        return _wrap(f"[] {_render(f.body, _PREC_UNARY)}", _PREC_UNARY, needed)
    if isinstance(f, MDia):
        return _wrap(f"<> {_render(f.body, _PREC_UNARY)}", _PREC_UNARY, needed)
    if isinstance(f, MBoxPlus):
        return _wrap(f"box+ {_render(f.body, _PREC_UNARY)}", _PREC_UNARY, needed)
    if isinstance(f, MBoxLe):
        return _wrap(f"box<={f.bound} {_render(f.body, _PREC_UNARY)}", _PREC_UNARY, needed)
    if isinstance(f, MBoxPow):
        return _wrap(f"box^{f.power} {_render(f.body, _PREC_UNARY)}", _PREC_UNARY, needed)
    if isinstance(f, MDiaPow):
        return _wrap(f"dia^{f.power} {_render(f.body, _PREC_UNARY)}", _PREC_UNARY, needed)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Substitution, sugar expansion, sizes
# ---------------------------------------------------------------------------


def substitute(f: ModalFormula, mapping: Substitution) -> ModalFormula:
    """Replace every variable with index in ``mapping`` by its image.

    Modal formulas have no binders, so the substitution is unconditional;
    thanks to hash-consing, untouched subtrees come back as the same objects.
    """
    if not mapping:
        return f
    return _substitute(f, mapping, {})


def _substitute(f, mapping, memo):
    hit = memo.get(f)
    if hit is not None:
        return hit
    if isinstance(f, MVar):
        result = mapping.get(f.index, f)
    elif isinstance(f, (MFalse, MTrue)):
        result = f
    elif isinstance(f, MNot):
        result = MNot(_substitute(f.body, mapping, memo))
    elif isinstance(f, MAnd):
        result = MAnd(tuple(_substitute(g, mapping, memo) for g in f.items))
    elif isinstance(f, MOr):
        result = MOr(_substitute(f.left, mapping, memo), _substitute(f.right, mapping, memo))
    elif isinstance(f, MImp):
        result = MImp(_substitute(f.left, mapping, memo), _substitute(f.right, mapping, memo))
    elif isinstance(f, MBox):
        result = MBox(_substitute(f.body, mapping, memo))
    elif isinstance(f, MDia):
        result = MDia(_substitute(f.body, mapping, memo))
    elif isinstance(f, MBoxPlus):
        result = MBoxPlus(_substitute(f.body, mapping, memo))
    elif isinstance(f, MBoxLe):
        result = MBoxLe(f.bound, _substitute(f.body, mapping, memo))
    elif isinstance(f, MBoxPow):
        result = MBoxPow(f.power, _substitute(f.body, mapping, memo))
    elif isinstance(f, MDiaPow):
        result = MDiaPow(f.power, _substitute(f.body, mapping, memo))
    else:
        raise TypeError(f"not a modal formula: {f!r}")
    memo[f] = result
    return result


_EXPAND_MEMO: dict = {}


def expand_sugar(f: ModalFormula) -> ModalFormula:
    """Rewrite box+/box<=n/box^n/dia^n into the core connectives."""
    hit = _EXPAND_MEMO.get(f)
    if hit is not None:
        return hit
    if isinstance(f, (MVar, MFalse, MTrue)):
        result = f
    elif isinstance(f, MNot):
        result = MNot(expand_sugar(f.body))
    elif isinstance(f, MAnd):
        result = MAnd(tuple(expand_sugar(g) for g in f.items))
    elif isinstance(f, MOr):
        result = MOr(expand_sugar(f.left), expand_sugar(f.right))
    elif isinstance(f, MImp):
        result = MImp(expand_sugar(f.left), expand_sugar(f.right))
    elif isinstance(f, MBox):
        result = MBox(expand_sugar(f.body))
    elif isinstance(f, MDia):
        result = MDia(expand_sugar(f.body))
    elif isinstance(f, MBoxPlus):
        body = expand_sugar(f.body)
        result = MAnd((body, MBox(body)))
    elif isinstance(f, MBoxLe):
        body = expand_sugar(f.body)
        if f.bound == 0:
            result = body
        else:
            layers = [body]
            for _ in range(f.bound):
                layers.append(MBox(layers[-1]))
            result = MAnd(tuple(layers))
    elif isinstance(f, MBoxPow):
        result = expand_sugar(f.body)
        for _ in range(f.power):
            result = MBox(result)
    elif isinstance(f, MDiaPow):
        result = expand_sugar(f.body)
        for _ in range(f.power):
            result = MDia(result)
    else:
        raise TypeError(f"not a modal formula: {f!r}")
    _EXPAND_MEMO[f] = result
    return result


_SIZE_MEMO: dict = {}


def formula_size(f: ModalFormula) -> int:
    """Symbol count of the sugar-expanded formula: 1 per leaf, 1 per unary or
    binary connective, arity-1 per n-ary conjunction."""
    return _size(expand_sugar(f))


def _size(f) -> int:
    hit = _SIZE_MEMO.get(f)
    if hit is not None:
        return hit
    if isinstance(f, (MVar, MFalse, MTrue)):
        result = 1
    elif isinstance(f, (MNot, MBox, MDia)):
        result = 1 + _size(f.body)
    elif isinstance(f, (MOr, MImp)):
        result = 1 + _size(f.left) + _size(f.right)
    elif isinstance(f, MAnd):
        result = len(f.items) - 1 + sum(_size(g) for g in f.items)
    else:
        raise TypeError(f"unexpanded or non-modal node: {f!r}")
    _SIZE_MEMO[f] = result
    return result


def qbf_size(f: QbfFormula) -> int:
    """Symbol count of a QBF: 1 per leaf, 1 per connective or quantifier."""
    if isinstance(f, (QVar, QFalse)):
        return 1
    if isinstance(f, (QAnd, QOr, QImp)):
        return 1 + qbf_size(f.left) + qbf_size(f.right)
    if isinstance(f, (QForall, QExists)):
        return 1 + qbf_size(f.body)
    raise TypeError(f"not a QBF formula: {f!r}")


def is_constant(f: ModalFormula) -> bool:
    """True when the formula contains no variable node (variable-free)."""
    return not modal_vars(f)


_VARS_MEMO: dict = {}


def modal_vars(f: ModalFormula) -> frozenset[int]:
    """Indices of all variables occurring in the formula."""
    hit = _VARS_MEMO.get(f)
    if hit is not None:
        return hit
    if isinstance(f, MVar):
        result = frozenset((f.index,))
    elif isinstance(f, (MFalse, MTrue)):
        result = frozenset()
    elif isinstance(f, MAnd):
        result = frozenset().union(*(modal_vars(g) for g in f.items))
    elif isinstance(f, (MOr, MImp)):
        result = modal_vars(f.left) | modal_vars(f.right)
    elif isinstance(f, (MNot, MBox, MDia, MBoxPlus, MBoxLe, MBoxPow, MDiaPow)):
        result = modal_vars(f.body)
    else:
        raise TypeError(f"not a modal formula: {f!r}")
    _VARS_MEMO[f] = result
    return result


_DEPTH_MEMO: dict = {}


def modal_depth(f: ModalFormula) -> int:
    """Maximal nesting depth of [] and <> in the sugar-expanded formula."""
    return _depth(expand_sugar(f))


def _depth(f) -> int:
    hit = _DEPTH_MEMO.get(f)
    if hit is not None:
        return hit
    if isinstance(f, (MVar, MFalse, MTrue)):
        result = 0
    elif isinstance(f, MNot):
        result = _depth(f.body)
    elif isinstance(f, (MBox, MDia)):
        result = 1 + _depth(f.body)
    elif isinstance(f, MAnd):
        result = max(_depth(g) for g in f.items)
    elif isinstance(f, (MOr, MImp)):
        result = max(_depth(f.left), _depth(f.right))
    else:
        raise TypeError(f"unexpanded or non-modal node: {f!r}")
    _DEPTH_MEMO[f] = result
    return result
