"""Shared strategies and helpers for the test suite."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from modalred.kripke import BaseWorld, KripkeFrame, KripkeModel
from modalred.syntax import (
    MAnd,
    MBox,
    MBoxLe,
    MBoxPlus,
    MBoxPow,
    MDia,
    MDiaPow,
    MFalse,
    MImp,
    MNot,
    MOr,
    MTrue,
    MVar,
    QAnd,
    QExists,
    QFalse,
    QForall,
    QImp,
    QOr,
    QVar,
)


def qbf_leaves():
    return st.one_of(
        st.builds(QVar, st.integers(min_value=1, max_value=5)),
        st.just(QFalse()),
    )


def qbf_formulas(max_leaves: int = 20):
    return st.recursive(
        qbf_leaves(),
        lambda sub: st.one_of(
            st.builds(QAnd, sub, sub),
            st.builds(QOr, sub, sub),
            st.builds(QImp, sub, sub),
            st.builds(QForall, st.integers(min_value=1, max_value=5), sub),
            st.builds(QExists, st.integers(min_value=1, max_value=5), sub),
        ),
        max_leaves=max_leaves,
    )


def modal_leaves():
    return st.one_of(
        st.builds(MVar, st.integers(min_value=1, max_value=5)),
        st.just(MFalse()),
        st.just(MTrue()),
    )


def modal_formulas(max_leaves: int = 20):
    """Core modal formulas (no sugar); n-ary conjunctions have >= 2 items."""
    return st.recursive(
        modal_leaves(),
        lambda sub: st.one_of(
            st.builds(MNot, sub),
            st.builds(MBox, sub),
            st.builds(MDia, sub),
            st.builds(MOr, sub, sub),
            st.builds(MImp, sub, sub),
            st.builds(lambda items: MAnd(tuple(items)), st.lists(sub, min_size=2, max_size=4)),
        ),
        max_leaves=max_leaves,
    )


def sugared_modal_formulas(max_leaves: int = 12):
    return st.recursive(
        modal_leaves(),
        lambda sub: st.one_of(
            st.builds(MNot, sub),
            st.builds(MBox, sub),
            st.builds(MDia, sub),
            st.builds(MOr, sub, sub),
            st.builds(MImp, sub, sub),
            st.builds(lambda items: MAnd(tuple(items)), st.lists(sub, min_size=2, max_size=3)),
            st.builds(MBoxPlus, sub),
            st.builds(MBoxLe, st.integers(min_value=0, max_value=3), sub),
            st.builds(MBoxPow, st.integers(min_value=0, max_value=3), sub),
            st.builds(MDiaPow, st.integers(min_value=0, max_value=3), sub),
        ),
        max_leaves=max_leaves,
    )


def make_random_model(rng: random.Random, world_count: int, var_count: int = 2) -> KripkeModel:
    worlds = [BaseWorld(0, frozenset(), i) for i in range(world_count)]
    relation = frozenset(
        (u, v) for u in worlds for v in worlds if rng.random() < 0.45
    )
    valuation = {
        k: frozenset(w for w in worlds if rng.random() < 0.5)
        for k in range(1, var_count + 1)
    }
    frame = KripkeFrame(frozenset(worlds), relation)
    return KripkeModel(frame, valuation, worlds[0])


def all_small_models(world_count: int, var_count: int = 1):
    """Every pointed model with exactly ``world_count`` worlds (all relations,
    all valuations, root fixed to world 0 by symmetry)."""
    worlds = [BaseWorld(0, frozenset(), i) for i in range(world_count)]
    pairs = [(u, v) for u in worlds for v in worlds]
    for rel_bits in range(1 << len(pairs)):
        relation = frozenset(p for i, p in enumerate(pairs) if rel_bits >> i & 1)
        frame = KripkeFrame(frozenset(worlds), relation)
        for val_bits in range(1 << (world_count * var_count)):
            valuation = {
                k + 1: frozenset(
                    worlds[i]
                    for i in range(world_count)
                    if val_bits >> (k * world_count + i) & 1
                )
                for k in range(var_count)
            }
            yield KripkeModel(frame, valuation, worlds[0])
