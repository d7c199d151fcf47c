"""Tableau and bounded-oracle behavior."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_random_model, modal_formulas
from modalred.kripke import model_check, model_check_all
from modalred.solver import (
    SolverBudgetError,
    sat_bounded,
    sat_k_tableau,
)
from modalred.reduction import encode_alpha
from modalred.syntax import modal_depth, parse_modal, parse_qbf, render


class TestTableau:
    def test_blind_world(self):
        verdict = sat_k_tableau(parse_modal("[] false"))
        assert verdict.satisfiable and verdict.engine == "tableau"
        assert len(verdict.witness.frame.worlds) == 1
        assert verdict.witness.frame.relation == frozenset()

    def test_diamond_contradicts_blindness(self):
        assert not sat_k_tableau(parse_modal("<> true & [] false")).satisfiable

    def test_encoding_verdicts(self):
        assert not sat_k_tableau(encode_alpha(parse_qbf("A p1 . p1"))).satisfiable
        assert sat_k_tableau(encode_alpha(parse_qbf("E p1 . p1"))).satisfiable

    def test_witness_depth_within_modal_depth(self):
        f = parse_modal("<> (p1 & <> (p2 & <> p3))")
        verdict = sat_k_tableau(f)
        assert verdict.satisfiable
        deepest = max(w.level for w in verdict.witness.frame.worlds)
        assert deepest <= modal_depth(f)

    def test_budget_refusal(self):
        f = encode_alpha(parse_qbf("A p1 . E p2 . p1 -> p2"))
        with pytest.raises(SolverBudgetError):
            sat_k_tableau(f, budget=10)

    def test_verdict_is_deterministic(self):
        f = parse_modal("(<> p1 | <> p2) & [] (p1 -> p2) & <> ~p2")
        a = sat_k_tableau(f)
        b = sat_k_tableau(f)
        assert a == b

    def test_exponential_tree_witness_falls_back_to_shared_form(self):
        # the tree unfolding would have 2^26 worlds; the emitted witness keeps
        # the shared form and still model-checks
        f = parse_modal("box<=25 (<> p1 & <> ~p1)")
        verdict = sat_k_tableau(f)
        assert verdict.satisfiable
        assert len(verdict.witness.frame.worlds) < 1000
        assert model_check(verdict.witness, verdict.witness.root, f)


class TestBounded:
    def test_blind_world_bound_one(self):
        verdict = sat_bounded(parse_modal("[] false"), 1)
        assert verdict.satisfiable and verdict.bound == 1
        assert len(verdict.witness.frame.worlds) == 1

    def test_nested_diamond_fits_in_one_reflexive_world(self):
        # a reflexive singleton satisfies <><>true, so even bound 1 is enough
        verdict = sat_bounded(parse_modal("<> <> true"), 1)
        assert verdict.satisfiable
        (world,) = verdict.witness.frame.worlds
        assert (world, world) in verdict.witness.frame.relation

    def test_bounded_unsat_is_labeled(self):
        # within 2 worlds one cannot have three pairwise-distinct valuations
        f = parse_modal("<> (p1 & ~p2) & <> (p2 & ~p1) & <> (p1 & p2)")
        verdict = sat_bounded(f, 2)
        assert not verdict.satisfiable
        assert verdict.engine == "bounded" and verdict.bound == 2
        assert not verdict.conclusive
        assert sat_bounded(f, 3).satisfiable

    def test_monotone_in_bound(self):
        f = parse_modal("<> p1 & <> ~p1")
        assert not sat_bounded(f, 1).satisfiable
        for bound in (2, 3, 4):
            assert sat_bounded(f, bound).satisfiable

    def test_requires_positive_bound(self):
        with pytest.raises(ValueError):
            sat_bounded(parse_modal("p1"), 0)


@given(modal_formulas(max_leaves=8))
@settings(max_examples=200, deadline=None)
def test_satisfiable_witnesses_model_check(f):
    verdict = sat_k_tableau(f)
    if verdict.satisfiable:
        assert model_check(verdict.witness, verdict.witness.root, f)


@given(modal_formulas(max_leaves=8))
@settings(max_examples=100, deadline=None)
def test_engines_agree_within_bound(f):
    tableau = sat_k_tableau(f)
    bounded = sat_bounded(f, 4)
    if bounded.satisfiable:
        assert tableau.satisfiable
        assert model_check(bounded.witness, bounded.witness.root, f)
    if tableau.satisfiable and len(tableau.witness.frame.worlds) <= 4:
        assert bounded.satisfiable
    if not tableau.satisfiable:
        assert not bounded.satisfiable


def test_engines_agree_on_variable_free_formulas():
    # constant formulas exercise the purely modal branches of both engines
    from modalred.pipeline import random_modal_formula
    from modalred.syntax import is_constant

    rng = random.Random(31)
    for _ in range(150):
        f = random_modal_formula(rng, 10, var_count=0)
        assert is_constant(f)
        tableau = sat_k_tableau(f)
        bounded = sat_bounded(f, 4)
        if bounded.satisfiable:
            assert tableau.satisfiable
        if tableau.satisfiable and len(tableau.witness.frame.worlds) <= 4:
            assert bounded.satisfiable


@given(modal_formulas(max_leaves=6), st.integers(min_value=0, max_value=10**6))
@settings(max_examples=100, deadline=None)
def test_valid_formulas_hold_in_random_models(f, seed):
    negation = parse_modal(f"~({render(f)})")
    if sat_k_tableau(negation).satisfiable:
        return
    model = make_random_model(random.Random(seed), world_count=5, var_count=5)
    assert model_check_all(model, f) == model.frame.worlds
