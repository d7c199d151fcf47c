"""Parser, printer, substitution and size metric tests."""

import pytest
from hypothesis import strategies as st
from hypothesis import assume, given, settings

from conftest import modal_formulas, qbf_formulas, sugared_modal_formulas, all_small_models
from modalred.kripke import model_check
from modalred.syntax import (
    FormulaSyntaxError,
    MAnd,
    MBox,
    MBoxLe,
    MBoxPlus,
    MDia,
    MFalse,
    MImp,
    MOr,
    MTrue,
    MVar,
    QExists,
    QFalse,
    QForall,
    QImp,
    QVar,
    expand_sugar,
    formula_size,
    is_constant,
    modal_vars,
    parse_modal,
    parse_qbf,
    render,
    substitute,
)


class TestParseQbf:
    def test_single_exists(self):
        assert parse_qbf("E p1 . p1") == QExists(1, QVar(1))

    def test_tautological_matrix(self):
        assert parse_qbf("A p1 . (p1 -> p1)") == QForall(1, QImp(QVar(1), QVar(1)))

    def test_trailing_operator_is_rejected(self):
        with pytest.raises(FormulaSyntaxError) as err:
            parse_qbf("p1 ->")
        assert err.value.offset == 5

    def test_unknown_token(self):
        with pytest.raises(FormulaSyntaxError) as err:
            parse_qbf("p1 # p2")
        assert err.value.offset == 3

    def test_unbalanced_parens(self):
        with pytest.raises(FormulaSyntaxError):
            parse_qbf("(p1 -> p2")
        with pytest.raises(FormulaSyntaxError):
            parse_qbf("p1 )")

    def test_tilde_is_implication_sugar(self):
        assert parse_qbf("~p1") == QImp(QVar(1), QFalse())

    def test_quantifier_scope_is_maximal(self):
        assert parse_qbf("A p1 . p1 -> p1") == QForall(1, QImp(QVar(1), QVar(1)))

    def test_quantifier_inside_parentheses(self):
        f = parse_qbf("(A p1 . p1) -> false")
        assert f == QImp(QForall(1, QVar(1)), QFalse())

    def test_no_true_in_qbf(self):
        with pytest.raises(FormulaSyntaxError):
            parse_qbf("true")


class TestParseModal:
    def test_box_false(self):
        assert parse_modal("[] false") == MBox(MFalse())

    def test_box_plus_expands(self):
        assert parse_modal("box+ p1") == MAnd((MVar(1), MBox(MVar(1))))

    def test_dia_pow_expands(self):
        assert parse_modal("dia^2 false") == MDia(MDia(MFalse()))

    def test_box_le_expands(self):
        assert parse_modal("box<=0 p1") == MVar(1)
        assert parse_modal("box<=2 p1") == MAnd(
            (MVar(1), MBox(MVar(1)), MBox(MBox(MVar(1))))
        )

    def test_flat_conjunction(self):
        assert parse_modal("p1 & p2 & p3") == MAnd((MVar(1), MVar(2), MVar(3)))

    def test_nested_conjunction_kept_nested(self):
        assert parse_modal("(p1 & p2) & p3") == MAnd((MAnd((MVar(1), MVar(2))), MVar(3)))

    def test_absurd_sugar_bounds_rejected(self):
        with pytest.raises(FormulaSyntaxError):
            parse_modal("box<=99999999 false")
        with pytest.raises(FormulaSyntaxError):
            parse_modal("dia^99999999 false")


class TestRender:
    def test_box_false(self):
        assert render(MBox(MFalse())) == "[] false"

    def test_exists(self):
        assert render(QExists(1, QVar(1))) == "E p1 . p1"

    def test_nary_conjunction(self):
        assert render(MAnd((MVar(1), MBox(MVar(1))))) == "(p1 & [] p1)"

    def test_implication_associativity(self):
        f = MImp(MVar(1), MImp(MVar(2), MVar(3)))
        assert render(f) == "p1 -> p2 -> p3"
        g = MImp(MImp(MVar(1), MVar(2)), MVar(3))
        assert render(g) == "(p1 -> p2) -> p3"

    def test_sugar_tokens(self):
        assert render(MBoxLe(2, MVar(1))) == "box<=2 p1"
        assert render(MBoxPlus(MBox(MVar(1)))) == "box+ [] p1"


@given(qbf_formulas())
@settings(max_examples=300)
def test_qbf_round_trip(f):
    assert parse_qbf(render(f)) is f


@given(modal_formulas())
@settings(max_examples=300)
def test_modal_round_trip(f):
    assert parse_modal(render(f)) is f


@given(sugared_modal_formulas())
@settings(max_examples=200)
def test_sugared_render_reparses_to_expansion(f):
    assert parse_modal(render(f)) is expand_sugar(f)


class TestSubstitute:
    def test_example(self):
        assert substitute(MBox(MVar(1)), {1: MFalse()}) == MBox(MFalse())

    def test_identity(self):
        f = MBox(MAnd((MVar(1), MVar(2))))
        assert substitute(f, {}) is f

    def test_outside_domain_untouched(self):
        f = MOr(MVar(1), MVar(2))
        assert substitute(f, {3: MFalse()}) is f


@given(modal_formulas(max_leaves=10), modal_formulas(max_leaves=6))
@settings(max_examples=150)
def test_substitute_is_homomorphism(f, g):
    s = {1: g}
    assert substitute(MAnd((f, f)), s) == MAnd((substitute(f, s), substitute(f, s)))
    assert substitute(MBox(f), s) == MBox(substitute(f, s))
    assert substitute(MOr(f, f), s) == MOr(substitute(f, s), substitute(f, s))


@given(modal_formulas(max_leaves=8), modal_formulas(max_leaves=5), modal_formulas(max_leaves=5))
@settings(max_examples=150)
def test_disjoint_substitutions_commute(f, g, h):
    # indices 1 and 2 are distinct and g must not mention p2
    assume(2 not in modal_vars(g))
    sequential = substitute(substitute(f, {1: g}), {2: h})
    simultaneous = substitute(f, {1: g, 2: h})
    assert sequential == simultaneous


@given(modal_formulas(max_leaves=10), modal_formulas(max_leaves=6))
@settings(max_examples=150)
def test_substitution_size_bound(f, g):
    s = {i: g for i in modal_vars(f)}
    bound = formula_size(f) * max(
        [formula_size(g)] + [1]
    )
    assert formula_size(substitute(f, s)) <= bound


class TestExpandSugar:
    def test_box_plus(self):
        f = MVar(1)
        assert expand_sugar(MBoxPlus(f)) == MAnd((f, MBox(f)))

    def test_box_le_zero(self):
        assert expand_sugar(MBoxLe(0, MVar(1))) == MVar(1)

    def test_box_le_two(self):
        f = MVar(1)
        assert expand_sugar(MBoxLe(2, f)) == MAnd((f, MBox(f), MBox(MBox(f))))

    def test_box_le_two_matches_bounded_depth_semantics(self):
        # equivalence checked against every pointed model with <= 3 worlds
        sugar = MBoxLe(2, MVar(1))
        spelled = MAnd((MVar(1), MBox(MVar(1)), MBox(MBox(MVar(1)))))
        for worlds in (1, 2, 3):
            for model in all_small_models(worlds, var_count=1):
                assert model_check(model, model.root, sugar) == model_check(
                    model, model.root, spelled
                )


class TestFormulaSize:
    def test_leaves(self):
        assert formula_size(MFalse()) == 1
        assert formula_size(MTrue()) == 1
        assert formula_size(MVar(7)) == 1

    def test_box_false(self):
        assert formula_size(MBox(MFalse())) == 2

    def test_nary_conjunction_counts_arity_minus_one(self):
        f = MAnd((MVar(1), MVar(2), MVar(3)))
        assert formula_size(f) == 3 + 2

    def test_sugar_expanded_before_counting(self):
        assert formula_size(MBoxPlus(MVar(1))) == formula_size(
            MAnd((MVar(1), MBox(MVar(1))))
        )


class TestIsConstant:
    def test_variable_free(self):
        assert is_constant(MBox(MImp(MDia(MTrue()), MFalse())))

    def test_with_variable(self):
        assert not is_constant(MBox(MVar(1)))


class TestNodeInterning:
    def test_equal_structure_is_same_object(self):
        assert MAnd((MVar(1), MBox(MVar(1)))) is MAnd((MVar(1), MBox(MVar(1))))
        assert QForall(1, QVar(1)) is QForall(1, QVar(1))

    def test_invalid_indices_rejected(self):
        with pytest.raises(ValueError):
            MVar(0)
        with pytest.raises(ValueError):
            QVar(-2)
        with pytest.raises(ValueError):
            MAnd(())


@given(st.text(alphabet="pEA1234567890&|->~()[]<>boxdia+=^. ", max_size=30))
@settings(max_examples=300)
def test_parser_never_crashes_with_foreign_exceptions(text):
    for parser in (parse_qbf, parse_modal):
        try:
            parser(text)
        except FormulaSyntaxError:
            pass
