"""Tests for `form_tools` module."""
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qform_tk import form_tools as forms
from qform_tk.form_tools import QuadraticForm as Form

discriminants = [-3, -4, -20, -23, -56, -84, 5, 8, 12, 13, 60, 65]


@pytest.fixture
def x2_plus_5y2():
    return Form(1, 0, 5)


def test_form_value(x2_plus_5y2):
    results = x2_plus_5y2(4, 1)
    assert results == 21


def test_form_discriminant(x2_plus_5y2):
    results = forms.discriminant(x2_plus_5y2)
    assert results == -20


def test_form_str_and_from_string(x2_plus_5y2):
    results = Form.from_string(str(x2_plus_5y2))
    assert results == x2_plus_5y2


@pytest.mark.parametrize("text", ["1,0", "1,0,5,2", "1,x,5", ""])
def test_from_string_rejects_bad_text(text):
    with pytest.raises(ValueError):
        Form.from_string(text)


@pytest.mark.parametrize("D", [7, 9, 0, -1, 2])
def test_check_discriminant_rejects(D):
    with pytest.raises(ValueError):
        forms.check_discriminant(D)


@pytest.mark.parametrize(
    "form", [Form(2, 4, 6), Form(1, 2, 1), Form(-1, 1, -1)]
)
def test_check_form_rejects(form):
    with pytest.raises(ValueError):
        forms.check_form(form)


@pytest.mark.parametrize(
    "input,output",
    [(-20, Form(1, 0, 5)), (-23, Form(1, 1, 6)), (12, Form(1, 0, -3))],
)
def test_principal_form(input, output):
    results = forms.principal_form(input)
    assert results == output


@pytest.mark.parametrize(
    "input,output",
    [
        (Form(4, -3, 2), Form(2, -1, 3)),
        (Form(3, 4, 3), Form(2, 2, 3)),
        (Form(4, -11, 9), Form(2, -1, 3)),
        (Form(1, 6, 14), Form(1, 0, 5)),
        (Form(2, 2, 3), Form(2, 2, 3)),
    ],
)
def test_reduce_definite(input, output):
    results = forms.reduce_definite(input)
    assert results == output


def test_reduce_rejects_negative_definite():
    with pytest.raises(ValueError):
        forms.reduce(Form(-1, 0, -5))


def test_reduce_rejects_square_discriminant():
    with pytest.raises(ValueError):
        forms.reduce(Form(1, 3, 2))


def test_indefinite_cycle():
    results = forms.reduce(Form(1, 0, -3)).cycle
    expected = (Form(-2, 2, 1), Form(1, 2, -2))
    assert results == expected


def test_is_reduced_indefinite():
    assert forms.is_reduced_indefinite(Form(1, 2, -2))
    assert not forms.is_reduced_indefinite(Form(1, 0, -3))


def test_rho_keeps_discriminant():
    results = forms.rho(Form(1, 0, -3))
    assert results == Form(-3, 0, 1)


def test_equivalent_indefinite():
    assert forms.equivalent(Form(1, 0, -3), Form(1, 2, -2))
    assert not forms.equivalent(Form(1, 0, -3), Form(-1, 0, 3))


def test_equivalent_definite_needs_proper_equivalence():
    assert not forms.equivalent(Form(2, 1, 3), Form(2, -1, 3))


def test_equivalent_rejects_different_discriminants():
    with pytest.raises(ValueError):
        forms.equivalent(Form(1, 0, 1), Form(1, 0, 5))


def test_compose_forms_builds_plain_integer_form():
    results = forms.compose_forms(Form(2, 1, 3), Form(2, 1, 3))
    assert results.discriminant == -23
    assert results.a == 4
    assert all(type(coefficient) is int for coefficient in results)


def test_compose_order_three_class():
    results = forms.compose(Form(2, 1, 3), Form(2, 1, 3)).representative
    assert results == Form(2, -1, 3)


@pytest.mark.parametrize(
    "input,output",
    [
        (-3, 1),
        (-4, 1),
        (-20, 2),
        (-23, 3),
        (-56, 4),
        (-84, 4),
        (5, 1),
        (12, 2),
        (60, 4),
    ],
)
def test_class_group_size(input, output):
    results = len(forms.class_group(input))
    assert results == output


def test_class_group_of_minus_23():
    results = [k.representative for k in forms.class_group(-23)]
    expected = [Form(1, 1, 6), Form(2, -1, 3), Form(2, 1, 3)]
    assert results == expected


def test_principal_genus_comes_first():
    genera = forms.genus_partition(-56)
    results = [k.representative for k in genera[0].classes]
    expected = [Form(1, 0, 14), Form(2, 0, 7)]
    assert results == expected


@pytest.mark.parametrize(
    "input,output", [(-20, 2), (-23, 1), (-56, 2), (-84, 4), (12, 2)]
)
def test_genus_count(input, output):
    results = len(forms.genus_partition(input))
    assert results == output


def test_genus_of(x2_plus_5y2):
    genus = forms.genus_of(Form(1, 6, 14))
    assert forms.reduce(x2_plus_5y2) in genus
    assert len(genus) == 1


@pytest.mark.parametrize("D", discriminants)
def test_genera_partition_the_class_group(D):
    genera = forms.genus_partition(D)
    members = [k for genus in genera for k in genus.classes]
    assert sorted(members, key=lambda k: k.representative) == (
        forms.class_group(D)
    )
    assert len({len(genus) for genus in genera}) == 1


@pytest.mark.parametrize("D", discriminants)
def test_principal_class_is_identity(D):
    principal = forms.principal_form(D)
    for form_class in forms.class_group(D):
        f = form_class.representative
        assert forms.compose(f, principal) == form_class


@given(st.sampled_from(discriminants), st.data())
def test_composition_commutes(D, data):
    classes = forms.class_group(D)
    first = data.draw(st.sampled_from(classes))
    second = data.draw(st.sampled_from(classes))
    assert forms.compose_classes(first, second) == (
        forms.compose_classes(second, first)
    )


@given(
    st.sampled_from(discriminants),
    st.integers(min_value=-5, max_value=5),
    st.integers(min_value=-5, max_value=5),
)
def test_reduce_is_invariant_under_transform(D, x, w):
    for form_class in forms.class_group(D):
        f = form_class.representative
        # [[x, x*w - 1], [1, w]] has determinant 1
        g = f.transform(x, 1, x * w - 1, w)
        assert forms.reduce(g) == form_class


def test_normalize_for_tables_moves_coefficient():
    results = forms.normalize_for_tables(Form(2, 2, 3))
    assert results == Form(3, -2, 2)


def test_normalize_for_tables_keeps_good_form(x2_plus_5y2):
    results = forms.normalize_for_tables(x2_plus_5y2)
    assert results is x2_plus_5y2


@pytest.mark.parametrize("D", discriminants)
def test_normalize_for_tables_stays_in_class(D):
    for form_class in forms.class_group(D):
        f = form_class.representative
        g = forms.normalize_for_tables(f)
        assert math.gcd(g.a, 2 * D) == 1
        assert forms.reduce(g) == form_class
