"""Tests for `apollonian_tools` module."""
import pytest

from qform_tk import apollonian_tools as apollonian
from qform_tk.form_tools import QuadraticForm as Form

root = (-1, 2, 2, 3)


@pytest.fixture
def packing_to_six():
    return apollonian.packing_bfs(root, 6)


@pytest.mark.parametrize(
    "input,output",
    [
        ((-1, 2, 2, 3), True),
        ((2, 2, 3, -1), True),
        ((0, 0, 1, 1), True),
        ((1, 1, 1, 1), False),
        ((1, 2, 3), False),
    ],
)
def test_is_descartes(input, output):
    results = apollonian.is_descartes(input)
    assert results == output


@pytest.mark.parametrize(
    "input,output",
    [
        ((root, 0), (15, 2, 2, 3)),
        ((root, 3), root),
        ((root, 1), (-1, 6, 2, 3)),
    ],
)
def test_swap(input, output):
    results = apollonian.swap(*input)
    assert results == output


def test_swap_rejects_non_descartes():
    with pytest.raises(ValueError):
        apollonian.swap((1, 1, 1, 1), 0)


def test_tangency_form():
    results = apollonian.tangency_form((2, 2, 3, -1), 0)
    assert results == Form(4, 0, 1)
    assert results.discriminant == -16


@pytest.mark.parametrize("i", range(4))
def test_tangency_form_discriminant(i):
    results = apollonian.tangency_form(root, i).discriminant
    assert results == -4 * root[i] ** 2


def test_tangent_curvatures_via_form():
    results = apollonian.tangent_curvatures_via_form(root, 1, 6)
    assert results == [-1, 2, 3, 3, 6, 6]


def test_tangent_witnesses_are_coprime():
    for curvature, x, y in apollonian.tangent_witnesses(root, 1, 30):
        f = apollonian.tangency_form(root, 1)
        assert f(x, y) - 2 == curvature
        assert y > 0 or (x, y) == (1, 0)


def test_packing_bfs_curvatures(packing_to_six):
    results = packing_to_six.curvature_multiset()
    assert results == [-1, 2, 2, 3, 3, 6, 6, 6, 6]


def test_packing_bfs_neighbours_match_form(packing_to_six):
    results = packing_to_six.neighbour_curvatures(1)
    expected = apollonian.tangent_curvatures_via_form(root, 1, 6)
    assert results == expected


def test_packing_bfs_words(packing_to_six):
    assert packing_to_six.words[0] == ()
    new_words = [w for c, w in packing_to_six.words.items() if c > 3]
    assert all(len(word) >= 1 for word in new_words)


def test_packing_bfs_drops_root_above_bound():
    results = apollonian.packing_bfs(root, 2).curvature_multiset()
    assert results == [-1, 2, 2]


def test_packing_edge_csv(packing_to_six):
    lines = packing_to_six.to_csv().splitlines()
    assert lines[0] == "circle,curvature,neighbours"
    assert lines[1] == "0,-1,1 2 3 4 5 6 7 8"


def test_packing_write_csv(packing_to_six, tmp_path):
    path = tmp_path / "edges.csv"
    packing_to_six.write_csv(str(path))
    assert len(path.read_text().splitlines()) == 10


def test_count_tangent_primes():
    results = apollonian.count_tangent_primes((2, 2, 3, -1), 0, 50)
    assert results.count == 4
    assert results.config["quadruple"] == [2, 2, 3, -1]


def test_count_tangent_primes_warns_on_even_curvature(caplog):
    apollonian.count_tangent_primes((2, 2, 3, -1), 0, 10)
    assert "even" in caplog.text


def test_tangent_curvatures_of_form_four_zero_one():
    results = apollonian.tangent_curvatures_via_form((2, 2, 3, -1), 0, 6)
    assert results == [-1, 2, 3, 3, 6, 6]


@pytest.mark.slow
@pytest.mark.parametrize("i", range(4))
def test_bfs_matches_form_side_at_bound_1000(i):
    packing = apollonian.packing_bfs(root, 1000)
    results = packing.neighbour_curvatures(i)
    expected = apollonian.tangent_curvatures_via_form(root, i, 1000)
    assert results == expected
