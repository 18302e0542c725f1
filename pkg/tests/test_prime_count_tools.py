"""Tests for `prime_count_tools` module."""
import math

import pytest

from qform_tk import prime_count_tools as counting
from qform_tk.admissible_tools import ShiftConfig
from qform_tk.form_tools import QuadraticForm as Form

stable_csv = "tests/test_files/count_reports/stable.csv"
sum_of_squares = Form(1, 0, 1)
eisenstein = Form(1, -1, 1)


@pytest.fixture
def plain_shift():
    return ShiftConfig(1, 1)


@pytest.fixture
def sum_of_squares_report(plain_shift):
    return counting.count_primes(sum_of_squares, plain_shift, 100)


def test_count_primes_sum_of_squares(sum_of_squares_report):
    results = [point.count for point in sum_of_squares_report.checkpoints]
    assert results == [2, 5]
    assert sum_of_squares_report.count == 5


def test_count_primes_records_config(sum_of_squares_report):
    results = sum_of_squares_report.config
    assert results["form"] == "1,0,1"
    assert results["level"] == "class"


def test_count_primes_normalized(sum_of_squares_report):
    results = sum_of_squares_report.checkpoints[0].normalized
    assert results == pytest.approx(2 * math.log(10) ** 1.5 / 10)


def test_count_primes_genus_level_matches_class_level(plain_shift):
    # one class per genus at D = -4
    results = counting.count_primes(
        sum_of_squares, plain_shift, 100, level="genus"
    )
    assert results.count == 5


def test_count_primes_non_primitive(plain_shift):
    results = counting.count_primes(
        sum_of_squares, plain_shift, 100, primitive=False
    )
    assert results.count == 12


def test_non_primitive_needs_definite_class_level(plain_shift):
    with pytest.raises(ValueError):
        counting.count_primes(
            Form(1, 0, -3), plain_shift, 100, primitive=False
        )


def test_count_primes_local_obstruction(plain_shift):
    results = counting.count_primes(eisenstein, plain_shift, 1000)
    assert results.count == 1
    assert results.flagged


def test_count_primes_indefinite_form():
    # (p - 1)/2 = x**2 + xy - y**2 for p = 3, 11, 23, 59, 83
    cfg = ShiftConfig(1, 2)
    results = counting.count_primes(Form(1, 1, -1), cfg, 100)
    assert results.count == 5


def test_count_primes_with_congruence():
    cfg = ShiftConfig(1, 1, ell=2, mbar=3)
    results = counting.count_primes(Form(1, 0, 5), cfg, 100)
    # of p = 2, 7, 31, 47, 71 only 2, 47 and 71 are 2 mod 3
    assert results.count == 3


def test_is_shifted_prime_represented(plain_shift):
    assert counting.is_shifted_prime_represented(
        11, sum_of_squares, plain_shift
    )
    assert not counting.is_shifted_prime_represented(
        5, sum_of_squares, plain_shift
    )


def test_is_shifted_prime_represented_scale_must_divide():
    cfg = ShiftConfig(1, 2)
    results = counting.is_shifted_prime_represented(2, sum_of_squares, cfg)
    assert results is False


def test_unknown_level_raises(plain_shift):
    with pytest.raises(ValueError):
        counting.count_primes(sum_of_squares, plain_shift, 10, level="form")


def test_primitive_value_mask():
    mask = counting.primitive_value_mask(sum_of_squares, 20)
    results = [v for v in range(21) if mask[v]]
    assert results == [1, 2, 5, 10, 13, 17]


def test_value_mask_without_primitivity():
    mask = counting.primitive_value_mask(sum_of_squares, 20, primitive=False)
    results = [v for v in range(21) if mask[v]]
    assert results == [1, 2, 4, 5, 8, 9, 10, 13, 16, 17, 18, 20]


@pytest.mark.parametrize(
    "input,output",
    [(5, [5]), (10, [10]), (100, [10, 100]), (150, [10, 100, 150])],
)
def test_decade_checkpoints(input, output):
    results = counting.decade_checkpoints(input)
    assert results == output


@pytest.mark.parametrize(
    "input,output",
    [(12, True), (18, True), (50, False), (0, False), (-30, True)],
)
def test_squarefree_outside(input, output):
    results = counting.squarefree_outside(input)
    assert results == output


@pytest.mark.parametrize(
    "input,output", [(16, True), (32, False), (9, True), (54, False)]
)
def test_within_power_caps(input, output):
    results = counting.within_power_caps(input)
    assert results == output


def test_count_squarefree_shifted(plain_shift):
    results = counting.count_squarefree_shifted(
        sum_of_squares, plain_shift, 100
    )
    assert results == 5


def test_sifting_product(plain_shift):
    results = counting.sifting_product(sum_of_squares, plain_shift, 12)
    assert results == 3 * 5 * 7 * 11


def test_count_sifted_rejects_small_z(plain_shift):
    with pytest.raises(ValueError):
        counting.count_sifted(sum_of_squares, plain_shift, 100, 3)


def test_count_square_multiple(plain_shift):
    # p = 37 and p = 73: n = 36 * 1 and n = 36 * 2
    results = counting.count_square_multiple(
        sum_of_squares, plain_shift, 100, 6
    )
    assert results == 2


@pytest.mark.parametrize("input,output", [(19, 0), (25, 1)])
def test_square_multiple_total_stops_at_root_of_N(input, output):
    # p = 19, A = -6: n = 25 = 5**2 * 1, and 5 > sqrt(19)
    cfg = ShiftConfig(-6, 1)
    results = counting.square_multiple_total(sum_of_squares, cfg, input, 5)
    assert results == output


def test_check_square_split_bound(plain_shift):
    results = counting.check_square_split_bound(
        sum_of_squares, plain_shift, 100, 5
    )
    expected = counting.SplitBoundCheck(5, 5, 2, 0)
    assert results == expected
    assert results.holds


def test_growth_report_needs_increasing_checkpoints(plain_shift):
    with pytest.raises(ValueError):
        counting.growth_report(sum_of_squares, plain_shift, [100, 10])


def test_growth_report_flags_obstructed_form(plain_shift):
    results = counting.growth_report(eisenstein, plain_shift, [100, 1000])
    assert results.ratios()[0] < counting.STABILITY_WINDOW[0]
    assert results.flagged


def test_ratios_with_zero_counts():
    report = counting.CountReport(
        [
            counting.Checkpoint(10, 0, 0.0),
            counting.Checkpoint(100, 0, 0.0),
            counting.Checkpoint(1000, 3, 0.1),
        ]
    )
    results = report.ratios()
    assert math.isnan(results[0])
    assert results[1] == math.inf
    assert report.flagged


def test_read_csv_report():
    results = counting.CountReport.read_csv(stable_csv)
    assert results.count == 5
    assert results.ratios() == [1.0]
    assert not results.flagged


def test_csv_round_trip(sum_of_squares_report):
    text = sum_of_squares_report.to_csv()
    results = counting.CountReport.from_csv(text)
    assert results.checkpoints == sum_of_squares_report.checkpoints


def test_write_json(sum_of_squares_report, tmp_path):
    path = tmp_path / "count.json"
    sum_of_squares_report.write_json(str(path))
    assert '"count": 5' in path.read_text()


@pytest.mark.slow
def test_sum_of_squares_growth_is_stable(plain_shift):
    results = counting.growth_report(
        sum_of_squares, plain_shift, [10**5, 10**6, 10**7]
    )
    assert not results.flagged


@pytest.mark.slow
def test_obstructed_count_stays_at_one(plain_shift):
    results = counting.count_primes(
        eisenstein, plain_shift, 10**6, checkpoints=[100, 10**4, 10**6]
    )
    assert [point.count for point in results.checkpoints] == [1, 1, 1]


@pytest.mark.slow
def test_normalized_count_ratio_sum_of_squares(plain_shift):
    results = counting.growth_report(
        sum_of_squares, plain_shift, [10**5, 10**6]
    )
    assert 0.8 <= results.ratios()[0] <= 1.25


@pytest.mark.slow
def test_normalized_count_with_congruence():
    cfg = ShiftConfig(1, 1, ell=2, mbar=5)
    results = counting.growth_report(sum_of_squares, cfg, [10**5, 10**6])
    assert results.checkpoints[0].normalized > 0
    assert 0.8 <= results.ratios()[0] <= 1.25


@pytest.mark.slow
@pytest.mark.parametrize(
    "form", [Form(1, 0, 1), Form(1, 0, 5), Form(3, -2, 2)]
)
@pytest.mark.parametrize(
    "A,B", [(1, 1), (-1, 1), (5, 1), (1, 2), (-1, 2), (5, 2)]
)
def test_square_split_bound_grid(form, A, B):
    results = counting.check_square_split_bound(
        form, ShiftConfig(A, B), 10**5, 11
    )
    assert results.holds
