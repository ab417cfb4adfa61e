"""One test per acceptance criterion; each prints its PASS/FAIL line."""

from wedgewh import acceptance


def _run(check):
    result = check()
    print(result.line())
    assert result.passed, result.line()


def test_criterion_01_one_variable_factorisation():
    _run(acceptance.check_one_variable_factorisation)


def test_criterion_02_four_factor_reconstruction():
    _run(acceptance.check_four_factor_reconstruction)


def test_criterion_03_sum_split_identity():
    _run(acceptance.check_sum_split)


def test_criterion_04_degenerate_collapse():
    _run(acceptance.check_degenerate_collapse)


def test_criterion_05_radlow_gap():
    _run(acceptance.check_radlow_gap)


def test_criterion_06_decay_estimates():
    _run(acceptance.check_decay)


def test_criterion_07_degenerate_field_round_trip():
    _run(acceptance.check_degenerate_field)


def test_criterion_08_contour_deformation_invariance():
    _run(acceptance.check_deformation_invariance)


def test_criterion_09_portrait_structure():
    _run(acceptance.check_portraits)


def test_criterion_10_liouville_diagnostics():
    _run(acceptance.check_liouville)
