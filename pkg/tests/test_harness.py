import io
import math

import pytest

from postwidder import combinatorics as cb
from postwidder import harness
from postwidder.catalog import make_spec
from postwidder.errors import BudgetError, DivergenceError, DomainError
from postwidder.opeval import QuadratureConfig

EXP = make_spec("exp:A=1")


def test_geometric_grid():
    g = harness.geometric_grid(8, 64, 4)
    assert g[0] == 8 and g[-1] == 64
    assert g[1] == pytest.approx(16)
    with pytest.raises(DomainError):
        harness.geometric_grid(8, 4, 3)


def test_first_order_slope():
    rep = harness.converge(EXP, 1.0, 1.0, 1, 8, 64, 7)
    assert rep.fitted_slope == pytest.approx(-2, abs=0.1)
    assert all(rep.included)
    assert rep.path == "closed_form"
    assert len(rep.residuals) == len(rep.grid)


def test_monomial_expansion_terminates():
    rep = harness.converge(make_spec("monomial:r=2"), 1.3, 0.7, 2, 2, 200, 9)
    assert max(abs(r) for r in rep.residuals) <= 1e-12 * 1.3**2
    assert not any(rep.included)
    assert math.isnan(rep.fitted_slope)


def test_leading_residual_coefficient_beta0():
    rep = harness.converge(EXP, 1.0, 0.0, 1, 256, 2048, 4)
    scaled = [n * n * r for n, r in zip(rep.grid, rep.residuals)]
    assert scaled[-1] == pytest.approx(math.e * (1 / 3 + 1 / 8), rel=5e-3)
    # approach is monotone
    target = math.e * (1 / 3 + 1 / 8)
    d = [abs(s - target) for s in scaled]
    assert all(b < a for a, b in zip(d, d[1:]))


def test_quadrature_path():
    rep = harness.converge(make_spec("sin"), 1.0, 1.0, 1, 8, 64, 5, use_closed_form=False)
    assert rep.path == "quadrature"
    assert rep.fitted_slope == pytest.approx(-2, abs=0.15)


def test_converge_preconditions():
    with pytest.raises(DivergenceError):
        harness.converge(make_spec("exp:A=2"), 1.0, 1.0, 1, 2, 64, 5)
    with pytest.raises(DomainError):
        harness.converge(make_spec("cutout:base=sin,delta=1"), 1.0, 1.0, 1, 2, 64, 5)


def test_budget_error_reports_n():
    cfg = QuadratureConfig(max_nu_terms=2)
    with pytest.raises(BudgetError) as info:
        harness.converge(EXP, 3.0, 5.0, 1, 20, 40, 3, cfg=cfg, use_closed_form=False)
    assert info.value.n == 20
    assert "n=20" in str(info.value)


def test_csv_is_deterministic_and_17_digits():
    a = harness.converge(EXP, 1.0, 1.0, 2, 8, 64, 5).csv()
    b = harness.converge(EXP, 1.0, 1.0, 2, 8, 64, 5).csv()
    assert a == b
    lines = a.splitlines()
    assert lines[0] == "n,value,reference,residual"
    assert lines[1].split(",")[1] == f"{float(lines[1].split(',')[1]):.17g}"


def test_report_rejects_bad_grid():
    with pytest.raises(DomainError):
        harness.ConvergenceReport("f", 1, 1, 1, [2, 1], [0, 0], [0, 0], [0, 0], [0, 0], [True, True], 0, 0, "")


def test_voronovskaja_exponential():
    tab = harness.voronovskaja_probe(EXP, 1.0, 1.0, [32, 64, 128, 256, 512])
    assert tab.limit == pytest.approx(1.5 * math.e, rel=1e-15)
    assert tab.last_deviation <= 0.01 * tab.limit
    assert tab.monotone


def test_voronovskaja_linear_is_exact():
    tab = harness.voronovskaja_probe(make_spec("monomial:r=1"), 1.7, 0.6, [3, 10, 100])
    for s in tab.scaled:
        assert s == pytest.approx(0.6 * 1.7**2, rel=1e-12)


def test_voronovskaja_square_beta0():
    tab = harness.voronovskaja_probe(make_spec("monomial:r=2"), 1.0, 0.0, [10, 100])
    assert tab.limit == 1.0
    assert tab.scaled == pytest.approx([1.0, 1.0], rel=1e-12)


def test_localization_exponential():
    tab = harness.localization_probe(EXP, 1.0, 1.0, 0.5, [20, 40, 80, 160, 320, 640])
    assert tab.passed
    assert tab.fitted_slope <= -3


def test_localization_huge_delta_flags_zeros():
    tab = harness.localization_probe(EXP, 1.0, 1.0, 1e3, [20, 40, 80])
    assert all(tab.flagged)
    assert all(v == 0 for v in tab.values)
    assert not tab.passed


def test_localization_constant_decreasing():
    tab = harness.localization_probe(make_spec("monomial:r=0"), 1.0, 1.0, 0.25, [20, 40, 80, 160])
    assert all(v > 0 for v in tab.values)
    assert all(b < a for a, b in zip(tab.values, tab.values[1:]))


def test_localization_needs_positive_delta():
    with pytest.raises(DomainError):
        harness.localization_probe(EXP, 1.0, 1.0, 0.0, [20])


def test_selftest_passes():
    out = io.StringIO()
    assert harness.selftest(out=out) == 0
    assert "FAIL" not in out.getvalue()


def test_selftest_only_symbolic():
    out = io.StringIO()
    assert harness.selftest(["symbolic"], out=out) == 0
    suites = {line.split()[1] for line in out.getvalue().splitlines() if line.startswith(("PASS", "FAIL"))}
    assert suites == {"symbolic"}


def test_selftest_detects_corrupted_stirling_table(monkeypatch):
    good = cb.StirlingTable.build(40)
    rows = [list(r) for r in good.entries]
    rows[7][3] += 1
    bad = cb.StirlingTable(40, tuple(tuple(r) for r in rows))
    monkeypatch.setitem(cb._tables, cb.StirlingTable, bad)
    out = io.StringIO()
    assert harness.selftest(["stirling"], out=out) == 1
    assert "FAIL  stirling" in out.getvalue()


def test_selftest_unknown_suite():
    with pytest.raises(DomainError):
        harness.selftest(["nope"])


@pytest.mark.parametrize("beta", [0.0, 1.0])
@pytest.mark.parametrize("q", [1, 2, 3, 4])
def test_order_on_common_grid(beta, q):
    # on n in [8, 64] the next-order term no longer biases the fit
    rep = harness.converge(EXP, 1.0, beta, q, 8, 64, 7)
    assert rep.fitted_slope == pytest.approx(-(q + 1), abs=0.1)
