import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.polynomial import legendre as npleg

from oracles import narma_oracle, recurrence_oracle
from softarm_rc.errors import ContractError, TargetDivergedError
from softarm_rc.harness import generate_input
from softarm_rc.tasks import (LegendreSpec, NarmaSpec, legendre_coefficients, legendre_target,
                              legendre_targets, legendre_value, narma_target, write_target_csv)


def test_narma2_hand_values_zero_input():
    y = narma_target(np.zeros(3), NarmaSpec(2))
    np.testing.assert_allclose(y, [0.1, 0.14, 0.1616], atol=1e-15)


def test_narma2_hand_value_full_input():
    # u = 1 scales to 0.2: 0.6 * 0.2^3 + 0.1
    assert narma_target(np.ones(1), NarmaSpec(2))[0] == pytest.approx(0.1048, abs=1e-15)


@pytest.mark.parametrize("order", [2, 3, 5, 9])
@pytest.mark.parametrize("seed", [1, 77])
def test_narma_matches_recurrence_oracle(order, seed):
    u = generate_input(seed, 10, 1.0).values
    np.testing.assert_allclose(narma_target(u, NarmaSpec(order)), narma_oracle(u, order, 10),
                               atol=1e-12, rtol=0)


def test_narma_long_run_matches_oracle():
    u = generate_input(3, 400, 1.0).values
    for order in (4, 7):
        np.testing.assert_allclose(narma_target(u, NarmaSpec(order)), narma_oracle(u, order, 400),
                                   atol=1e-12, rtol=0)


def test_narma_targets_stay_in_unit_interval():
    for seed in range(100):
        u = generate_input(seed, 5000, 1.0).values
        for order in range(2, 10):
            y = narma_target(u, NarmaSpec(order))
            assert np.all((y > 0) & (y < 1)), (seed, order)


@given(st.integers(0, 1000), st.integers(1, 60))
def test_narma_is_causal(seed, k):
    u = generate_input(seed, 60, 1.0).values
    for order in (2, 6):
        full = narma_target(u, NarmaSpec(order))
        np.testing.assert_array_equal(full[:k], narma_target(u[:k], NarmaSpec(order)))


def test_narma_divergence_names_step():
    with pytest.raises(TargetDivergedError) as info:
        narma_target(np.ones(200), NarmaSpec(5, input_scale=2.0))
    assert info.value.step is not None
    assert f"step {info.value.step}" in str(info.value)
    assert info.value.exit_code == 3


@pytest.mark.parametrize("order", [1, 10])
def test_narma_order_range(order):
    with pytest.raises(ContractError):
        NarmaSpec(order)


def test_narma_spec_defaults():
    spec = NarmaSpec(5)
    assert spec.coefficients == (0.3, 0.05, 1.5, 0.1)
    assert spec.input_scale == 0.2
    assert spec.name == "narma5"


def test_legendre_examples():
    assert legendre_value(0, 0.37) == 1.0
    assert legendre_value(1, 0.3) == pytest.approx(0.3, abs=1e-15)
    assert legendre_value(2, 0.5) == pytest.approx(-0.125, abs=1e-15)


def test_legendre_product_form_matches_recurrence():
    x = np.round(np.arange(-1.0, 1.0 + 1e-9, 0.01), 12)
    for n in range(11):
        assert np.max(np.abs(legendre_value(n, x) - recurrence_oracle(n, x))) < 1e-9


def test_legendre_coefficients_match_numpy():
    for n in range(11):
        np.testing.assert_allclose(legendre_coefficients(n), npleg.leg2poly([0] * n + [1]),
                                   atol=1e-9)


@given(st.floats(-1, 1), st.integers(0, 10))
def test_legendre_parity(x, n):
    assert legendre_value(n, -x) == pytest.approx((-1) ** n * legendre_value(n, x), abs=1e-12)


def test_legendre_at_one():
    for n in range(11):
        assert legendre_value(n, 1.0) == pytest.approx(1.0, abs=1e-9)


def test_legendre_targets():
    u = generate_input(4, 30, 1.0).values
    np.testing.assert_allclose(legendre_target(u, LegendreSpec(1, 0)), 2 * u - 1, atol=1e-15)
    shifted = legendre_target(u, LegendreSpec(1, 3))
    np.testing.assert_allclose(shifted[3:], 2 * u[:-3] - 1, atol=1e-15)
    np.testing.assert_allclose(shifted[:3], -1.0)  # u before the stream is 0, mapped to -1
    assert legendre_target([0.75], LegendreSpec(2, 0))[0] == pytest.approx(-0.125, abs=1e-15)
    raw = legendre_target(u, LegendreSpec(2, 0, remap=False))
    np.testing.assert_allclose(raw, (3 * u ** 2 - 1) / 2, atol=1e-14)


def test_legendre_target_stack_layout():
    u = generate_input(8, 80, 1.0).values
    stack = legendre_targets(u, (2, 5), 4)
    assert stack.shape == (80, 10)
    np.testing.assert_array_equal(stack[:, 1 * 5 + 3], legendre_target(u, LegendreSpec(5, 3)))


@pytest.mark.parametrize("degree, delay", [(11, 0), (-1, 0), (1, 51)])
def test_legendre_spec_ranges(degree, delay):
    with pytest.raises(ContractError):
        LegendreSpec(degree, delay)


def test_target_csv(tmp_path):
    path = tmp_path / "target.csv"
    write_target_csv(path, [0.1, 0.14])
    assert path.read_text() == "k,y_target\n0,0.1\n1,0.14\n"
