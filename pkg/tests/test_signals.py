import math

import numpy as np
import pytest

from carleson_admit.errors import DomainError
from carleson_admit.signals import (
    ExpTerm,
    InputSignal,
    Piece,
    grid_signal,
    kernel_signal,
    modulated_indicator,
    weighted_sum,
    zero_signal,
)


def test_piece_validation():
    with pytest.raises(DomainError):
        Piece(1.0, 1.0)
    with pytest.raises(DomainError):
        Piece(-0.1, 1.0)
    with pytest.raises(DomainError):
        ExpTerm(1.0, -1.0 + 2j)


def test_indicator_is_left_open():
    f = modulated_indicator(1.0, 2.0)
    assert f(np.array([1.0, 1.5, 2.0, 2.5])).tolist() == [0, 1, 1, 0]


def test_modulation():
    f = modulated_indicator(0.0, 10.0, c=2.0, coef=3.0)
    t = np.array([0.5, 4.0])
    np.testing.assert_allclose(f(t), 3.0 * np.exp(2j * t))
    assert f.sup_norm() == 3.0


def test_grid_signal_norms():
    f = grid_signal([0.0, 1.0, 3.0], [2.0, -1j])
    assert f.sup_norm() == 2.0
    assert f.l1_norm() == pytest.approx(4.0)
    assert f.lp_norm(2) == pytest.approx(math.sqrt(4.0 + 2.0))


def test_grid_signal_validation():
    with pytest.raises(DomainError):
        grid_signal([0.0, 1.0], [1.0, 2.0])
    with pytest.raises(DomainError):
        grid_signal([0.0, 2.0, 1.0], [1.0, 2.0])


def test_overlapping_pieces_norm_by_quadrature():
    # |1 + e^{it}| on (0, pi] integrates to 4
    f = modulated_indicator(0.0, math.pi) + modulated_indicator(0.0, math.pi, c=1.0)
    assert f.abs_profile() is None
    assert f.l1_norm() == pytest.approx(4.0, rel=1e-10)
    assert f.sup_norm() >= 2.0


def test_kernel_signal_norm():
    k = kernel_signal(2.0 + 1j)
    # int (1/2pi)^2 e^{-4t} dt
    assert k.lp_norm(2) ** 2 == pytest.approx(1.0 / (4 * math.pi) ** 2, rel=1e-10)
    assert k.sup_norm() == pytest.approx(1.0 / (2 * math.pi))


def test_weighted_sum_and_product():
    f = weighted_sum([(2.0, modulated_indicator(0, 1)), (1j, modulated_indicator(0.5, 2))])
    t = np.array([0.25, 0.75, 1.5])
    np.testing.assert_allclose(f(t), [2.0, 2.0 + 1j, 1j])
    g = modulated_indicator(0.5, 1.5, c=1.0) * modulated_indicator(1.0, 3.0, c=-1.0)
    assert g.pieces == (Piece(1.0, 1.5, 0.0, 1.0),)


def test_restrict_and_reflect():
    f = modulated_indicator(0.5, 2.0, c=3.0)
    r = f.restrict(1.0)
    assert r.pieces[0].b == 1.0
    u = r.reflect(1.0)
    s = np.array([0.1, 0.3, 0.49])
    np.testing.assert_allclose(u(s), r(1.0 - s), atol=1e-15)
    with pytest.raises(DomainError):
        f.reflect(1.0)


def test_zero_signal():
    z = zero_signal()
    assert z.is_zero
    assert z.sup_norm() == 0.0 and z.l1_norm() == 0.0


@pytest.mark.parametrize(
    "sig",
    [
        zero_signal(),
        modulated_indicator(0.25, 1.0, 2.0, 1 - 1j),
        grid_signal([0, 1, 2, 4], [1.0, 2j, -0.5]),
        weighted_sum([(1.0, modulated_indicator(0, 1)), (2.0, kernel_signal(1 + 1j))]),
    ],
)
def test_dict_round_trip(sig):
    back = InputSignal.from_dict(sig.to_dict())
    t = np.linspace(0.0, 5.0, 41)
    np.testing.assert_allclose(back(t), sig(t), rtol=1e-15, atol=0)


def test_from_dict_kernel():
    k = InputSignal.from_dict({"kind": "kernel", "lambda": [2.0, -1.0]})
    assert k == kernel_signal(2.0 - 1j)


def test_from_dict_unknown():
    with pytest.raises(DomainError) as err:
        InputSignal.from_dict({"kind": "spline"})
    assert err.value.field == "kind"
