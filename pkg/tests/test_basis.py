import numpy as np
import pytest

from wgstokes.basis import CellBasis, EdgeBasis, monomial_exponents, space_dimension
from wgstokes.quadrature import polygon_rule


def test_exponent_order_is_degree_major():
    assert monomial_exponents(2) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert space_dimension(1) == 3
    assert space_dimension(2) == 6
    assert space_dimension(3) == 10


def test_first_function_is_one_and_center_kills_linears():
    basis = CellBasis(2, center=[0.3, 0.7], scale=0.5)
    vals = basis.eval([[0.3, 0.7]])
    assert vals[0, 0] == 1.0
    assert vals[0, 1:3] == pytest.approx([0.0, 0.0])


def test_scaling_normalizes_values():
    # at distance `scale` from the center, linear functions have unit size
    basis = CellBasis(1, center=[0.0, 0.0], scale=0.25)
    vals = basis.eval([[0.25, 0.0], [0.0, -0.25]])
    assert vals[0, 1] == pytest.approx(1.0)
    assert vals[1, 2] == pytest.approx(-1.0)


@pytest.mark.parametrize("degree", [1, 2, 3])
def test_gradient_matches_finite_differences(degree):
    rng = np.random.default_rng(42)
    basis = CellBasis(degree, center=[0.4, 0.6], scale=0.37)
    pts = rng.uniform(0.2, 0.8, size=(7, 2))
    eps = 1e-6
    grad = basis.eval_grad(pts)
    for d in range(2):
        shift = np.zeros(2)
        shift[d] = eps
        fd = (basis.eval(pts + shift) - basis.eval(pts - shift)) / (2 * eps)
        assert grad[:, :, d] == pytest.approx(fd, abs=5e-9)


def test_orthonormalization_gives_identity_gram():
    poly = np.array([[0, 0], [1, 0], [0.9, 0.8], [0.1, 1.1]])
    rule = polygon_rule(poly, 6)
    basis = CellBasis(3, center=[0.5, 0.5], scale=1.2)
    onb = basis.orthonormalized(rule)
    vals = onb.eval(rule.points)
    gram = vals.T @ (vals * rule.weights[:, None])
    assert gram == pytest.approx(np.eye(basis.dim), abs=1e-12)


def test_orthonormalized_gradient_consistent():
    # gradients must transform with the same coefficients as values
    poly = np.array([[0, 0], [1, 0], [1, 1], [0, 1]])
    rule = polygon_rule(poly, 4)
    onb = CellBasis(2, center=[0.5, 0.5], scale=1.0).orthonormalized(rule)
    pts = np.array([[0.3, 0.4]])
    eps = 1e-6
    grad = onb.eval_grad(pts)
    for d in range(2):
        shift = np.zeros(2)
        shift[d] = eps
        fd = (onb.eval(pts + shift) - onb.eval(pts - shift)) / (2 * eps)
        assert grad[:, :, d] == pytest.approx(fd, abs=5e-9)


class TestEdgeBasis:
    def test_param_is_centered_and_scaled(self):
        eb = EdgeBasis(2, [1.0, 1.0], [3.0, 1.0])
        pts = np.array([[1.0, 1.0], [2.0, 1.0], [3.0, 1.0]])
        assert eb.param(pts) == pytest.approx([-0.5, 0.0, 0.5])

    def test_values_independent_of_viewing_cell(self):
        # both cells sharing an edge evaluate the same canonical functions
        eb = EdgeBasis(1, [0.0, 0.0], [0.0, 2.0])
        pts = np.array([[0.0, 0.5], [0.0, 1.5]])
        vals = eb.eval(pts)
        assert vals[:, 0] == pytest.approx([1.0, 1.0])
        assert vals[:, 1] == pytest.approx([-0.25, 0.25])

    def test_dim(self):
        assert EdgeBasis(0, [0, 0], [1, 0]).dim == 1
        assert EdgeBasis(2, [0, 0], [1, 0]).dim == 3
