import math

import numpy as np
import pytest

from gcea.benchmarks import (FUNCTIONS, Direction, ObjectiveFunction, dixon_price,
                             rastrigin, rosenbrock, sphere, to_fitness)
from gcea.errors import DimensionError, ParameterError


def test_sphere_values():
    assert sphere(np.zeros(4)) == 0.0
    assert sphere([1.0, -1.0, 0.5]) == 2.25


def test_rastrigin_minimum_and_each_term_non_negative():
    assert rastrigin(np.zeros(10)) == pytest.approx(0.0, abs=1e-12)
    assert rastrigin([0.5]) == pytest.approx(0.25 + 20.0)
    rng = np.random.default_rng(3)
    for x in rng.uniform(-1, 1, size=(50, 6)):
        assert rastrigin(x) >= 0.0


def test_rosenbrock_values():
    assert rosenbrock(np.ones(5)) == 0.0
    assert rosenbrock([0.0, 0.0]) == 1.0
    assert rosenbrock([0.0, 1.0]) == 101.0


def test_dixon_price_values():
    assert dixon_price([1.0, 0.0]) == pytest.approx(2.0)
    optimum = [2.0 ** (-(2 ** i - 2) / 2 ** i) for i in range(1, 4)]
    assert dixon_price(optimum) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("name", ["rosenbrock", "dixon_price"])
def test_overlapping_functions_need_two_dimensions(name):
    with pytest.raises(DimensionError):
        FUNCTIONS[name]([0.3])
    with pytest.raises(DimensionError):
        ObjectiveFunction(name, 1)


def test_objective_function_checks_length_and_name():
    objective = ObjectiveFunction("sphere", 3)
    assert objective([1.0, 1.0, 1.0]) == 3.0
    with pytest.raises(DimensionError):
        objective([1.0, 1.0])
    with pytest.raises(ParameterError):
        ObjectiveFunction("ackley", 3)


def test_to_fitness_direction():
    assert to_fitness(2.5, Direction.MINIMISE) == -2.5
    assert to_fitness(2.5, Direction.MAXIMISE) == 2.5
    assert to_fitness(0.0, "minimise") == 0.0
    assert math.copysign(1.0, to_fitness(1.0, "minimise")) < 0


def test_functions_match_plain_formulas():
    rng = np.random.default_rng(17)
    plain = {
        "sphere": lambda x: sum(v * v for v in x),
        "rastrigin": lambda x: 10 * len(x) + sum(v * v - 10 * math.cos(2 * math.pi * v) for v in x),
        "rosenbrock": lambda x: sum(100 * (x[i + 1] - x[i] ** 2) ** 2 + (1 - x[i]) ** 2
                                    for i in range(len(x) - 1)),
        "dixon_price": lambda x: (x[0] - 1) ** 2 + sum((i + 1) * (2 * x[i] ** 2 - x[i - 1]) ** 2
                                                       for i in range(1, len(x))),
    }
    for name, formula in plain.items():
        for x in rng.uniform(-1, 1, size=(1000, 5)):
            assert FUNCTIONS[name](x) == pytest.approx(formula(x.tolist()), abs=1e-12, rel=1e-12)


def test_rastrigin_and_dixon_price_reference_points():
    assert rastrigin(np.ones(4)) == pytest.approx(4.0, abs=1e-9)
    assert dixon_price([1.0, 2.0 ** -0.5]) == pytest.approx(0.0, abs=1e-12)
    assert dixon_price([0.0, 0.0]) == 1.0


@pytest.mark.parametrize("func,term", [
    (sphere, lambda v: v * v),
    (rastrigin, lambda v: v * v - 10.0 * math.cos(2.0 * math.pi * v) + 10.0),
])
def test_separable_functions_change_by_one_term(func, term):
    rng = np.random.default_rng(17)
    x = rng.uniform(-1, 1, size=8)
    base = func(x)
    for i in range(8):
        moved = x.copy()
        moved[i] = rng.uniform(-1, 1)
        assert func(moved) - base == pytest.approx(term(moved[i]) - term(x[i]), abs=1e-9)
