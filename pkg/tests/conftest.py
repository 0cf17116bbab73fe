import math

import numpy as np
import pytest

from gcea.nk_landscape import NkLandscape


def make_landscape(neighbors, tables, seed=0):
    """按给定邻居表和适应度表手工构造景观。"""
    n = len(tables)
    neighbors = np.array(neighbors, dtype=np.int64).reshape(n, len(neighbors[0]))
    tables = np.array(tables, dtype=np.float64)
    return NkLandscape(n=n, k=neighbors.shape[1], neighbors=neighbors, tables=tables, seed=seed)


def oracle_evaluate(landscape, genome):
    """逐基因循环的独立实现，用作 evaluate 的参照。"""
    contributions = []
    for i in range(landscape.n):
        index = int(genome[i])
        for j in landscape.neighbors[i]:
            index = index * 2 + int(genome[j])
        contributions.append(float(landscape.tables[i][index]))
    return math.fsum(contributions) / landscape.n


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def hand_landscape():
    """n=3, k=1 的手工景观。"""
    return make_landscape(
        neighbors=[[1], [2], [0]],
        tables=[
            [0.1, 0.2, 0.3, 0.4],
            [0.5, 0.6, 0.7, 0.8],
            [0.9, 0.15, 0.25, 0.35],
        ],
    )


@pytest.fixture
def separable_landscape():
    """k=0，每个基因的表都是 [0.0, 1.0]。"""
    return make_landscape(neighbors=[[] for _ in range(5)], tables=[[0.0, 1.0]] * 5)
