import numpy as np
import pytest

from wrcsampler.graphs import k2, path_graph, complete_graph, random_instance


@pytest.fixture
def g_k2():
    return k2(beta=2.0, lam=1.0)


@pytest.fixture
def g_k2_third():
    return k2(beta=2.0, lam=1.0 / 3.0)


@pytest.fixture
def g_path3():
    return path_graph(3, beta=2.0, lam=[1.0, 1.0 / 3.0, 1.0 / 3.0])


@pytest.fixture
def g_triangle():
    return complete_graph(3, beta=2.0, lam=1.0)


def make_instances(seed, count, **kwargs):
    gen = np.random.default_rng(seed)
    return [random_instance(gen, **kwargs) for _ in range(count)]
