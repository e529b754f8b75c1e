import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import HealthCheck, settings

from csrnet.graph import BipartiteGraph

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def dense_graph(m) -> BipartiteGraph:
    return BipartiteGraph.from_biadjacency(sp.csr_matrix(np.asarray(m, dtype=np.int8)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
