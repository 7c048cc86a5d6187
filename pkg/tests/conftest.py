import os

import pytest
from hydra import compose, initialize_config_dir
from hydra.core.global_hydra import GlobalHydra

from src.enumeration import clear_cache
from src.families import LabelledGraph
from src.graph import Edge, InfluenceGraph
from src.smsm import CappedSum, Modular, SmsmInstance

CONFIG_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "configs"))


@pytest.fixture(autouse=True)
def _fresh_cache():
    clear_cache()
    yield
    clear_cache()


# ----------------------------------------------------------------------
# Small named graphs
# ----------------------------------------------------------------------

@pytest.fixture
def single_edge():
    """0 -> 1, p = 0.5"""
    return InfluenceGraph(2, (Edge(0, 1, 0.5),))


@pytest.fixture
def chain3():
    """0 -> 1 -> 2, both p = 0.5"""
    return InfluenceGraph(3, (Edge(0, 1, 0.5), Edge(1, 2, 0.5)))


@pytest.fixture
def converging():
    """0 -> 2 and 1 -> 2, both p = 0.5"""
    return InfluenceGraph(3, (Edge(0, 2, 0.5), Edge(1, 2, 0.5)))


@pytest.fixture
def uvw():
    """u=0 -> v=1 with p = 0.5, w=2 isolated"""
    return InfluenceGraph(3, (Edge(0, 1, 0.5),))


@pytest.fixture
def tiny_family(single_edge, chain3, converging, uvw):
    star = InfluenceGraph(3, (Edge(0, 1, 0.3), Edge(0, 2, 0.7)))
    cycle = InfluenceGraph(3, (Edge(0, 1, 0.7), Edge(1, 2, 0.3), Edge(2, 0, 1.0)))
    graphs = {"single_edge": single_edge, "chain3": chain3, "converging": converging, "uvw": uvw,
              "star": star, "cycle": cycle}
    return [LabelledGraph(label, g) for label, g in graphs.items()]


@pytest.fixture
def graph_file(tmp_path):
    def _write(text: str, name: str = "g.txt") -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write


# ----------------------------------------------------------------------
# SMSM
# ----------------------------------------------------------------------

HALF_TWO = ((0.0, 0.5), (2.0, 0.5))


@pytest.fixture
def capped_three():
    """Three items with state 0 or 2 (p = 1/2 each), f = min(sum x, 2), k = 2."""
    return SmsmInstance(3, 2, (HALF_TWO,) * 3, CappedSum([1.0, 1.0, 1.0], 2.0))


@pytest.fixture
def modular_deterministic():
    return SmsmInstance(3, 2, (((1.0, 1.0),), ((3.0, 1.0),), ((2.0, 1.0),)), Modular([1.0, 1.0, 1.0]))


# ----------------------------------------------------------------------
# Hydra
# ----------------------------------------------------------------------

@pytest.fixture
def compose_cfg():
    """Composes configs/main.yaml with overrides; tests always pass out= so paths.* stay unresolved."""
    def _compose(*overrides):
        GlobalHydra.instance().clear()
        with initialize_config_dir(version_base="1.3", config_dir=CONFIG_DIR):
            return compose(config_name="main", overrides=["progress=false", *overrides])
    yield _compose
    GlobalHydra.instance().clear()
