import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from slworkbench.datagen import CorpusSpec, generate
from slworkbench.kg import KnowledgeGraph


@pytest.fixture
def mini5():
    """The five-entity worked example used throughout the metapath specs."""
    kg = KnowledgeGraph()
    for g in ("CDK1", "FARSA", "OR1A1"):
        kg.add_entity(g, "Gene", g)
    for b in ("SPS", "DNAREP"):
        kg.add_entity(b, "BP", b)
    t = {}
    t["t1"] = kg.add_triple("FARSA", "involved_in", "SPS")
    t["t2"] = kg.add_triple("OR1A1", "involved_in", "SPS")
    t["t3"] = kg.add_triple("CDK1", "SL_GsG", "FARSA")
    t["t4"] = kg.add_triple("CDK1", "involved_in", "DNAREP")
    return kg, t


SMALL_SPEC = CorpusSpec(
    genes=60,
    bps=30,
    pathways=8,
    mfs=6,
    ccs=6,
    cluster_size=15,
    cluster_bp_pool=6,
    bps_per_gene=4,
    seed=7,
    seq_len=120,
)


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus_small")
    manifest = generate(SMALL_SPEC, out)
    return out, manifest


@pytest.fixture(scope="session")
def default_corpus(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus_default")
    manifest = generate(CorpusSpec(), out)
    return out, manifest
