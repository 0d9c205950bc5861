"""Fixtures common for the schanuel tests"""

import os
import random

import pytest

from schanuel.config import Settings
from schanuel.facts import member_e
from schanuel.knowledge import KnowledgeBase
from schanuel.local_store import LocalTraceStore
from schanuel.terms import NodeKind, e, exp, log, product_of, rational, sum_of
from schanuel.trace import ProofTrace


@pytest.fixture(name="settings")
def fixture_settings():
    """Default settings, independent of the environment"""
    return Settings(precision=256, height=10000, depth_budget=4)


@pytest.fixture(name="kb")
def fixture_kb(settings):
    """Empty knowledge base with the core rules"""
    return KnowledgeBase(settings)


@pytest.fixture(name="small_trace")
def fixture_small_trace(kb):
    """One-step trace: e lies in E_1"""
    fact = kb.derive("e-level", member_e(e(), 1))
    return ProofTrace.from_fact(kb, fact, "level")


@pytest.fixture(name="local_store")
def fixture_local_store(tmp_path):
    """Trace store rooted in a temporary folder"""
    return LocalTraceStore(root_path=str(tmp_path))


@pytest.fixture(name="s3_store")
def fixture_s3_store():
    """Trace store on a fresh bucket of the S3 endpoint"""
    s3fs = pytest.importorskip("s3fs")
    if "S3_ENDPOINT" not in os.environ:
        pytest.skip("S3_ENDPOINT is not set")
    # pylint: disable-next=import-outside-toplevel
    from schanuel.s3_store import S3TraceStore
    bucket_name = f"schanuel-test-bucket-{random.randint(0,100000)}"
    store = S3TraceStore(root_path=bucket_name)
    yield store
    s3 = s3fs.S3FileSystem(
        client_kwargs={"endpoint_url": os.environ["S3_ENDPOINT"]}
    )
    s3.rm(bucket_name, recursive=True)


_LEAVES = ("1/2", "2", "3", "7/3")


def random_term(rng: random.Random, depth: int, kind: NodeKind):
    """Random term whose only transcendental nodes are of one kind.

    `kind` is NodeKind.EXP or NodeKind.LOG. Log arguments are sums with a
    constant 2 and positive parts, so they never vanish.
    """
    if depth == 0 or rng.random() < 0.25:
        return rational(rng.choice(_LEAVES))
    pick = rng.random()
    if pick < 0.5:
        inner = random_term(rng, depth - 1, kind)
        if kind is NodeKind.EXP:
            return exp(inner)
        return log(sum_of(rational(2), _positive(rng, depth - 1)))
    children = [random_term(rng, depth - 1, kind)
                for _ in range(rng.randint(2, 3))]
    if pick < 0.8:
        return sum_of(*children)
    return product_of(*children)


def _positive(rng: random.Random, depth: int):
    """Random Log-only term with a positive real value."""
    if depth == 0 or rng.random() < 0.3:
        return rational(rng.choice(_LEAVES))
    pick = rng.random()
    if pick < 0.4:
        return log(sum_of(rational(2), _positive(rng, depth - 1)))
    children = [_positive(rng, depth - 1) for _ in range(rng.randint(2, 3))]
    if pick < 0.7:
        return sum_of(*children)
    return product_of(*children)


@pytest.fixture(name="rng")
def fixture_rng():
    """Seeded random source"""
    return random.Random(20260412)


@pytest.fixture(name="term_factory")
def fixture_term_factory():
    """The random term generator"""
    return random_term


@pytest.fixture(name="store", params=["local_store", "s3_store"])
def fixture_store(request):
    """Parameterize the inherited store tests"""
    return request.getfixturevalue(request.param)


@pytest.fixture(name="loaded_store")
def fixture_loaded_store(store, small_trace):
    """Load the store with 10 traces of the "level" script"""
    store.max_traces_in_script = 10
    for _ in range(store.max_traces_in_script):
        store.publish("level", small_trace)
    yield store
