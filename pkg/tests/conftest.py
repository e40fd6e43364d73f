"""Shared fixtures: the reference dataset/store, templates, trace recording.

Every pipeline trace produced anywhere in the suite is recorded through the
orchestrator's observer hook; the acceptance module (forced to run last)
sweeps the registry to check the no-unvalidated-execution invariant over
the whole session.
"""

from __future__ import annotations

import pytest

from tpgpt.bench import build_tasks, reference_dataset
from tpgpt.fewshot import starter_repository
from tpgpt.gateway import TrafficStore
from tpgpt.llm import HashingEmbedder
from tpgpt.orchestrator import (
    register_trace_observer,
    unregister_trace_observer,
)
from tpgpt.prompts import TemplateSet

ALL_TRACES: list = []


def pytest_collection_modifyitems(config, items):
    # The acceptance sweep must observe traces from the rest of the suite.
    items.sort(key=lambda item: 1 if "test_acceptance" in item.nodeid else 0)


@pytest.fixture(scope="session", autouse=True)
def _record_traces():
    register_trace_observer(ALL_TRACES.append)
    yield
    unregister_trace_observer(ALL_TRACES.append)


@pytest.fixture(scope="session")
def ref_dataset():
    return reference_dataset()


@pytest.fixture(scope="session")
def ref_store(ref_dataset):
    store = TrafficStore()
    store.load_dataset(ref_dataset)
    return store


@pytest.fixture(scope="session")
def ref_tasks(ref_dataset, ref_store):
    return build_tasks(ref_dataset, ref_store)


@pytest.fixture(scope="session")
def embedder():
    return HashingEmbedder()


@pytest.fixture(scope="session")
def templates(ref_store):
    return TemplateSet.load(ref_store.catalog)


@pytest.fixture(scope="session")
def starter_repo(embedder, ref_store):
    return starter_repository(embedder, ref_store.catalog)
