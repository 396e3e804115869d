import pytest

from taas.model import ModelConfig, ProviderStats, StakeholderId, TimeWindowWeights


@pytest.fixture
def cfg():
    return ModelConfig()


@pytest.fixture
def single_window_cfg():
    return ModelConfig(window_weights=TimeWindowWeights((1.0,)))


@pytest.fixture
def mixed_stats():
    # Hand-checked tuple: (0.5 + 0.5 + 2*0.5 - 2*0.5 + 2) / 6 = 0.5
    return ProviderStats(5, 10, 2, 4, 4, 2, 1, 1)


@pytest.fixture
def perfect_stats():
    return ProviderStats(10, 10, 4, 4, 5, 5, 0, 0)


@pytest.fixture
def worst_stats():
    return ProviderStats(0, 10, 0, 4, 5, 0, 3, 2)


@pytest.fixture
def evaluator():
    return StakeholderId("consumer-0", domain="domain-0")


@pytest.fixture
def provider():
    return StakeholderId("prov-000", domain="domain-1")
