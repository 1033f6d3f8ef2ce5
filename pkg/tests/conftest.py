import pytest

from urlsentinel import (
    PipelineConfig,
    SmoteConfig,
    TrainConfig,
    synthetic_corpus,
    train_pipeline,
)


@pytest.fixture(scope="session")
def small_corpus():
    return synthetic_corpus(300, 300, seed=101)


@pytest.fixture(scope="session")
def small_config():
    # light settings so shared fixtures stay fast; defaults are exercised
    # in the acceptance suite
    return PipelineConfig(
        train=TrainConfig(epochs=2),
        smote=SmoteConfig(),
        forest_trees=25,
        seed=101,
    )


@pytest.fixture(scope="session")
def small_bundle(small_corpus, small_config):
    bundle, report = train_pipeline(small_corpus, small_config, created_at="fixed")
    return bundle
