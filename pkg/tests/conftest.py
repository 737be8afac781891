import pytest

from orliczembed.config import config


@pytest.fixture(autouse=True)
def restore_config():
    """Each test starts from the default configuration."""
    saved = dict(vars(config))
    saved["caps"] = dict(config.caps)
    yield config
    vars(config).clear()
    vars(config).update(saved)
