from pathlib import Path

import pytest

from ctbduel.config import load_config

CONFIGS = sorted((Path(__file__).resolve().parents[1] / "configs").glob("*.yaml"))


@pytest.mark.parametrize("path", CONFIGS, ids=lambda p: p.name)
def test_shipped_config_loads(path):
    cfg = load_config(path)
    assert cfg.horizon == 500 and cfg.checkpoints == (100, 200, 300, 400, 500)
