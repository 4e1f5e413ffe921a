import importlib.util
import os
import stat
from pathlib import Path

import pulp
import pytest


@pytest.fixture
def setup_script():
    spec = importlib.util.spec_from_file_location("cyclewalk_setup", Path(__file__).parents[1] / "setup.py")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


class FakeCbc:
    def __init__(self, path):
        self.path = str(path)


def test_cbc_permissions_follow_the_path_pulp_resolves(setup_script, tmp_path, monkeypatch):
    binary = tmp_path / "cbc"
    binary.write_text("", encoding="utf-8")
    os.chmod(binary, 0o644)
    monkeypatch.setattr(pulp, "PULP_CBC_CMD", lambda: FakeCbc(binary))
    assert setup_script.fix_cbc_permissions()
    assert binary.stat().st_mode & stat.S_IXUSR


def test_missing_cbc_binary_is_reported(setup_script, tmp_path, monkeypatch):
    monkeypatch.setattr(pulp, "PULP_CBC_CMD", lambda: FakeCbc(tmp_path / "absent"))
    assert not setup_script.fix_cbc_permissions()
