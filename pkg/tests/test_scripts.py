import importlib.util
from pathlib import Path

import pytest

SCRIPTS_DIR = Path(__file__).resolve().parents[1] / "scripts"
ORDER = ("field", "repfn", "fpset", "energy", "lemmas", "harness", "cli")


def _load(name: str):
    path = SCRIPTS_DIR / f"{name}_test.py"
    spec = importlib.util.spec_from_file_location(f"scripts_{name}_test", path)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


@pytest.mark.parametrize("name", ORDER)
def test_script(name):
    assert _load(name).main() == 0
