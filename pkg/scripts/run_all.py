import importlib.util
import sys
from pathlib import Path

SCRIPTS_DIR = Path(__file__).resolve().parent
ORDER = ("field", "repfn", "fpset", "energy", "lemmas", "harness", "cli")


def _load(name: str):
    path = SCRIPTS_DIR / f"{name}_test.py"
    spec = importlib.util.spec_from_file_location(f"{name}_test", path)
    if spec is None or spec.loader is None:
        raise ImportError(f"cannot load {path}")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main() -> int:
    failed: list[str] = []
    for name in ORDER:
        print(f"[run_all] {name}_test")
        if _load(name).main() != 0:
            failed.append(name)
    if failed:
        print(f"FAIL: {', '.join(failed)}")
        return 1
    print("PASS (all)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
