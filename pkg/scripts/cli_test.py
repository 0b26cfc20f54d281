import contextlib
import io
import json
import sys
import tempfile
from pathlib import Path

ROOT_DIR = Path(__file__).resolve().parents[1]
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))

from core.runtime import run
from plugin_manager.manager import PluginManager


def invoke(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stderr(err), contextlib.redirect_stdout(io.StringIO()):
        code = run(list(argv), stdout=out)
    return code, out.getvalue(), err.getvalue()


def main() -> int:
    mgr = PluginManager(plugins_dir=ROOT_DIR / "plugins")
    ok, msg = mgr.load("sumset")
    if not ok or "sumset" not in mgr.commands:
        print(f"FAIL (load): {msg}")
        return 1
    ok, _ = mgr.load("sumset")
    if ok:
        print("FAIL (double load accepted)")
        return 1
    ok, msg = mgr.unload("sumset")
    if not ok or "sumset" in mgr.commands:
        print(f"FAIL (unload): {msg}")
        return 1
    ok, msg = mgr.load("missing")
    if ok:
        print("FAIL (missing plugin loaded)")
        return 1
    results = mgr.load_all()
    expected = {"cover", "energy", "fit", "sumset", "sweep", "verify"}
    if set(mgr.commands) != expected or not all(ok for _, ok, _ in results):
        print(f"FAIL (load_all): {results}")
        return 1

    code, out, _ = invoke("sumset", "--p", "7", "--x", "1,2", "--y", "3,4")
    if code != 0 or out != '{"p":7,"elements":[4,5,6]}\n':
        print(f"FAIL (sumset): code={code} out={out!r}")
        return 1
    code, out, err = invoke("sumset", "--p", "7", "--x", "99999999999999999999", "--y", "1")
    if code != 0 or out != '{"p":7,"elements":[2]}\n':
        print(f"FAIL (sumset wide literal): code={code} out={out!r} err={err!r}")
        return 1
    code, out, _ = invoke("sumset", "--p", "5", "--x", "0,1", "--y", "0,1", "--op", "quotient")
    if code != 0 or json.loads(out)["elements"] != [0, 1, 4]:
        print(f"FAIL (sumset quotient): {out!r}")
        return 1

    code, out, _ = invoke("energy", "--p", "5", "--a", "0,1", "--b", "1,2", "--shift-sum")
    payload = json.loads(out) if code == 0 else {}
    if payload.get("S") != 10 or payload.get("normalized") != "5/8" or payload.get("p") != 5:
        print(f"FAIL (energy): code={code} out={out!r}")
        return 1
    code, out, _ = invoke("energy", "--p", "5", "--a", "0,1", "--b", "0,1")
    if code != 0 or json.loads(out) != {"p": 5, "EA_add": 6, "E_mul": 10, "S": None, "normalized": None}:
        print(f"FAIL (energy without shift sum): {out!r}")
        return 1

    code, out, _ = invoke("verify", "cover", "--p", "101", "--x1", "0..10", "--x2", "0,1", "--eps", "1/100")
    report = json.loads(out) if code == 0 else {}
    if not report.get("holds") or len(report["witness"]["translates"]) != 5:
        print(f"FAIL (verify cover): code={code} out={out!r}")
        return 1
    code, out, _ = invoke("cover", "--p", "101", "--x1", "0..10", "--x2", "0,1", "--eps", "1/100")
    if code != 0 or json.loads(out)["translates"] != [0, 2, 4, 6, 8]:
        print(f"FAIL (cover): {out!r}")
        return 1

    targets = [
        ("ruzsa3", "--p", "101", "--x", "0..5", "--y", "0..5", "--z", "0..5"),
        ("ruzsaK", "--p", "101", "--y", "0..5", "--x", "0..5", "--x", "0..5"),
        ("dilate", "--p", "7", "--x", "0,1", "--y", "0,1", "--g", "1..7"),
        ("quotient", "--p", "11", "--x", "0,1", "--y", "0,1"),
        ("quotient", "--p", "11", "--x", "0,1", "--y", "0,1", "--xi", "1"),
        ("bsg", "--p", "5", "--a", "0..5", "--b", "0..5", "--k", "1", "--a-prime", "0..5", "--b-prime", "0..5", "--q", "5"),
        ("popular", "--p", "13", "--a", "0..4", "--b", "0..4", "--k", "2"),
        ("ceiling", "--p", "101", "--a", "0..6", "--b", "1,2,3"),
    ]
    for argv in targets:
        code, out, err = invoke("verify", *argv)
        if code != 0 or not json.loads(out)["holds"]:
            print(f"FAIL (verify {argv[0]}): code={code} out={out!r} err={err!r}")
            return 1
    code, out, _ = invoke("verify", "dilate", "--p", "7", "--x", "0,1", "--y", "0,1", "--g", "1..7")
    if json.loads(out)["witness"]["xi"] != 2:
        print(f"FAIL (verify dilate xi): {out!r}")
        return 1
    code, out, _ = invoke(
        "verify", "bsg", "--p", "101", "--a", "0..101", "--b", "0..101", "--k", "1",
        "--a-prime", "0..101", "--b-prime", "empty", "--q", "101",
    )
    if code != 0 or json.loads(out)["holds"] or json.loads(out)["checks"]["B_prime_size"]:
        print(f"FAIL (verify bsg empty B'): {out!r}")
        return 1
    code, out, _ = invoke("verify", "shifts", "--p", "5", "--a", "0,1", "--b", "1,2", "--tau", "5")
    if code != 0 or json.loads(out)["elements"] != [1]:
        print(f"FAIL (verify shifts): {out!r}")
        return 1
    code, out, _ = invoke("verify", "garaev", "--p", "101", "--a", "1..11", "--b", "1..11")
    if code != 0 or json.loads(out)["L"] != "10/1" or json.loads(out)["empirical_C"] <= 0:
        print(f"FAIL (verify garaev): {out!r}")
        return 1

    first = invoke("energy", "--p", "1009", "--a", "random:40,seed=3", "--b", "subgroup:16", "--shift-sum")
    second = invoke("energy", "--p", "1009", "--a", "random:40,seed=3", "--b", "subgroup:16", "--shift-sum")
    if first[0] != 0 or first[1] != second[1]:
        print("FAIL (determinism)")
        return 1

    failures = [
        ("unknown subcommand", ("frobnicate",), 1, "usage"),
        ("unknown flag", ("sumset", "--p", "7", "--x", "1", "--bogus", "2"), 1, "usage"),
        ("non-prime", ("sumset", "--p", "8", "--x", "1", "--y", "2"), 1, "error: contract:"),
        ("empty set", ("energy", "--p", "5", "--a", "", "--b", "1"), 1, "error: precondition:"),
        ("bad setspec", ("sumset", "--p", "7", "--x", "1,,q", "--y", "1"), 1, "error: setspec:"),
        ("quotient |Y|=1", ("sumset", "--p", "7", "--x", "1", "--y", "2", "--op", "quotient"), 1, "error: contract:"),
        ("missing input", ("fit", "--in", "/nonexistent/records.csv"), 2, "error: io:"),
        ("missing config", ("sweep", "--config", "/nonexistent/sweep.env"), 2, "error: io:"),
        ("thm3 ratio", ("sweep", "--primes", "1009", "--alpha", "1", "--beta", "1/10"), 1, "error: config:"),
    ]
    for label, argv, expected_code, marker in failures:
        code, _, err = invoke(*argv)
        if code != expected_code or marker not in err:
            print(f"FAIL ({label}): code={code} err={err!r}")
            return 1
    code, out, _ = invoke("verify", "--help")
    if code != 0:
        print(f"FAIL (help): code={code}")
        return 1

    with tempfile.TemporaryDirectory() as tmp:
        out_path = str(Path(tmp) / "records.csv")
        code, out, err = invoke(
            "sweep", "--primes", "101,257,1009", "--alpha", "1/2", "--beta", "1/2", "--seeds", "0..4", "--out", out_path
        )
        if code != 0 or json.loads(out)["records"] != 12 or not Path(out_path + ".meta.json").is_file():
            print(f"FAIL (sweep out): code={code} out={out!r} err={err!r}")
            return 1
        code, stdout_csv, _ = invoke("sweep", "--primes", "101,257,1009", "--alpha", "1/2", "--beta", "1/2", "--seeds", "0..4")
        if code != 0 or stdout_csv != Path(out_path).read_text(encoding="utf-8"):
            print("FAIL (sweep stdout matches file)")
            return 1
        code, out, _ = invoke("fit", "--in", out_path)
        fit = json.loads(out) if code == 0 else {}
        if fit.get("n_points") != 3 or not fit.get("slope", 0) < 0:
            print(f"FAIL (fit): code={code} out={out!r}")
            return 1

    print("PASS")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
