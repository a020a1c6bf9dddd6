"""Smoke test for the pyhankel extension.

Build first:  cargo build -p hankel-spectral-py --release
Then run:     python3 python/smoke_test.py   (or pytest python/)

PYHANKEL_LIB overrides the path of the built shared library.
"""

import importlib.machinery
import importlib.util
import json
import os
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    default = ROOT / "target" / "release" / "libpyhankel.so"
    path = os.environ.get("PYHANKEL_LIB", str(default))
    loader = importlib.machinery.ExtensionFileLoader("pyhankel", path)
    spec = importlib.util.spec_from_file_location("pyhankel", path, loader=loader)
    module = importlib.util.module_from_spec(spec)
    loader.exec_module(module)
    return module


ph = load()

# u = 3 / (2 - z): levels s = 2 (H), s~ = 1 (K).
RATIONAL = json.dumps({
    "s": [2.0], "s_tilde": [1.0],
    "psi": [{"phase": 0.0, "zeros": [], "atoms": []}],
    "psi_tilde": [{"phase": 0.0, "zeros": [], "atoms": []}],
})


def test_synthesize_rational():
    c = ph.synthesize(RATIONAL, 64)
    assert len(c) == 64
    for n in range(10):
        assert abs(c[n] - 1.5 / 2**n) < 1e-12


def test_evaluate_matches_closed_form():
    for z in (0.0, 0.5j, -0.3 + 0.2j, 1j):
        (u,) = ph.evaluate(RATIONAL, [z])
        assert abs(u - 3 / (2 - z)) < 1e-13


def test_analyze_and_roundtrip():
    c = ph.synthesize(RATIONAL, 64, keep_section=True)
    report = json.loads(ph.analyze(c, 64))
    assert abs(report["sigma_h"][0]["level"] - 2.0) < 1e-9
    assert abs(report["sigma_k"][0]["level"] - 1.0) < 1e-9
    rt = json.loads(ph.roundtrip(RATIONAL, 64))
    assert rt["passed"]


def test_weights_and_errors():
    tau_sq, kappa_sq = ph.cauchy_weights([2.0], [1.0])
    assert abs(tau_sq[0] - 3.0) < 1e-12 and abs(kappa_sq[0] - 3.0) < 1e-12
    try:
        ph.cauchy_weights([1.0], [2.0])
    except ValueError as e:
        assert str(e).startswith("InvalidSpectrum")
    else:
        raise AssertionError("non-interlaced spectrum accepted")
    try:
        ph.analyze([0j, 0j])
    except ValueError as e:
        assert str(e).startswith("EmptySpectrum")
    else:
        raise AssertionError("zero symbol accepted")


def test_verify_small():
    results = json.loads(ph.verify(seed=3, trials=2, max_n=3, max_degree=2, max_order=64))
    assert len(results) >= 19
    assert all(r["passed"] for r in results)


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"ok  {name}")
