"""Smoke test for the compiled `poncelet` extension module.

Build it first:

    cargo build --release -p poncelet-py --features extension-module

The script imports an installed `poncelet` if there is one, otherwise it
loads the freshly built library from target/release.
"""

import importlib.util
import json
import math
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import poncelet
        return poncelet
    except ImportError:
        pass
    for name in ("libponcelet_py.so", "libponcelet_py.dylib", "poncelet_py.dll"):
        lib = ROOT / "target" / "release" / name
        if lib.exists():
            spec = importlib.util.spec_from_file_location("poncelet", lib)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("poncelet extension not found; build it with --features extension-module")


def main():
    pc = load()

    fam = pc.Family("confocal", 2.0, 1.0)
    assert fam.porism_residual(0.3) < 1e-12
    a_c, b_c = fam.caustic
    assert abs(a_c / 2.0 + b_c / 1.0 - 1.0) < 1e-12

    incenter = pc.sweep(fam, center=1)
    assert incenter.kind == "ellipse", incenter
    assert incenter.conic_residual < 1e-7

    x59 = pc.sweep(fam, center=59)
    assert x59.self_intersections >= 1, x59
    arr = pc.arrangement([x59.points])
    assert arr["vertices"] - arr["edges"] + arr["faces"] == 1 + arr["components"]

    x9 = pc.sweep(fam, center=9, samples=64)
    assert x9.kind == "stationary"

    feuerbach = pc.sweep(fam, center=11, refined=True)
    caustic = [(a_c * math.cos(t), b_c * math.sin(t)) for t in (2 * math.pi * i / 720 for i in range(720))]
    assert pc.hausdorff(feuerbach.points, caustic) < 1e-6

    ring = [(2 * math.cos(t), math.sin(t)) for t in (2 * math.pi * i / 100 for i in range(100))]
    assert pc.classify(ring, 2.0)["kind"] == "ellipse"

    blob = pc.encode_state(pc.default_state())
    assert pc.decode_state(blob) == pc.default_state()

    status, ctype, body = pc.dispatch("GET", "/api/centers")
    assert status == 200 and ctype == "application/json"
    assert len(json.loads(body)) == len(pc.centers())

    svg = pc.render(fam, center=2, style="dark_thick", seed=3)
    assert svg.startswith("<svg") or svg.startswith("<?xml")

    try:
        pc.Family("circumcircle", 2.0, 1.0)
    except pc.PonceletError as e:
        assert e.args[0] == "InvalidAspect"
    else:
        raise AssertionError("circumcircle with a != b must fail")

    print("python smoke: ok")


if __name__ == "__main__":
    main()
