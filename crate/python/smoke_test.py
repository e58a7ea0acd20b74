#!/usr/bin/env python3
"""Smoke test for the pathspace_py extension module.

Build the module first:

    cargo build -p pathspace-python

then run this script from the repository root:

    python3 python/smoke_test.py
"""

import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("debug", "release")
        for name in ("libpathspace_py.so", "pathspace_py.so", "libpathspace_py.dylib")
    ]
    built = next((c for c in candidates if c.exists()), None)
    if built is None:
        sys.exit("pathspace_py not built; run `cargo build -p pathspace-python` first")
    stage = pathlib.Path(tempfile.mkdtemp(prefix="pathspace_py_"))
    shutil.copy(built, stage / "pathspace_py.so")
    sys.path.insert(0, str(stage))
    import pathspace_py

    return pathspace_py


def main():
    ps = load_module()

    e_omega = ps.parse_graph((ROOT / "fixtures" / "e_omega.graph").read_text())
    assert e_omega.validate() == []
    assert not e_omega.is_row_finite()
    assert e_omega.singular_vertices() == ["v", "w"]
    assert e_omega.in_degree("v") is None  # infinite receiver
    assert e_omega.in_degree("w") == 0
    assert e_omega.paths("v", 1, limit=3) == ["e[1]", "e[2]", "e[3]"]

    # Desingularise, collapse back, and confirm the round trip.
    f_graph, tails = e_omega.desingularise()
    assert f_graph.is_row_finite()
    assert f_graph.singular_vertices() == []
    assert sorted(tails) == ["t_v", "t_w"]
    for tail in tails:
        report = f_graph.check_collapsible_tail(tail)
        assert all(passes for passes, _ in report.values()), report
    cmap = f_graph.collapse(tails)
    assert e_omega.iso(cmap.collapsed()) is not None

    # The path correspondence on the explicit fixture.
    f_omega = ps.parse_graph((ROOT / "fixtures" / "f_omega.graph").read_text())
    m = f_omega.collapse(["tv", "tw"])
    assert m.phi("tv#1.e[1]") == "e_tv[1]"
    assert m.phi_inv("e_tv[3]") == "tv#1.tv#2.tv#3.e[3]"
    assert m.phi_inf("v@tv") == "v"
    assert m.phi_inf_inv("e_tv[1]") == "tv#1.e[1]@tw"
    assert m.witness_image("v", "v@tv", forbid=["e_tv[1]"]) == "tv#1.tv#2"
    assert m.witness_preimage("tv#1.tv#2", "v") == "Z(v \\ {e_tv[1]})"
    assert m.diagram_check("tv#1.e[1]@tw", "e_tv[1]")
    assert m.pi_reduce("tv#1") == "(1)*P(v)"
    assert m.compress("tv#1") == "(1)*P(tv#1)"

    # Collapsibility verdicts on the worked example.
    f_ex = ps.parse_graph((ROOT / "fixtures" / "f_ex.graph").read_text())
    cycle_report = f_ex.check_collapsible("v~(nu1.g.f)")
    assert cycle_report["C4"][0] is False
    entered_report = f_ex.check_collapsible("nu1.nu2@nu")
    assert entered_report["C5"][0] is False and entered_report["C4"][0] is True

    # Exact diagonal arithmetic.
    e_ex = ps.parse_graph((ROOT / "fixtures" / "e_ex.graph").read_text())
    assert e_ex.diag_mul("1*P(nu1)", "1*P(nu1.g)") == "(1)*P(nu1.g)"
    assert e_ex.diag_norm_sq("1*P(v) - 1*P(nu1.nu2)") == "1"
    assert e_ex.diag_is_zero("1*P(v) - 1*P(nu1)")
    assert e_ex.diag_eval("v~(nu1.g.f)", "1*P(v) - 1*P(nu1.nu2)") == "1"
    q, alive = ps.q_projection(e_ex, ["v", "nu1"], "v")
    assert "(-1)*P(nu1)" in q and not alive

    # Topology helpers.
    assert e_ex.member("v~(nu1.g.f)", "nu1.g")
    assert not e_ex.member("nu1.nu2", "nu1", forbid=["nu2"])
    assert e_ex.refine("v", ["nu1.nu2"], "nu1") == "Z(nu1 \\ {nu2})"

    print("smoke test: OK")


if __name__ == "__main__":
    main()
