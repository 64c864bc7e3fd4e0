"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the criterion lines appear in the
terminal summary. ``python tests/test_acceptance.py`` does the same.
"""
import gc
import json
import resource
import sys
import time
from math import factorial
from pathlib import Path

import pytest

from gridcov.assembly import (
    build_covering_complex, compare_counts, predicted_cell_counts, predicted_euler,
)
from gridcov.cellcomplex import euler_characteristic
from gridcov.cli import main as cli_main
from gridcov.errors import Infeasible, Stuck
from gridcov.griddomain import (
    check_area_lemma, crossings, domain_summary, parse_domain, patrol_region, random_domain,
)
from gridcov.homology import betti, boundary_squared_zero, integral_h1_torsion
from gridcov.interval import interval_model
from gridcov.morse import build_matching, free_collapse_schedule, morse_complex, verify_matching
from gridcov.permutahedron import k_skeleton

SUITE = {
    "1x2": "##",
    "1x3": "###",
    "1x4": "####",
    "1x5": "#####",
    "L-tromino": "##\n#.",
    "2x2": "##\n##",
    "2x3": "###\n###",
    "S-tetromino": ".##\n##.",
    "T-tetromino": "###\n.#.",
    "L-tetromino": "###\n#..",
    "2x4": "####\n####",
    "3x3-minus-center": "###\n#.#\n###",
}
TORSION_MAX_A = 4
LINES: list[str] = []


def report(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    LINES.append(line)
    return line


def analyze(name, text):
    """Everything the suite asks of one domain, keeping only small results."""
    g = parse_domain(text, name=name)
    s = domain_summary(g)
    q = patrol_region(g)
    cs = crossings(q)
    t0 = time.perf_counter()
    c = build_covering_complex(g)
    built_chi = euler_characteristic(c)
    build_seconds = time.perf_counter() - t0
    predicted = predicted_cell_counts(s, cs, q)
    chi = predicted_euler(s)
    cmp = compare_counts(c.count_report(), predicted, chi)
    b = betti(c)
    torsion = integral_h1_torsion(c) if g.A <= TORSION_MAX_A else None
    m = build_matching(c, strict=False)
    check = verify_matching(c, m)
    collapsed, remainder_dim = False, None
    morse_betti = None
    if check.valid and check.acyclic:
        morse_betti = morse_complex(c, m).betti
        try:
            sched = free_collapse_schedule(c, m)
        except Stuck:
            pass
        else:
            collapsed = len(sched) == c.n(2)
            remainder_dim = max(int(d) for d, n in sched.remainder.items() if n)
    out = {
        "A": g.A,
        "built_chi": built_chi,
        "predicted_chi": chi,
        "residuals": cmp.residuals,
        "counts_match": cmp.passed,
        "betti": b,
        "torsion": torsion,
        "matching": check.to_dict(),
        "collapsed": collapsed,
        "remainder_dim": remainder_dim,
        "morse_betti": morse_betti,
        "dd_zero": boundary_squared_zero(c),
        "multiplicities": c.multiplicities.ok,
        "build_seconds": build_seconds,
    }
    del c, m
    gc.collect()
    return out


@pytest.fixture(scope="module")
def suite():
    t0 = time.perf_counter()
    results = {name: analyze(name, text) for name, text in SUITE.items()}
    results["_seconds"] = time.perf_counter() - t0
    return results


def _domains(suite):
    return {k: v for k, v in suite.items() if not k.startswith("_")}


def test_criterion_01_square_hand_count():
    g = parse_domain(SUITE["2x2"])
    t0 = time.perf_counter()
    c = build_covering_complex(g)
    chi = euler_characteristic(c)
    seconds = time.perf_counter() - t0
    census, _ = build_covering_complex(g, mode="census")
    k = census.classes()
    got = (chi, k["v"], k["e"], k["sigma_s"], k["sigma_t"])
    ok = got == (-120, 720, 1440, 120, 480) and seconds < 1.0
    report(1, ok, f"2x2 chi={chi} v={k['v']} e={k['e']} sigma_s={k['sigma_s']} "
                  f"sigma_t={k['sigma_t']} build {seconds:.3f}s (< 1 s)")
    assert ok


def test_criterion_02_euler_formula_suite(suite):
    doms = _domains(suite)
    bad = [n for n, r in doms.items()
           if r["built_chi"] != r["predicted_chi"] or not r["counts_match"]]
    seconds = suite["_seconds"]
    peak_gb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 2**20
    ok = not bad and seconds < 300 and peak_gb < 8
    report(2, ok, f"{len(doms) - len(bad)}/{len(doms)} domains exact in chi and all class "
                  f"counts; suite {seconds:.0f}s (< 300 s), peak RSS {peak_gb:.1f} GB (< 8 GB)"
                  + (f"; failing {bad}" if bad else ""))
    assert ok


def test_criterion_03_no_2d_holes_no_torsion(suite):
    doms = _domains(suite)
    b2_bad = [n for n, r in doms.items() if len(r["betti"]) > 2 and r["betti"][2] != 0]
    tiny = {n: r["torsion"] for n, r in doms.items() if r["A"] <= TORSION_MAX_A}
    tor_bad = [n for n, t in tiny.items() if t]
    ok = not b2_bad and not tor_bad and all(t is not None for t in tiny.values())
    report(3, ok, f"b2=0 on {len(doms) - len(b2_bad)}/{len(doms)}; H1 torsion-free on "
                  f"{len(tiny) - len(tor_bad)}/{len(tiny)} domains with A<={TORSION_MAX_A}")
    assert ok


def test_criterion_04_matching_and_collapse(suite):
    doms = _domains(suite)
    bad = []
    for n, r in doms.items():
        m = r["matching"]
        if not (m["valid"] and m["acyclic"] and m["complete"]):
            bad.append(n)
        elif not r["collapsed"] or r["remainder_dim"] > 1:
            bad.append(n)
        elif r["morse_betti"] != r["betti"]:
            bad.append(n)
    ok = not bad
    report(4, ok, f"{len(doms) - len(bad)}/{len(doms)} domains: matching valid, acyclic, "
                  f"complete; collapse leaves dimension <= 1; Morse Betti = direct Betti"
                  + (f"; failing {bad}" if bad else ""))
    assert ok


def test_criterion_05_area_lemma_random():
    t0 = time.perf_counter()
    checked, bad = 0, []
    seed = 0
    while checked < 200:
        A = 1 + seed % 40
        g = seed % 4
        try:
            dom = random_domain(A, g, seed)
        except Infeasible:
            seed += 1
            continue
        s = domain_summary(dom)
        q = patrol_region(dom)
        if s.holes_g != g or not check_area_lemma(s, crossings(q), q).passed:
            bad.append(seed)
        checked += 1
        seed += 1
    seconds = time.perf_counter() - t0
    ok = not bad and seconds < 10
    report(5, ok, f"area identity exact on {checked - len(bad)}/{checked} random domains "
                  f"(A<=40, g<=3) in {seconds:.1f}s (< 10 s)")
    assert ok


def test_criterion_06_interval_models():
    six = interval_model(3, "1/6")
    hexagon = interval_model(3, "1/4")
    full = interval_model(3, "1/2")
    empty = interval_model(3, "1/8")
    four = interval_model(4, "1/6")
    checks = [
        six.counts == {0: 6} and six.betti == [6],
        hexagon.euler == 0 and hexagon.betti == [1, 1],
        full.euler == 1,
        empty.empty,
        four.counts == {0: 24, 1: 36},
    ]
    ok = all(checks)
    report(6, ok, f"{sum(checks)}/5 interval cases (6 points, hexagon, chi=1, empty, four points)")
    assert ok


def test_criterion_07_strips_match_permutahedron(suite):
    rows = []
    for n in range(2, 6):
        r = suite[f"1x{n}"]
        cx = k_skeleton(n + 1, 1).to_complex()
        rows.append((n, r["built_chi"] == euler_characteristic(cx) and r["betti"][:2] == betti(cx)
                     and r["betti"][2:] in ([], [0])))
    ok = all(x for _, x in rows)
    report(7, ok, "1xn strips n=2..5 agree with Skel_1(Pi_n) in chi and Betti: "
                  + ", ".join(f"n={n}:{'ok' if x else 'mismatch'}" for n, x in rows))
    assert ok


def test_criterion_08_three_dimensional():
    pairs = [
        ("#\n\n#", "##"), ("#\n\n#\n\n#", "###"), ("#\n\n#\n\n#\n\n#", "####"),
        ("##\n\n##", "##\n##"),
    ]
    small_ok = []
    for d3, d2 in pairs:
        c3 = build_covering_complex(parse_domain(d3))
        c2 = build_covering_complex(parse_domain(d2))
        small_ok.append(euler_characteristic(c3) == euler_characteristic(c2))
    t0 = time.perf_counter()
    census, mult = build_covering_complex(parse_domain("##\n##\n\n##\n##"), mode="census")
    seconds = time.perf_counter() - t0
    cube_ok = census.euler == -1088640 == (1 - 4) * factorial(9) and mult.ok
    block = parse_domain("\n\n".join(["###\n###\n###"] * 3))
    cavity = parse_domain("\n\n".join(["###\n###\n###", "###\n#.#\n###", "###\n###\n###"]))
    formula_only = {
        "3x3x3": predicted_euler(domain_summary(block)),
        "3x3x3-cavity": predicted_euler(domain_summary(cavity)),
    }
    ok = all(small_ok) and cube_ok and seconds < 900
    report(8, ok, f"1x1xn and 1x2x2 match 2D chi ({sum(small_ok)}/{len(small_ok)}); 2x2x2 census "
                  f"chi={census.euler} in {seconds:.1f}s (< 900 s); formula only, unverified "
                  f"conjecture: {formula_only}")
    assert ok


def test_criterion_09_determinism(tmp_path, capsys):
    dom = tmp_path / "rect.txt"
    dom.write_text(SUITE["2x3"] + "\n")
    outputs = []
    for threads in ("1", "8"):
        art = tmp_path / f"c{threads}.bin"
        cli_main(["build", str(dom), "--threads", threads, "-o", str(art)])
        build_out = capsys.readouterr().out
        code = cli_main(["verify", str(dom), "--threads", threads])
        verify_out = capsys.readouterr().out
        outputs.append((art.read_bytes(), build_out, verify_out, code))
    same = outputs[0][:3] == outputs[1][:3]
    ok = same and outputs[0][3] == 0 and json.loads(outputs[0][2])["pass"]
    report(9, ok, f"2x3 with 1 and 8 threads: complex bytes, build and verify reports "
                  f"{'identical' if same else 'differ'}; verify exit {outputs[0][3]}")
    assert ok


def test_criterion_10_structural_properties(suite):
    doms = _domains(suite)
    dd_bad = [n for n, r in doms.items() if not r["dd_zero"]]
    mult_bad = [n for n, r in doms.items() if not r["multiplicities"]]
    ok = not dd_bad and not mult_bad
    report(10, ok, f"boundary of boundary zero on {len(doms) - len(dd_bad)}/{len(doms)}; "
                   f"emission multiplicities hold on {len(doms) - len(mult_bad)}/{len(doms)}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([str(Path(__file__)), "-q"]))
