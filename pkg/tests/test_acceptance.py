"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected into ``RESULTS`` and repeated in the terminal
summary by ``conftest.pytest_terminal_summary``.
"""

import math
import time
from dataclasses import replace

import numpy as np

from atomgates.cli import main
from atomgates.core import (
    PulseTrain,
    axis_angle_of_train,
    cumulative_sums,
    is_unitary,
    propagate_product,
    propagate_summed,
    su2_from_axis_angle,
)
from atomgates.cost import (
    GateKind,
    analytic_gradient,
    closed_form_cost,
    finite_difference_gradient,
    gradient_relative_error,
    random_train,
    trace_fidelity,
)
from atomgates.interferometer import MzSequence, fringe_scan, output_probabilities, phase_grid
from atomgates.io import PhaseValidityError, parse_config
from atomgates.optimizer import run_sequential_sgd
from conftest import random_trains, unitary_dist

RESULTS = {}

PRINTED_MIRROR = np.array([[0.0239 - 0.0994j, 0.9947j], [0.9947j, 0.0239 + 0.0994j]])
PRINTED_BS = np.array([[0.704 - 0.07j, 0.707j], [0.707j, 0.704 + 0.07j]])


def report(number, title, checks):
    """Record and print the verdict, then fail the test on any failed check."""
    failed = [name for name, ok in checks if not ok]
    line = f"criterion {number} ({title}): {'PASS' if not failed else 'FAIL'}"
    if failed:
        line += " [" + "; ".join(failed) + "]"
    RESULTS[number] = line
    print(line)
    assert not failed, line


def test_criterion_1_mirror(mirror_config_path):
    cfg = parse_config(mirror_config_path).config
    t0 = time.perf_counter()
    rec = run_sequential_sgd(cfg)
    elapsed = time.perf_counter() - t0
    u = rec.final_unitary
    report(1, "mirror reproduction", [
        (f"f_trace {rec.final.f_trace:.6f} >= 0.995", rec.final.f_trace >= 0.995),
        (f"steps {rec.steps_used} <= 100", rec.converged and rec.steps_used <= 100),
        (f"wall time {elapsed:.3f}s < 1s", elapsed < 1.0),
        ("|off-diagonal| >= 0.99", min(abs(u[0, 1]), abs(u[1, 0])) >= 0.99),
    ])


def test_criterion_2_beam_splitter(bs_config_path):
    rec = run_sequential_sgd(parse_config(bs_config_path).config)
    mags = np.abs(rec.final_unitary)
    report(2, "beam-splitter reproduction", [
        (f"f_trace {rec.final.f_trace:.6f} >= 0.998", rec.final.f_trace >= 0.998),
        (f"steps {rec.steps_used} <= 60", rec.converged and rec.steps_used <= 60),
        ("all |entries| within 0.02 of 1/sqrt2", bool(np.all(np.abs(mags - 1 / math.sqrt(2)) <= 0.02))),
    ])


def test_criterion_3_fidelity_convention():
    fm = trace_fidelity(GateKind.MIRROR, PRINTED_MIRROR).f_trace
    fb = trace_fidelity(GateKind.BEAM_SPLITTER, PRINTED_BS).f_trace
    report(3, "fidelity convention", [
        (f"mirror {fm:.5f} = 0.9947 +- 5e-4", abs(fm - 0.9947) <= 5e-4),
        (f"beam splitter {fb:.5f} = 0.9978 +- 5e-4", abs(fb - 0.9978) <= 5e-4),
    ])


def test_criterion_4_gradient():
    checks = []
    for target in GateKind:
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(100):
            train = random_train(rng, 1e-6)
            k = len(train) - 1
            s_om, s_de = cumulative_sums(train, k)
            assert math.hypot(s_om, s_de) > 0.1 / train.dt
            err = gradient_relative_error(analytic_gradient(target, train, k),
                                          finite_difference_gradient(target, train, k))
            worst = max(worst, err)
        checks.append((f"{target.value} max rel error {worst:.2e} <= 1e-6", worst <= 1e-6))
    report(4, "gradient property", checks)


def test_criterion_5_algebra():
    rng = np.random.default_rng(5)
    cost_err = recon_err = unit_err = 0.0
    for train in random_trains(rng, 1000):
        k = len(train) - 1
        u = propagate_summed(train, k)
        recon_err = max(recon_err, unitary_dist(u, su2_from_axis_angle(axis_angle_of_train(train, k))))
        unit_err = max(unit_err, unitary_dist(u.conj().T @ u, np.eye(2)),
                       unitary_dist(propagate_product(train, k).conj().T @ propagate_product(train, k), np.eye(2)))
        for target in GateKind:
            cost_err = max(cost_err, abs(closed_form_cost(target, train, k) - trace_fidelity(target, u).cost))
    const_err = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 40))
        om, de = rng.normal(0, 2e6 / math.sqrt(n), 2)
        train = PulseTrain(1e-6, float(rng.uniform(-math.pi, math.pi)), [om] * n, [de] * n)
        const_err = max(const_err, unitary_dist(propagate_summed(train, n - 1), propagate_product(train, n - 1)))
    report(5, "algebraic equivalences", [
        (f"closed-form vs trace cost {cost_err:.1e}", cost_err <= 1e-12),
        (f"axis-angle reconstruction {recon_err:.1e}", recon_err <= 1e-12),
        (f"summed vs product on constant trains {const_err:.1e}", const_err <= 1e-12),
        (f"unitarity {unit_err:.1e}", unit_err <= 1e-12 and is_unitary(u)),
    ])


def test_criterion_6_interferometer(mirror_config_path, bs_config_path):
    grid = phase_grid(101)
    ideal = fringe_scan(MzSequence.ideal(), grid)
    fringe_err = max(abs(p - (1 - math.cos(x)) / 2) for x, p in zip(ideal.phases, ideal.transfer_probabilities))
    cons_err = max(abs(sum(output_probabilities(MzSequence.ideal(x))) - 1) for x in grid)
    mirror = run_sequential_sgd(parse_config(mirror_config_path).config)
    bs = run_sequential_sgd(parse_config(bs_config_path).config)
    real_seq = MzSequence(bs.final_unitary, mirror.final_unitary)
    real = fringe_scan(real_seq, grid)
    cons_real = max(abs(sum(output_probabilities(replace(real_seq, phase=x))) - 1) for x in grid)
    report(6, "interferometer", [
        (f"ideal fringe error {fringe_err:.1e} <= 1e-12", fringe_err <= 1e-12),
        (f"ideal visibility {ideal.visibility:.12f}", abs(ideal.visibility - 1) <= 1e-9),
        (f"conservation {max(cons_err, cons_real):.1e} <= 1e-12", max(cons_err, cons_real) <= 1e-12),
        (f"optimized visibility {real.visibility:.5f} >= 0.98", real.visibility >= 0.98),
    ])


def _snapshot(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir()) if p.is_file()}


def _run_all(out, mirror_cfg, bs_cfg, capsys):
    out.mkdir()
    codes = [
        main(["optimize", "--config", str(mirror_cfg), "--out-dir", str(out), "--figures"]),
        main(["optimize", "--config", str(bs_cfg), "--out-dir", str(out), "--figures"]),
        main(["fringe", "--bs-record", str(out / "bs_record.json"), "--mirror-record",
              str(out / "mirror_record.json"), "--out", str(out / "fringe.csv"), "--figures"]),
        main(["fringe", "--ideal", "--out", str(out / "fringe_ideal.csv")]),
        main(["export-bloch", "--record", str(out / "mirror_record.json"), "--out", str(out / "bloch.csv"),
              "--figures"]),
        main(["gradcheck", "--trials", "100", "--seed", "3"]),
    ]
    (out / "gradcheck.txt").write_text(capsys.readouterr().out.replace(str(out), "<out>"))
    return codes


def test_criterion_7_determinism(tmp_path, mirror_config_path, bs_config_path, capsys):
    codes_a = _run_all(tmp_path / "a", mirror_config_path, bs_config_path, capsys)
    codes_b = _run_all(tmp_path / "b", mirror_config_path, bs_config_path, capsys)
    a, b = _snapshot(tmp_path / "a"), _snapshot(tmp_path / "b")
    differing = sorted(name for name in a if a[name] != b.get(name))
    report(7, "determinism", [
        (f"exit codes {codes_a}", codes_a == codes_b == [0] * 6),
        (f"{len(a)} files produced", len(a) >= 12 and set(a) == set(b)),
        (f"differing files {differing}", not differing),
    ])


def test_criterion_8_phase_constraint(tmp_path, mirror_config_path):
    text = mirror_config_path.read_text()
    flat = tmp_path / "flat.json"
    flat.write_text(text.replace('"phi": 0.0', f'"phi": {math.pi / 2!r}'))
    try:
        parse_config(flat)
        rejected = False
    except PhaseValidityError:
        rejected = True
    cli_code = main(["optimize", "--config", str(flat), "--out-dir", str(tmp_path)])
    checks = [("phi = pi/2 rejected", rejected and cli_code == 1)]
    for sign in (1, -1):
        path = tmp_path / f"near_{sign}.json"
        path.write_text(text.replace('"phi": 0.0', f'"phi": {math.pi / 2 + sign * 1e-3!r}'))
        cfg = replace(parse_config(path, force_phase=True).config, max_steps=100)
        rec = run_sequential_sgd(cfg)
        low = min(e.cost for e in rec.entries)
        checks.append((f"phi = pi/2 {'+' if sign > 0 else '-'} 1e-3: min cost {low:.8f} over {rec.steps_used} steps",
                       rec.steps_used == 100 and low >= 1 - 1e-5))
    report(8, "phase constraint", checks)

