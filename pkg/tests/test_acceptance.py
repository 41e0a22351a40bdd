"""End-to-end acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line; the lines are
also repeated in the pytest terminal summary. Run on its own with
``pytest tests/test_acceptance.py -v``.
"""

import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from ruledform.ambient import coincide_residual
from ruledform.curves import CurveFamily, FamilyKind, spine_curvature_closed, spine_curvature_numeric
from ruledform.groups import equivariance_residuals
from ruledform.ruled import HyperPoint, shape_closed
from ruledform.verify import (FdConfig, default_families, default_w_box, fixed_point_check,
                              fixed_point_vectors, frame_derivative_check,
                              frame_identity_residuals, gamma_curvature_check,
                              group_algebra_residual, hopf_violation, immersion_rank_check,
                              known_fixed_point, numeric_shape_prime_batch, ratio_constancy,
                              resolve_orientation, rigged_curve, ruled_residual,
                              ruling_contains_residual, sample_points, shape_prime_residual,
                              sign_dichotomy)

FAMILIES = default_families(1.0)
SEED = 20240611


def report(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def _samples(fam, n, salt):
    return sample_points(fam, n, [SEED, salt, list(FamilyKind).index(fam.kind)])


def test_criterion_01_shape_operator_oracle():
    start = time.perf_counter()
    worst = 0.0
    for fam in FAMILIES:
        th, s, w = _samples(fam, 100, 1)
        num = numeric_shape_prime_batch(fam, th, s, w)
        for k in range(100):
            closed = shape_closed(fam, HyperPoint(th[k], s[k], w[k])).A_prime
            worst = max(worst, shape_prime_residual(num[k], closed))
    elapsed = time.perf_counter() - start
    report(1, worst <= 1e-6 and elapsed <= 30.0,
           f"max relative entry error {worst:.2e} (tol 1e-6, floor 1e-9), {elapsed:.1f} s (limit 30 s)")


def test_criterion_02_ruled_and_hopf():
    ruled = 0.0
    hopf_err = 0.0
    for fam in FAMILIES:
        th, s, w = _samples(fam, 100, 1)
        num = numeric_shape_prime_batch(fam, th, s, w)
        ruled = max(ruled, max(ruled_residual(A) for A in num))
        m = 0.5 if fam.cfg.epsilon_tilde == 1 else 1.5
        ws = np.array([m, -m, 1j * m, -1j * m])
        hopf_err = max(hopf_err, abs(hopf_violation(fam, (s[:4], ws)) - m / fam.r))
    report(2, ruled <= 1e-6 and hopf_err == 0.0,
           f"ruled residual {ruled:.2e} (tol 1e-6); min|beta| - |w|/r = {hopf_err:g} (exact)")


def test_criterion_03_frame_identities():
    worst = {}
    for fam in FAMILIES:
        th, s, w = _samples(fam, 1000, 3)
        w = w.copy()
        if fam.cfg.epsilon_tilde == 1:
            w[::100] = 0
        for k, v in frame_identity_residuals(fam, th, s, w).items():
            worst[k] = max(worst.get(k, 0.0), v)
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    report(3, max(worst.values()) <= 1e-10, f"{detail} (tol 1e-10, 1000 points/family)")


def test_criterion_04_equivariance_and_group():
    eq = comm = form = 0.0
    for fam in FAMILIES:
        th, s, w = _samples(fam, 20, 4)
        grid = np.linspace(-1.0, 1.0, 20)
        U, V, K = np.meshgrid(grid, math.pi * grid, np.arange(20), indexing="ij")
        res = equivariance_residuals(fam, th[K], s[K], w[K], U, V)
        eq = max(eq, float(np.max(res)) / fam.r)
        c, f = group_algebra_residual(fam.kind, list(zip(grid, math.pi * grid[::-1])), fam.cfg)
        comm, form = max(comm, c), max(form, f)
    report(4, eq <= 1e-10 and comm <= 1e-12 and form <= 1e-12,
           f"equivariance {eq:.1e} r (tol 1e-10 r, 20^3/family); commute {comm:.1e}, "
           f"form {form:.1e} (tol 1e-12)")


def test_criterion_05_frame_derivatives():
    fd = FdConfig(step=1e-5)
    worst = 0.0
    for fam in FAMILIES:
        th, s, w = _samples(fam, 50, 5)
        orient = resolve_orientation(fam, HyperPoint(th[0], s[0], w[0]), fd)
        for k in range(50):
            ra, rb = frame_derivative_check(fam, HyperPoint(th[k], s[k], w[k]), fd, orient)
            worst = max(worst, ra, rb)
    report(5, worst <= 1e-5, f"max |e2(alpha) - alpha beta|, |e2(beta) - (beta^2+c)| = {worst:.1e} "
                             f"(tol 1e-5, step 1e-5)")


def test_criterion_06_ratio_and_sign():
    spread = 0.0
    signs = []
    for fam in FAMILIES:
        _, s, w = _samples(fam, 200, 6)
        spread = max(spread, ratio_constancy(fam, (s, w)))
        got = sign_dichotomy(fam, (s, w))
        signs.append(got == fam.cfg.epsilon * fam.cfg.epsilon_tilde)
    report(6, spread <= 1e-9 and all(signs),
           f"ratio spread {spread:.1e} (tol 1e-9); sign(beta^2+c) = eps eps_t on {sum(signs)}/5")


def test_criterion_07_fixed_point():
    known = frame = 0.0
    for fam in FAMILIES:
        th, s, w = _samples(fam, 100, 7)
        target = known_fixed_point(fam)
        known = max(known, ruling_contains_residual(fam, s, target),
                    max(coincide_residual(target, v) for v in fixed_point_vectors(fam, th, s, w)))
        _, spread = fixed_point_check(fam, (th, s, w))
        frame = max(frame, spread)
    report(7, known <= 1e-8 and frame <= 1e-6,
           f"known point residual {known:.1e} (tol 1e-8); frame point spread {frame:.1e} (tol 1e-6)")


def test_criterion_08_spine_curvature():
    num = alg = 0.0
    for fam in FAMILIES:
        kappa = spine_curvature_closed(fam)
        for x in np.linspace(-1.0, 1.0, 5):
            num = max(num, abs(spine_curvature_numeric(fam, float(x)) - kappa))
        _, s, w = _samples(fam, 200, 8)
        alg = max(alg, gamma_curvature_check(fam, (s, w)))
    report(8, num <= 1e-5 and alg <= 1e-9,
           f"numeric vs closed {num:.1e} (tol 1e-5); off-spine formula {alg:.1e} (tol 1e-9)")


def test_criterion_09_immersion_rank():
    ranks = []
    for fam in FAMILIES:
        th, s, w = _samples(fam, 20, 9)
        for k in range(20):
            ranks.append(immersion_rank_check(fam, HyperPoint(th[k], s[k], w[k]))[0])
            if fam.cfg.epsilon_tilde == 1:
                ranks.append(immersion_rank_check(fam, HyperPoint(th[k], s[k], 0j))[0])
    rigged = []
    for fam in FAMILIES[:1] + FAMILIES[2:3] + FAMILIES[4:]:
        cfg = fam.cfg
        mod = sum(default_w_box(cfg)) / 2
        rigged.append(immersion_rank_check(rigged_curve(cfg, s0=0.4), HyperPoint(0.1, 0.4, mod))[0])
    report(9, min(ranks) == 4 and max(rigged) <= 3,
           f"family rank min {min(ranks)} over {len(ranks)} points incl. spine; rigged rank {max(rigged)}")


def test_criterion_10_bisector():
    fam = CurveFamily("ch2-equidistant", 0.0, 1.0)
    th, s, w = _samples(fam, 100, 10)
    a_max = curv = mean = 0.0
    for k in range(100):
        sd = shape_closed(fam, HyperPoint(th[k], s[k], w[k]))
        m = abs(w[k])
        a_max = max(a_max, abs(sd.alpha))
        curv = max(curv, float(np.max(np.abs(np.sort(sd.principal_curvatures) - np.sort([0, m, -m])))))
        mean = max(mean, abs(sd.mean_curvature))
    report(10, a_max == 0 and curv <= 1e-12 and mean <= 1e-12,
           f"max|alpha| {a_max:g}, curvatures vs {{0, |w|, -|w|}} {curv:.1e}, mean {mean:.1e} (tol 1e-12)")


def test_criterion_11_determinism(tmp_path):
    outs = []
    env = dict(os.environ)
    for k in range(2):
        path = tmp_path / f"run{k}.json"
        proc = subprocess.run([sys.executable, "-m", "ruledform.cli", "verify", "--seed", "7",
                               "--out", str(path)], capture_output=True, env=env)
        assert proc.returncode == 0, proc.stderr.decode()
        outs.append(path.read_bytes())
    report(11, outs[0] == outs[1], f"two verify runs, seed 7: {len(outs[0])} bytes, identical={outs[0] == outs[1]}")
