import numpy as np
import pytest

from ruledform.curves import CurveFamily, FamilyKind

REFERENCE = [
    (FamilyKind.CP2_CIRCLE, 0.3),
    (FamilyKind.CH2_EQUIDISTANT, 0.0),
    (FamilyKind.CH2_CIRCLE, 0.3),
    (FamilyKind.CH2_HOROCYCLE, 0.0),
    (FamilyKind.CH2_EXTERIOR_CIRCLE, 0.3),
]

# a second parameter per family, away from the reference values
OFFSET = [
    (FamilyKind.CP2_CIRCLE, 1.1),
    (FamilyKind.CH2_EQUIDISTANT, -0.45),
    (FamilyKind.CH2_CIRCLE, 0.8),
    (FamilyKind.CH2_HOROCYCLE, 0.0),
    (FamilyKind.CH2_EXTERIOR_CIRCLE, -0.2),
]


def family_ids(params):
    return [f"{k.value}-a{a:g}" for k, a in params]


@pytest.fixture(params=REFERENCE, ids=family_ids(REFERENCE))
def family(request):
    kind, a = request.param
    return CurveFamily(kind, a, 1.0)


@pytest.fixture(params=[(k, a, r) for (k, a) in OFFSET for r in (0.6, 2.5)],
                ids=[f"{k.value}-a{a:g}-r{r:g}" for (k, a) in OFFSET for r in (0.6, 2.5)])
def scaled_family(request):
    kind, a, r = request.param
    return CurveFamily(kind, a, r)


def inside_w(cfg, rng, n):
    """Random w inside the model domain of ``cfg``."""
    if cfg.epsilon == 1:
        mod = rng.uniform(0.0, 4.0, n)
    elif cfg.epsilon_tilde == 1:
        mod = rng.uniform(0.0, 0.97, n)
    else:
        mod = rng.uniform(1.03, 4.0, n)
    return mod * np.exp(1j * rng.uniform(0, 2 * np.pi, n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def wobbly_curve(cfg, amp=0.3):
    """A non-homogeneous curve with varying curvature in the curve plane.

    ``delta = r (C(x) e0 + e^{ip} S(x) e1)`` with (C, S) = (cos, sin) in CP^2
    and (cosh, sinh) in CH^2, ``x = 0.4 + amp sin s`` and ``p = 1.7 s + 0.2 s^2``.
    """
    import math

    from ruledform.curves import GeneralCurve

    if cfg.epsilon == 1:
        C, dC, ddC = math.cos, (lambda t: -math.sin(t)), (lambda t: -math.cos(t))
        S, dS, ddS = math.sin, math.cos, (lambda t: -math.sin(t))
    else:
        C, dC, ddC = math.cosh, math.sinh, math.cosh
        S, dS, ddS = math.sinh, math.cosh, math.sinh
    r = cfg.r

    def func(s):
        x, x1, x2 = 0.4 + amp * math.sin(s), amp * math.cos(s), -amp * math.sin(s)
        p, p1, p2 = 1.7 * s + 0.2 * s * s, 1.7 + 0.4 * s, 0.4
        E = np.exp(1j * p)
        d = r * np.array([C(x), E * S(x), 0])
        d1 = r * np.array([dC(x) * x1, E * (1j * p1 * S(x) + dS(x) * x1), 0])
        d2 = r * np.array([
            ddC(x) * x1 * x1 + dC(x) * x2,
            E * (1j * p1 * (1j * p1 * S(x) + dS(x) * x1) + 1j * p2 * S(x)
                 + 1j * p1 * dS(x) * x1 + ddS(x) * x1 * x1 + dS(x) * x2),
            0,
        ])
        return d, d1, d2

    return GeneralCurve(cfg, func)


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
