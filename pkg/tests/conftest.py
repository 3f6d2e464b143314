import functools
from pathlib import Path

import pytest

from bifront import FrontProblem, critical_speed, fisher_burgers, power_model, reconstruct

DATA = Path(__file__).parent / "data"

# Named instances used across the suite: (model factory, eps).
INSTANCES = {
    "fb_a1": (lambda: fisher_burgers(1.0, 1.0), 2e-3),
    "fb_a0.5": (lambda: fisher_burgers(1.0, 0.5), 2e-3),
    "fb_a0.05": (lambda: fisher_burgers(1.0, 0.05), 2e-3),
    "fb_a-0.05": (lambda: fisher_burgers(1.0, -0.05), 2e-3),
    "fb_a-1/6": (lambda: fisher_burgers(1.0, -1.0 / 6.0), 2e-3),
    "fb_a-0.5": (lambda: fisher_burgers(1.0, -0.5), 2e-3),
    "fig2": (lambda: fisher_burgers(1.0, 1.0), 2e-4),
    "fig3_left": (lambda: power_model(1.0, 1.5), 1e-2),
    "fig3_right": (lambda: power_model(1.0, 1.5), 2e-3),
    "fig4_left": (lambda: power_model(2.0, 2.0), 1e-1),
    "fig4_right": (lambda: power_model(2.0, 2.0), 1e-2),
}

REGIME_MODELS = {
    "Case1": lambda: fisher_burgers(1.0, 1.0),
    "Case2": lambda: fisher_burgers(1.0, 0.05),
    "Case3": lambda: fisher_burgers(1.0, -0.5),
}


@functools.lru_cache(maxsize=None)
def model_of(name):
    factory = INSTANCES[name][0] if name in INSTANCES else REGIME_MODELS[name]
    return factory()


@functools.lru_cache(maxsize=None)
def solve(name, eps=None):
    """Cached ``(result, problem, profile)`` for a named instance."""
    model = model_of(name)
    eps = INSTANCES[name][1] if eps is None else eps
    res = critical_speed(model, eps)
    problem = FrontProblem(model, eps, res.bracket[1])
    return res, problem, reconstruct(res.trajectory_at_c_star, problem)


@pytest.fixture(scope="session")
def cert_records():
    from bifront.oracle import load_certification
    return load_certification(DATA / "certification.json")


# -- acceptance summary -------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
