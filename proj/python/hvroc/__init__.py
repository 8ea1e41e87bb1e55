"""Automation synthesis against a stochastic human reaching model."""

import numpy as np

from ._hvroc import *  # noqa: F401,F403
from ._hvroc import Error, ConfigError  # noqa: F401


def load_example(name):
    """Scenario config for a bundled example ("example1" or "example2")."""
    return parse_config(bundled_config(name))  # noqa: F405


def solve_example(name):
    """Plant, cost, human policy and solver report for a bundled example."""
    cfg = load_example(name)
    plant = build_point_mass_plant(cfg.task)  # noqa: F405
    Q = materialize_reference_cost(cfg.human_q, cfg.human_terminal_only, cfg.task.N)  # noqa: F405
    cost = CostSpec(Q, np.diag(cfg.human_r))  # noqa: F405
    policy, report = solve_lqs(plant, cost)  # noqa: F405
    return plant, cost, policy, report
