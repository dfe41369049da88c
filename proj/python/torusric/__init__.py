import json

from . import _core
from ._core import (
    CSV_SCHEMA,
    EXIT_CONFIG,
    EXIT_INFEASIBLE,
    EXIT_PASS,
    EXIT_POSITIVITY,
    ConvergenceError,
    DomainError,
    InconsistencyError,
    PreconditionError,
    small_case,
    solve_k1,
    solve_x0,
)

__all__ = [
    "CSV_SCHEMA", "EXIT_CONFIG", "EXIT_INFEASIBLE", "EXIT_PASS", "EXIT_POSITIVITY",
    "ConvergenceError", "DomainError", "InconsistencyError", "PreconditionError",
    "default_config", "load_config", "validate_disk", "small_case", "solve_k1", "solve_x0",
    "profile", "validate", "build", "certify", "mollify_report",
]


def default_config():
    return json.loads(_core.default_config())


def load_config(path):
    with open(path) as f:
        return json.loads(_core.normalize_config(f.read()))


def validate_disk(n, weights):
    return json.loads(_core.validate_disk(n, [list(w) for w in weights]))


def profile(xs, epsilon=0.1, delta=0.15, nu=0.05, k2=40.0, branch="shifted"):
    """Rows (G, G', G'', K) of the warping profile at each x."""
    return _core.profile(epsilon, delta, nu, k2, branch, list(xs))


def _run(command, config, write_files):
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(_core.run(command, text, write_files))


def validate(config, write_files=False):
    return _run("validate", config, write_files)


def build(config, write_files=False):
    return _run("build", config, write_files)


def certify(config, write_files=False):
    return _run("certify", config, write_files)


def mollify_report(config, write_files=False):
    return _run("mollify-report", config, write_files)
