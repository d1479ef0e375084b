"""Python access to the barylab core.

Functions are described by dicts: ``{"name": "m_z", "params": {"z": 2}}`` for a
builtin or ``{"table": {...}}`` for a tabulated function in the file format.
The empty string evaluates to ``"epsilon"``.
"""

import json

from . import _barylab
from ._barylab import BarylabError, builtin_names, default_seed, mz_section_coeffs

__all__ = [
    "BarylabError",
    "builtin",
    "builtin_names",
    "check",
    "default_seed",
    "evaluate",
    "mz_section_coeffs",
    "run",
]


def builtin(name, **params):
    return {"name": name, "params": params}


def evaluate(function, strings):
    """Values of the function on each string (a list of atoms)."""
    return json.loads(_barylab.evaluate_json(json.dumps(function), json.dumps([list(s) for s in strings])))


def check(function, prop, max_len=4, samples=10_000, seed=default_seed, budget=None):
    """Property report as a dict with status, space and witness."""
    options = {"max_len": max_len, "samples": samples, "seed": seed}
    if budget is not None:
        options["budget"] = budget
    return json.loads(_barylab.check_json(json.dumps(function), prop, json.dumps(options)))


def run(command, **options):
    """Runs a CLI command in process. Returns (exit_code, report)."""
    code, out = _barylab.run_json(command, json.dumps(options))
    if command == "eval":
        return code, out.splitlines()
    return code, json.loads(out)
