"""f-moment Brownian-motion criterion and self-normalized CLT toolkit.

Reports come back as plain dicts with the same layout as the CLI's
report.json ``result`` block.
"""

import json

from ._fmoment import (
    CharFn,
    ConfigError,
    burkholder_check,
    g_shift,
    gaussian_abs_moment,
    psi,
    psi_inverse,
    verify_fcond,
)
from . import _fmoment

__all__ = [
    "CharFn",
    "ConfigError",
    "burkholder_check",
    "counterexample",
    "g_shift",
    "gaussian_abs_moment",
    "psi",
    "psi_inverse",
    "run_clt",
    "run_criterion",
    "subsequence_criterion",
    "verify_fcond",
]


def run_criterion(spec, f, seed, replicates=50000, points=32, h0=0.1, levels=8, threads=1):
    """Increment-moment criterion for a process spec (dict or JSON text)."""
    text = spec if isinstance(spec, str) else json.dumps(spec)
    return json.loads(_fmoment._run_criterion(text, f, seed, replicates, points, h0, levels, threads))


def subsequence_criterion(spec, f, t_seq, seed, replicates=50000, threads=1):
    text = spec if isinstance(spec, str) else json.dumps(spec)
    return json.loads(_fmoment._subsequence_criterion(text, f, list(t_seq), replicates, seed, threads))


def counterexample(f, t_seq, seed, replicates=50000, threads=1):
    return json.loads(_fmoment._counterexample(f, list(t_seq), replicates, seed, threads))


def run_clt(model, seed, config=None, threads=1):
    """CLT diagnostics; ``config`` keys as in the CLI's clt config block."""
    m = model if isinstance(model, str) else json.dumps(model)
    c = json.dumps(config or {})
    return json.loads(_fmoment._run_clt(m, c, seed, threads))
