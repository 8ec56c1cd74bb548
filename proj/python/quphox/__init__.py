"""Design search for linear-optical quantum experiments.

The heavy lifting lives in the compiled extension; this package adds thin
dict-based wrappers around the JSON entry points.
"""

import json as _json

from ._core import (  # noqa: F401
    CycNum,
    PhotonicState,
    Setup,
    __version__,
    block_signal,
    cheap_state_check,
    gate_match_table_json,
    ghz_match_json,
    grow_json,
    mixes_pairs,
    run_exhaustive_json,
    run_search_json,
    simplify_json,
    simulate,
)


def run_search(config):
    """Run the randomized search; `config` is a dict using the config schema."""
    return _json.loads(run_search_json(_json.dumps(config)))


def run_exhaustive(config, max_len):
    """Fully enumerate element chains up to `max_len`."""
    return _json.loads(run_exhaustive_json(_json.dumps(config), max_len))


def ghz_match(state, dims, allow_mavericks=True):
    """GHZ certificate as a dict, or None."""
    raw = ghz_match_json(state, dims, allow_mavericks)
    return None if raw is None else _json.loads(raw)


def gate_match_table(control_in, target_in, control_out, target_out):
    """Gate certificate as a dict, or None."""
    raw = gate_match_table_json(control_in, target_in, control_out, target_out)
    return None if raw is None else _json.loads(raw)


def grow(target, threshold, max_blocks=5, seed=1, restarts=5, reoptimize_all=True):
    """Grow blocks toward a 2x2 target operator; returns a result dict."""
    return _json.loads(grow_json(target, threshold, max_blocks, seed, restarts, reoptimize_all))
