"""Over-the-air group secret key generation (half- and full-duplex)."""

import json

from ._otakey import (
    ConfigError,
    OtakeyError,
    derive_key,
    exp,
    factorize,
    is_probable_prime,
    ln,
    run_fmac,
    run_hmac,
    run_trial_json,
)
from ._otakey import run_experiment_json as _run_experiment_json

__all__ = [
    "ConfigError",
    "OtakeyError",
    "derive_key",
    "exp",
    "factorize",
    "is_probable_prime",
    "ln",
    "run_experiment",
    "run_fmac",
    "run_hmac",
    "run_trial",
]


def run_experiment(config, workers=0, write_files=False):
    """Run an experiment described by a config dict.

    Returns (summary dict, metrics CSV text). Files are written under
    config["out"] only when write_files is true.
    """
    summary, csv = _run_experiment_json(json.dumps(config), workers, write_files)
    return json.loads(summary), csv


def run_trial(config, trial_id):
    """Full record of one trial: primes, channel, transcript, Eve's report."""
    return json.loads(run_trial_json(json.dumps(config), trial_id))
