"""Laurent dynamics: exact orbits, Mahler measures, entropy estimates.

The compiled core does the work; this package re-exports it and adds a
convenience wrapper that returns the entropy report as a dictionary.
"""

import json as _json

from ._lpdyn import (
    Error,
    __version__,
    apply_mutations,
    closed_form,
    closed_form_names,
    entropy_report_json,
    explore,
    initial_seed_json,
    is_periodic,
    iterate_rational,
    iterate_symbolic,
    mahler_sequence,
    system_text,
    tropical_dvectors,
    version,
)

__all__ = [
    "Error",
    "__version__",
    "apply_mutations",
    "closed_form",
    "closed_form_names",
    "entropy_report",
    "entropy_report_json",
    "explore",
    "initial_seed_json",
    "is_periodic",
    "iterate_rational",
    "iterate_symbolic",
    "mahler_sequence",
    "system_text",
    "tropical_dvectors",
    "version",
]


def entropy_report(system, **kwargs):
    """Entropy report for a system, parsed into a dictionary.

    Accepts the same keyword arguments as :func:`entropy_report_json`
    (samples, seed, algebraic_n, diophantine_n, mahler_n, threads).
    """
    return _json.loads(entropy_report_json(system, **kwargs))
