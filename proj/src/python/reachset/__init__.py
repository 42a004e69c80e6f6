"""Reachability-set boundaries of curvature-bounded paths.

Configurations are accepted as JSON text or as plain dicts; missing fields
take their defaults.
"""

import json

from . import _reachset
from ._reachset import InvalidGrid, InvalidInput, random_directions, set_worker_count, torsion_rhs

__version__ = _reachset.__version__

__all__ = [
    "InvalidGrid",
    "InvalidInput",
    "boundary",
    "canonical_config",
    "config_hash",
    "oracle",
    "pmp_check",
    "random_directions",
    "set_worker_count",
    "support",
    "torsion_rhs",
]


def _text(cfg):
    if cfg is None:
        return "{}"
    return cfg if isinstance(cfg, str) else json.dumps(cfg)


def canonical_config(cfg=None):
    """The validated configuration as a dict with every default filled in."""
    return json.loads(_reachset.canonical_config(_text(cfg)))


def config_hash(cfg=None):
    return _reachset.config_hash(_text(cfg))


def boundary(cfg=None):
    """Boundary cloud: endpoints and normals as (n, d) arrays, plus families,
    counts and support records."""
    return _reachset.boundary(_text(cfg))


def oracle(cfg=None):
    """Monte Carlo endpoints as an (n, d) array."""
    return _reachset.oracle(_text(cfg))


def support(mode, direction, t_f, kappa_max=1.0, refine=True, tol=1e-4):
    return _reachset.support(mode, [float(v) for v in direction], t_f, kappa_max, refine, tol)


def pmp_check(path, cfg=None):
    """PMP report for a path file given as a dict or JSON text."""
    return json.loads(_reachset.pmp_check(_text(path), _text(cfg)))
