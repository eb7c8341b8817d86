"""Named run configurations for `asymsob verify --preset`."""

import json

_TRIANGLE = {"type": "polytopeV", "dim": 2, "vertices": [[-1, -1], [2, 0], [0, 1]]}
_DISK = {"type": "ball", "dim": 2, "center": [0, 0], "radius": 1}
_S = [0.8, 0.9, 0.95, 0.975, 0.99]

_PRESETS = {
    "prop1d-hat-p1": {
        "kind": "proposition",
        "function": {"name": "hat1d", "dim": 1},
        "domain": [-2, 2],
        "p": 1,
        "s": _S,
        "tolerance": 0.02,
    },
    "prop1d-hat-p2": {
        "kind": "proposition",
        "function": {"name": "hat1d", "dim": 1},
        "domain": [-2, 2],
        "p": 2,
        "s": _S,
        "tolerance": 0.02,
    },
    "thm-1d-asym": {
        "kind": "theorem",
        "function": {"name": "hat1d", "dim": 1},
        "body": {"type": "polytopeV", "dim": 1, "vertices": [[-1], [2]]},
        "p": 1,
        "sign": "plus",
        "s": _S,
        "method": "spherical",
        "tolerance": 0.05,
    },
    "thm-2d-triangle-p2": {
        "kind": "theorem",
        "function": {"name": "tent_tensor", "dim": 2},
        "body": _TRIANGLE,
        "p": 2,
        "sign": "plus",
        "s": _S,
        "method": "spherical",
        "tolerance": 0.05,
    },
    "thm-2d-disk-bbm": {
        "kind": "bbm",
        "function": {"name": "bump", "dim": 2},
        "p": 2,
        "s": _S,
        "method": "spherical",
        "tolerance": 0.05,
    },
    "remark-duality": {
        "kind": "duality",
        "function": {"name": "tent_tensor", "dim": 2},
        "body": _TRIANGLE,
        "p": 2,
        "s": _S,
        "method": "mc",
        "budgets": {"samples": 1000000},
        "seed": 42,
        "tolerance": 0.05,
    },
    "scaling-law": {
        "kind": "scaling",
        "function": {"name": "tent_tensor", "dim": 2},
        "body": _TRIANGLE,
        "p": 2,
        "sign": "plus",
        "s": _S,
        "method": "spherical",
        "lambdas": [0.5, 2],
        "tolerance": 0.05,
    },
    "zero": {
        "kind": "theorem",
        "function": {"name": "zero", "dim": 2},
        "body": _DISK,
        "p": 2,
        "sign": "plus",
        "s": _S,
        "method": "spherical",
        "tolerance": 0.05,
    },
}

PRESETS = {name: json.dumps(cfg, sort_keys=True) for name, cfg in _PRESETS.items()}


def preset_names():
    return sorted(PRESETS)


def load_preset(name):
    """Fresh dict for a preset; KeyError for unknown names."""
    return json.loads(PRESETS[name])
