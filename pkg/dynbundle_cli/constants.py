"""Scenario presets, their defaults and accepted aliases."""

import math

PRESET_NAMES = (
    "gravity-circular",
    "gravity-elliptic",
    "two-body",
    "linear-field",
    "clock",
    "custom",
)

METHODS = {"rk4", "picard"}

# Keys every preset understands, with the defaults filled in when omitted.
COMMON_PARAMS = {
    "dt": 1e-3,
    "seed": 0,
    "method": "rk4",
    "grid": 256,
}

GRAVITY_PARAMS = {
    "G": 1.0,
    "m1": 1.0,
    "m2": 1.0,
    "rho_min": 1e-9,
}

PRESETS = {
    "gravity-circular": {
        "description": "Test mass on a circular orbit around a pinned source",
        "state": "(r, v) in R^6",
        "params": {**GRAVITY_PARAMS, "t_end": 2.0 * math.pi},
        "initial_state": [1.0, 0.0, 0.0, 0.0, 1.0, 0.0],
    },
    "gravity-elliptic": {
        "description": "Test mass on an eccentric bound orbit around a pinned source",
        "state": "(r, v) in R^6",
        "params": {**GRAVITY_PARAMS, "t_end": 4.0},
        "initial_state": [1.0, 0.0, 0.0, 0.0, 0.8, 0.0],
    },
    "two-body": {
        "description": "Two masses under mutual gravity",
        "state": "(r1, v1, r2, v2) in R^12",
        "params": {**GRAVITY_PARAMS, "t_end": 1.0},
        "initial_state": [-0.5, 0.0, 0.0, 0.0, -0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.5, 0.0],
    },
    "linear-field": {
        "description": "The linear field x' = x",
        "state": "x in R^n",
        "params": {"t_end": 1.0},
        "initial_state": [1.0],
    },
    "clock": {
        "description": "Unit-rate clock t' = 1 on (-window, window)",
        "state": "t in R",
        "params": {"t_end": 2.0, "window": 10.0},
        "initial_state": [0.0],
    },
    "custom": {
        "description": "Field given by an expression in the 'field' section",
        "state": "x in R^n, n = len(initial_state)",
        "params": {},
        "initial_state": None,
    },
}

# Presets whose state carries energy and angular momentum.
MECHANICAL_PRESETS = {"gravity-circular", "gravity-elliptic", "two-body"}

# Parameters a custom scenario must spell out.
CUSTOM_REQUIRED_PARAMS = ("dt", "t_end")

INTEGER_PARAMS = {"seed", "grid"}
STRING_PARAMS = {"method"}

PRESET_ALIASES = {
    "circular": "gravity-circular",
    "orbit": "gravity-circular",
    "kepler": "gravity-circular",
    "gravity": "gravity-circular",
    "elliptic": "gravity-elliptic",
    "ellipse": "gravity-elliptic",
    "eccentric": "gravity-elliptic",
    "twobody": "two-body",
    "two_body": "two-body",
    "binary": "two-body",
    "linear": "linear-field",
    "linear_field": "linear-field",
    "exponential": "linear-field",
    "time": "clock",
    "expression": "custom",
}
