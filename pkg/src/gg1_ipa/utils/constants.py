# -*- coding: utf-8 -*-
"""
Numeric defaults shared by the simulator, the estimators and the CLI
"""

# Batch means
IPA_DEFAULT_BATCHES = 64
IPA_DEFAULT_CI_LEVEL = 0.95

# Palm identity checks pass within k joint standard errors
IPA_DEFAULT_PALM_K = 3.0

# Stability probe
IPA_MIN_STABILITY_PROBE = 1000
IPA_STABILITY_GRID_POINTS = 17

# Paths shorter than this skip the empirical load check
IPA_MIN_LOAD_CHECK = 1000

# warmup = IPA_WARMUP_FACTOR / (1 - rho)^2
IPA_WARMUP_FACTOR = 10.0
IPA_MAX_WARMUP = 1_000_000

# Relative finite-difference step, h = IPA_FD_REL_STEP * parameter
IPA_FD_REL_STEP = 0.01

# Relative step for the numeric theta-derivative of a general cdf
IPA_CDF_THETA_STEP = 1e-6

# Points per segment used to verify monotonicity of a functional
IPA_MONOTONE_PROBE = 64
