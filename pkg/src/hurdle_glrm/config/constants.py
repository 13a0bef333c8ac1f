"""Shared constants for hurdle-glrm."""

import math
from typing import Literal

# Token used wherever a value domain element or nu may be "missing"
MISSING_TOKEN = "missing"
MissingToken = Literal["missing"]

# MCAR selection probability is [1 + exp(MCAR_LOGIT)]^-1
MCAR_LOGIT = 1.7
MCAR_RATE = 1.0 / (1.0 + math.exp(MCAR_LOGIT))

# Simulated missing-data study
MAR_N_ROWS = 5000
MAR_N_COLUMNS = 10
MAR_TRUE_RANK = 4
MAR_NOISE_RANGE = (0.9, 1.1)

# Synthetic zero-inflated corpus, sized after the factory data it replaces
ZERO_INFLATED_N_ROWS = 2200
ZERO_INFLATED_N_COLUMNS = 14
ZERO_INFLATED_TRUE_RANK = 5
ZERO_INFLATED_MEAN_SCALE = 3.0

# Generator recorded in every simulation manifest
GENERATOR_NAME = "numpy.random.PCG64"

# CSV dialect used for every table read or written
CSV_DELIMITER = ","
CSV_ENCODING = "utf-8"
CSV_FLOAT_FORMAT = "%.17g"

# Post-condition tolerance for the hurdle weight system
WEIGHT_TOLERANCE = 1e-9
