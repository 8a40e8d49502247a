"""CANREAL package."""

import logging
from importlib.metadata import PackageNotFoundError, version

from canreal import example_systems
from canreal.linear_systems import ImpulseResponse, LinearSystem, esp_check, impulse_response
from canreal.nerode_oracle import FiniteSystem, reduce_finite
from canreal.realization import FiniteMemoryFilter, minimal_realization
from canreal.reduction import reduce, verify_reduction
from canreal.report import Report
from canreal.signals import Signal

logging.basicConfig(level=logging.INFO)

try:
    __version__ = version("canreal")
except PackageNotFoundError:
    __version__ = "dev"
