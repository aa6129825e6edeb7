"""Massive MIMO workbench: channels, linear processing, capacity bounds,
power control, baseband cost models, and coded link-level simulation."""

__version__ = "0.1.0"

from . import (  # noqa: F401
    capacity,
    channel,
    estimation,
    ldpc,
    linklevel,
    linproc,
    multicell,
    powerctl,
    syscost,
)
