"""Hierarchy metrics and shock-propagation dynamics for weighted trade
networks."""

from . import hclust, ingest, metrics, shockprop, stats  # noqa: F401

__version__ = "0.1.0"
