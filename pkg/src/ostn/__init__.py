"""Outage analysis of interference-limited overlay satellite-terrestrial IoT networks."""

__version__ = "0.1.0"
