"""aeroamp - Energy model and emissions comparison for drone package delivery."""

__version__ = "0.1.0"
