"""aeroamp tests."""
