"""Core utilities such as configuration and app-wide helpers."""
