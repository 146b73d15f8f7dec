"""Stabilizer engine module."""
