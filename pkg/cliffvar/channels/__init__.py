"""Angle distributions and Clifford-mixture channel decompositions."""
