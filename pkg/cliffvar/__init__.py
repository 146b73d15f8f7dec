"""
cliffvar: Clifford-approximant estimation of gradient statistics for
randomly initialized variational quantum circuits.
"""

__version__ = "1.0.0"
