"""
Estimation module for cliffvar.
Samples Clifford approximants, evaluates them and aggregates reports.
"""
