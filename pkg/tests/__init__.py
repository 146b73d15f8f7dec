"""
cliffvar test suite.
"""
