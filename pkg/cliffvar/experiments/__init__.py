"""
Experiment framework for cliffvar.
Barren-plateau sweeps, bias/variance studies and architecture scans.
"""
