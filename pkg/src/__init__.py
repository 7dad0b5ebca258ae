"""
Church synthesis toolkit: finite-state operators from monadic specifications
"""
