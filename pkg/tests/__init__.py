"""
Test suite for the rotation algebra toolkit.
"""
