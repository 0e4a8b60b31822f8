"""
Tests for the pyconic package.
"""
