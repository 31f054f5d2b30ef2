"""
Tests for the collective open set recognition toolkit.
"""
