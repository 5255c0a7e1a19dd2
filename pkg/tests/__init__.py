"""
Test package for dilatoo.
"""
