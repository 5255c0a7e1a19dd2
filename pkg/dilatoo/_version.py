"""
Version information for dilatoo.
"""

__version__ = "0.1.0"
