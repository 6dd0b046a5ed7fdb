"""
Exact-arithmetic dynamics: adding machines, competing shrinking holes,
interval maps and solenoidal substitution models.
"""

__version__ = "0.4.0"
