"""
frenet-kit: Frenet frames of point sequences and tangents of sampled sets
"""

__version__ = "0.1.0"
