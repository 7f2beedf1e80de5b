"""
RIS diffractional channel coding toolkit

Generator matrices from two-layer RIS geometry, block and trellis codes,
detectors, classical baselines and a seeded Monte-Carlo BER harness.
"""

__version__ = "0.4.0"
