"""cobord2: decomposed 1+1+1 cobordisms evaluated into a symbolic
category of moduli-space correspondences, with exact finite-group
oracles and numerical SU(2) holonomy charts."""

__version__ = "0.1.0"
