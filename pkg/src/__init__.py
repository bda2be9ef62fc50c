"""
Masked acoustic pretraining - Main package
"""
__version__ = "0.1.0"
__author__ = "Glemes - GLEMES FFT"
__description__ = "Masked-timestep self-supervised pretraining for audio emotion intensity"
