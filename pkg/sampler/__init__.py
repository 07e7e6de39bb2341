"""
Sampler package: random combination matrices, coupled step-sizes and RNG streams.
"""

from sampler.law import ParticipationLaw
from sampler.realization_sampler import RealizationSampler
from sampler.streams import Streams

__all__ = ["ParticipationLaw", "RealizationSampler", "Streams"]
