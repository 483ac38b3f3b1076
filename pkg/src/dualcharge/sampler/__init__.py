"""
Langevin sampling of the canonical ensemble
"""

from dualcharge.sampler.langevin import (
    Boundary,
    ParticleSystem,
    SamplerConfig,
    SamplerDivergenceError,
    chain_rng,
    langevin_step,
)
from dualcharge.sampler.moments import (
    DensityHistogram,
    MomentEstimate,
    density_histogram,
    estimate_moments,
    run_chains,
)

__all__ = [
    "Boundary",
    "DensityHistogram",
    "MomentEstimate",
    "ParticleSystem",
    "SamplerConfig",
    "SamplerDivergenceError",
    "chain_rng",
    "density_histogram",
    "estimate_moments",
    "langevin_step",
    "run_chains",
]
