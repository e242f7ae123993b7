"""semboost: desk-scale text-to-motion diffusion with geometric caption enrichment.

The package covers the full pipeline: a procedural motion generator with
ground-truth part-status labels, a feature codec for the 263/269-dim motion
representation, the extractor/translator/combiner that turns raw joints into
caption phrases, a transformer denoiser with hand-derived gradients, DDPM
training and guided sampling, and the metric suite (FID, R-precision,
MM-Dist, Diversity, MModality, plus status-histogram similarities).
"""

__version__ = "0.1.0"
