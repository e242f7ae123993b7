from .params import ParamStore
from .denoiser import Denoiser, DenoiserConfig, FrameTokens, GlobalToken, param_count
from .checkpoint import save_checkpoint, load_checkpoint

__all__ = [
    "ParamStore",
    "Denoiser",
    "DenoiserConfig",
    "FrameTokens",
    "GlobalToken",
    "param_count",
    "save_checkpoint",
    "load_checkpoint",
]
