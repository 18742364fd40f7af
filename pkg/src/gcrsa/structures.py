"""Registry of rsa structures by tag, shared by the FM-index, the container and the CLI."""

from __future__ import annotations

from .appart import ApIndex
from .gcc import GccIndex
from .wavelet import WaveletMatrix, WaveletTree

__all__ = ["SEQUENCE_TAGS", "STRUCTURE_TAGS", "build_structure", "structure_tag"]

# tag -> (class, shape, default arity)
_WAVELETS = {
    "WT": (WaveletTree, "balanced", 2),
    "WTH": (WaveletTree, "huffman", 2),
    "WM": (WaveletMatrix, "balanced", 2),
    "WMH": (WaveletMatrix, "huffman", 2),
    "MWT": (WaveletTree, "balanced", 4),
    "MWTH": (WaveletTree, "huffman", 4),
}
SEQUENCE_TAGS = ("GCC_N", "GCC_C", *_WAVELETS, "AP", "AP_RP")
STRUCTURE_TAGS = (*SEQUENCE_TAGS, "FMI")


def build_structure(tag: str, S, *, backend: str = "plain", s: int = 1024, sprime: int = 8,
                    delta: int = 1, cut: int = 4, cuto: int = 3, arity: int | None = None,
                    shape: str | None = None, fallback: str = "plain", sigma=None, **extra):
    """Build the rsa structure named by ``tag`` over ``S``."""
    gcc = dict(s=s, sprime=sprime, delta=delta)
    if tag in ("GCC_N", "GCC_C"):
        return GccIndex(S, sampling=tag[-1], sigma=sigma, **gcc)
    if tag in _WAVELETS:
        cls, dshape, dar = _WAVELETS[tag]
        if shape is not None and shape != dshape:
            raise ValueError(f"{tag} has shape {dshape}, not {shape}")
        if arity is not None and tag not in ("MWT", "MWTH") and arity != 2:
            raise ValueError(f"{tag} is binary; use MWT/MWTH for arity {arity}")
        return cls(S, dshape, arity or dar, backend, sigma=sigma, gcc=dict(gcc, sampling="N"), **extra)
    if tag in ("AP", "AP_RP"):
        return ApIndex(S, cut, cuto, compressed=(tag == "AP_RP"), fallback=fallback,
                       sigma=sigma, gcc=dict(gcc, sampling="N"))
    raise ValueError(f"unknown structure tag {tag!r}")


def structure_tag(obj) -> str:
    """Tag describing an already built structure."""
    from .fmindex import FmIndex

    if isinstance(obj, FmIndex):
        return "FMI"
    if isinstance(obj, GccIndex):
        return "GCC_" + obj.config.sampling
    if isinstance(obj, ApIndex):
        return "AP_RP" if obj.compressed else "AP"
    if isinstance(obj, (WaveletTree, WaveletMatrix)):
        for tag, (cls, shape, ar) in _WAVELETS.items():
            if isinstance(obj, cls) and obj.shape == shape and (obj.arity > 2) == (ar > 2):
                return tag
    raise TypeError(f"not a known structure: {type(obj).__name__}")
