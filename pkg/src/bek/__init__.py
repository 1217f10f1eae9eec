"""Bound-entanglement activation toolkit: Werner and pentagon-UPB states on
qutrits, PT-based criteria, the rank-2 distillability witness and a see-saw
optimizer over Schmidt-rank-2 vectors."""

__version__ = "0.1.0"
