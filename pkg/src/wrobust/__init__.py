"""Decoherence of W/GHZ entanglement and the protocols that consume it."""
