"""Repeat-accumulate codes over integer rings Z_{2^m} with 2^m-PAM signaling."""

from ringra.ring import RingParams, ring_params, ring_for_q

__all__ = ["RingParams", "ring_params", "ring_for_q"]
__version__ = "0.1.0"
