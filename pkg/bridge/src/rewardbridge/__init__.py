"""Thin client for the reward-service line protocol.

Embeds reward scoring into a training loop without linking the grading
library: it spawns the service as a subprocess (stdio mode) or connects
to a running TCP instance, sends one JSON request per completion, and
returns the responses untouched.
"""

from .bridge import BridgeConfig, BridgeError, BridgeResponse, RewardBridge

__all__ = ["BridgeConfig", "BridgeError", "BridgeResponse", "RewardBridge"]
