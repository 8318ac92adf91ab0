"""Trust-based data usage control for smart-city sensor data.

Owners state usage policies over temporal, spatial and abstraction scopes;
requests are decided by a modal defeasible logic reasoner, granted data is
released at the permitted granularity, and every decision is logged.
"""

from .enforcement import ConsumerRequest, Decision, Enforcer, evaluate, explain, replay

__version__ = "0.1.0"

__all__ = ["ConsumerRequest", "Decision", "Enforcer", "evaluate", "explain", "replay", "__version__"]
