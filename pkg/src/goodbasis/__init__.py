"""Good bases of invariants, reductions and potential vector fields for duality reflection groups."""

__version__ = "0.1.0"
