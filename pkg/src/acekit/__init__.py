"""acekit: average causal effects with propensity variables, IPW and AIPW."""

__version__ = "0.1.0"
