"""Go engine whose value head predicts a winrate sigmoid over bonus points."""

__version__ = "0.1.0"
