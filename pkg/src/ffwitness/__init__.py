"""Jets, seminorms and counterexample witnesses for composition operators on
smooth periodic functions."""

__version__ = "0.1.0"
