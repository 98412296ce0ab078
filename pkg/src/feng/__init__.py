"""feng: LLM-driven feature engineering for tabular datasets.

An iterative engine that prompts a language model for feature-construction
programs in a small safe expression language, executes them over a columnar
table, and keeps only changes that improve validation performance.
"""

__version__ = "0.1.0"
