"""Few-shot prompting toolkit for chart question answering and summarization."""

__version__ = "0.1.0"
