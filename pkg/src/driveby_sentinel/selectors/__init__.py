"""
Selectors for querying evaluation reports.
"""

from .jsonpath import ReportSelector, create_selector

__all__ = ["ReportSelector", "create_selector"]
