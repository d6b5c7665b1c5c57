"""Markdown run summaries rendered with jinja2."""

from .environment import report_environment
from .summary import render_summary, write_summary

__all__ = ["render_summary", "report_environment", "write_summary"]
