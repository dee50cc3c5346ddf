"""Pydantic models for gates, laws, implementations and reports."""
