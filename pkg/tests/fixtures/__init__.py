"""Shared toy traces and stub models for the tests."""
