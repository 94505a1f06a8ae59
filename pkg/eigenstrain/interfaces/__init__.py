"""Interfaces for pluggable components."""
