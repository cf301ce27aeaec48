"""Tests for the fhzip package."""
