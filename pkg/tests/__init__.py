"""Tests for dynbundle."""
